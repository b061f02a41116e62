#include "oracle_values.hpp"
#include "sgpt/rng.hpp"
#include "sgpt/vertex_kernels.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

using namespace sgpt;

namespace {

constexpr double pi = std::numbers::pi;

const ModelParams half = ModelParams::from_beta(0.5, 1.0, 1.0);

TEST(ThetaFactor, CausalClasses)
{
    const double a = half.a();
    EXPECT_EQ(theta_factor(a, a, 0.0, 1.0, 1.0), complex(1.0));
    const complex phase = std::exp(complex{0, a * a * 0.25});
    EXPECT_NEAR(std::abs(theta_factor(a, a, 2.0, 1.0, 1.0) - phase), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(theta_factor(a, a, -2.0, 1.0, 1.0) - phase), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(theta_factor(a, a, 2.0, 1.0, 0.0) - 1.0), 0.0, 1e-15);
    EXPECT_THROW(theta_factor(a, a, 1.0, 1.0, 1.0), OnConeError);
}

TEST(PairKernel, MatchesFeynmanExponential)
{
    const double a = half.a();
    const SpacetimePoint x{0.1, 0.7};
    const SpacetimePoint y{-0.2, 0.1};
    const SpacetimePoint d = x - y;
    const complex k = pair_feynman_kernel(a, a, x, y, 1.0);
    EXPECT_NEAR(k.imag(), 0.0, 1e-15);
    EXPECT_NEAR(k.real(), std::pow(std::abs(d.t * d.t - d.x * d.x), 0.5), 1e-14);

    for (int i = 0; i < 1000; ++i) {
        SampleStream r(11, 1, i);
        const SpacetimePoint p{r.uniform() * 2 - 1, r.uniform() * 2 - 1};
        const SpacetimePoint q{r.uniform() * 2 - 1, r.uniform() * 2 - 1};
        const double ai = r.uniform() < 0.5 ? a : -a;
        const complex want = std::exp(-ai * a * eval(PropagatorKind::Feynman, p - q));
        EXPECT_LE(std::abs(pair_feynman_kernel(ai, a, p, q, 1.0) - want), 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(Braiding, Phases)
{
    const double a = half.a();
    EXPECT_NEAR(std::abs(braiding_phase(a, a, {0, 1}, {0, 0}, 1.0) - 1.0), 0.0, 1e-15);
    const complex fut = std::exp(complex{0, a * a * 0.5});
    EXPECT_NEAR(std::abs(braiding_phase(a, a, {1, 0}, {0, 0}, 1.0) - fut), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(braiding_phase(a, a, {0, 0}, {1, 0}, 1.0) - std::conj(fut)), 0.0, 1e-15);
    const complex ratio = star_pair_kernel(a, -a, {1, 0.2}, {0, 0}, 1.0) / star_pair_kernel(-a, a, {0, 0}, {1, 0.2}, 1.0);
    EXPECT_NEAR(std::abs(ratio - std::exp(complex{0, -a * a * 0.5})), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(braiding_phase(a, -a, {3, 0.1}, {0, 0}, 1.0)), 1.0, 1e-15);
}

TEST(TnKernel, OracleValues)
{
    const double a = half.a();
    const std::vector<SpacetimePoint> p3{{0.1, 0.05}, {-0.3, 0.2}, {0.45, -0.1}};
    const complex k3 = tn_kernel(ChargeList(a, {a, a, -a}), p3, FieldConfiguration::constant(0.3), half);
    EXPECT_NEAR(k3.real(), oracle::tn3_re, 1e-13);
    EXPECT_NEAR(k3.imag(), oracle::tn3_im, 1e-13);
    const std::vector<SpacetimePoint> p4{{0.1, 0.05}, {-0.3, 0.2}, {0.45, -0.1}, {0.02, 0.6}};
    const complex k4 = tn_kernel(ChargeList(a, {a, -a, -a, a}), p4, FieldConfiguration::zero(), half);
    EXPECT_NEAR(k4.real(), oracle::tn4_re, 1e-12);
    EXPECT_NEAR(k4.imag() / oracle::tn4_im, 1.0, 1e-13);
}

TEST(TnKernel, ReducesToSmallerCases)
{
    const double a = half.a();
    const FieldConfiguration phi = FieldConfiguration::plane_wave({2.0, 1.0}, 0.4);
    const std::vector<SpacetimePoint> one{{0.3, 0.1}};
    EXPECT_NEAR(std::abs(tn_kernel(ChargeList(a, {a}), one, phi, half) - std::exp(complex{0, a * phi(one[0])})), 0.0,
                1e-15);
    const std::vector<SpacetimePoint> two{{0.3, 0.1}, {-0.1, 0.9}};
    const SpacetimePoint d = two[0] - two[1];
    const complex want = theta_factor(a, -a, d.t, d.x, 1.0) * std::pow(std::abs(d.t * d.t - d.x * d.x), -0.5);
    EXPECT_NEAR(std::abs(tn_kernel(ChargeList(a, {a, -a}), two, FieldConfiguration::zero(), half) - want), 0.0, 1e-14);
}

TEST(TnKernel, PermutationInvariance)
{
    const double a = half.a();
    const FieldConfiguration phi = FieldConfiguration::gaussian({0, 0}, 0.5, 0.8);
    for (int trial = 0; trial < 1000; ++trial) {
        SampleStream r(5, 2, trial);
        std::vector<SpacetimePoint> pts;
        std::vector<double> q;
        for (int i = 0; i < 4; ++i) {
            pts.push_back({r.uniform() - 0.5, r.uniform() - 0.5});
            q.push_back(r.uniform() < 0.5 ? a : -a);
        }
        std::vector<int> perm{0, 1, 2, 3};
        std::rotate(perm.begin(), perm.begin() + 1 + trial % 3, perm.end());
        std::swap(perm[0], perm[trial % 4]);
        std::vector<SpacetimePoint> pp;
        std::vector<double> qq;
        for (int i : perm) {
            pp.push_back(pts[i]);
            qq.push_back(q[i]);
        }
        const complex x = tn_kernel(ChargeList(a, q), pts, phi, half);
        const complex y = tn_kernel(ChargeList(a, qq), pp, phi, half);
        EXPECT_LE(std::abs(x - y), 1e-12 * std::max(1.0, std::abs(x)));
    }
}

TEST(TnKernel, ErrorsAndStateCorrection)
{
    const double a = half.a();
    const std::vector<SpacetimePoint> cone{{0, 0}, {1, 1}};
    EXPECT_THROW(tn_kernel(ChargeList(a, {a, -a}), cone, FieldConfiguration::zero(), half), OnConeError);
    const std::vector<SpacetimePoint> one{{0, 0}};
    EXPECT_THROW(tn_kernel(ChargeList(a, {a, -a}), one, FieldConfiguration::zero(), half), LengthMismatch);

    const std::vector<SpacetimePoint> two{{0.1, 0.4}, {-0.1, -0.2}};
    const ChargeList q(a, {a, -a});
    const auto none = tn_kernel(q, two, FieldConfiguration::zero(), half, SmoothStateCorrection::none());
    EXPECT_EQ(none, tn_kernel(q, two, FieldConfiguration::zero(), half));
    const auto v = SmoothStateCorrection::constant(0.2);
    // constant v: exponent -hbar (a^2 + a^2)/2 v + hbar a^2 v = 0 for a neutral pair
    EXPECT_NEAR(std::abs(tn_kernel(q, two, FieldConfiguration::zero(), half, v) - none), 0.0, 1e-14);
}

TEST(TwoVertex, MidpointApproximation)
{
    const double a = half.a();
    const auto f = CutoffFunction::bump({0.0, -1.0}, 0.01);
    const auto g = CutoffFunction::bump({0.0, 1.0}, 0.01);
    const complex v = two_vertex_expectation(a, a, f, g, 1.0);
    const double want = std::pow(4.0, 0.5) * f.integral() * g.integral();
    EXPECT_NEAR(v.real() / want, 1.0, 0.01);
    EXPECT_NEAR(v.imag() / want, 0.0, 0.01);

    // exchanging the two vertices is complex conjugation at spacelike separation
    const auto f2 = CutoffFunction::bump({0.3, 0.0}, 0.1);
    const auto g2 = CutoffFunction::bump({-0.3, 0.05}, 0.1);
    const complex xy = two_vertex_expectation(a, -a, f2, g2, 1.0);
    const complex yx = two_vertex_expectation(-a, a, g2, f2, 1.0);
    EXPECT_NEAR(std::abs(xy - std::conj(yx)), 0.0, 1e-3 * std::abs(xy));
}

TEST(Massive, SelectionRule)
{
    const double a = half.a();
    const double hbar = half.hbar();
    EXPECT_EQ(neutrality_exponent(ChargeList(a, {a, -a}), hbar), 0.0);
    EXPECT_NEAR(neutrality_exponent(ChargeList(1.0, {1.0, 1.0}), 4 * pi), 4.0, 1e-15);
    EXPECT_NEAR(neutrality_exponent(ChargeList(a, {a, a, -a}), hbar), 0.5, 1e-15);
    EXPECT_EQ(normal_ordering_factor(a, 1.0, hbar), 1.0);
    EXPECT_NEAR(normal_ordering_factor(a, 0.01, hbar), std::pow(0.01, 0.5), 1e-15);

    const std::vector<SpacetimePoint> pts{{0.05, 0.1}, {-0.1, -0.12}, {0.13, -0.02}};
    const FieldConfiguration zero = FieldConfiguration::zero();
    for (const std::vector<double>& q :
         {std::vector<double>{a}, std::vector<double>{a, a}, std::vector<double>{a, a, -a}}) {
        const ChargeList c(a, q);
        const std::span<const SpacetimePoint> sub(pts.data(), q.size());
        const double slope = mass_scan_slope(c, sub, zero, half, 1e-4, 1e-2);
        EXPECT_NEAR(slope / neutrality_exponent(c, hbar), 1.0, 0.05);
    }

    // neutral pair: finite limit equal to tn_kernel up to a constant factor
    const ChargeList n2(a, {a, -a});
    const std::span<const SpacetimePoint> p2(pts.data(), 2);
    const std::span<const SpacetimePoint> p2b(pts.data() + 1, 2);
    const complex r1 = massive_tn_kernel(n2, p2, zero, half, {1e-6, 1.0}) / tn_kernel(n2, p2, zero, half);
    const complex r2 = massive_tn_kernel(n2, p2b, zero, half, {1e-6, 1.0}) / tn_kernel(n2, p2b, zero, half);
    EXPECT_NEAR(std::abs(r1 / r2 - 1.0), 0.0, 1e-4);
}

TEST(Massive, LogLogSlope)
{
    const std::vector<double> xs{1, 2, 4, 8};
    const std::vector<double> ys{3, 12, 48, 192};
    EXPECT_NEAR(loglog_slope(xs, ys), 2.0, 1e-14);
    EXPECT_THROW(loglog_slope(std::vector<double>{1}, std::vector<double>{1}), LengthMismatch);
}

} // namespace

#include "oracle_values.hpp"
#include "sgpt/lightcone.hpp"
#include "sgpt/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sgpt;

namespace {

std::vector<double> draw(SampleStream& r, std::size_t count, double min_sep)
{
    std::vector<double> out;
    while (out.size() < count) {
        const double x = 2.0 * r.uniform() - 1.0;
        const bool ok = std::all_of(out.begin(), out.end(), [&](double y) { return std::abs(x - y) >= min_sep; });
        if (ok) {
            out.push_back(x);
        }
    }
    return out;
}

TEST(Lightcone, Coordinates)
{
    const std::vector<SpacetimePoint> pts{{1, 1}, {0.3, -0.2}, {-0.5, 0.7}};
    const LightconeCoords lc = to_lightcone(pts, 1);
    EXPECT_EQ(lc.z[0], 0.0);
    EXPECT_EQ(lc.zp[0], 2.0);
    EXPECT_EQ(lc.k(), 1u);
    EXPECT_EQ(lc.n(), 3u);
    const auto back = from_lightcone(lc);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_NEAR(back[i].t, pts[i].t, 1e-15);
        EXPECT_NEAR(back[i].x, pts[i].x, 1e-15);
    }
    EXPECT_THROW(to_lightcone(pts, 4), IndexError);
}

TEST(WFactor, SmallCases)
{
    const std::vector<double> z{0.3};
    const std::vector<double> w{-0.2};
    EXPECT_NEAR(w_factor(z, w, 0.5), std::pow(0.5, -0.5), 1e-15);
    EXPECT_EQ(w_factor(z, w, 0.0), 1.0);
    const std::vector<double> w2{-0.2, 0.7};
    EXPECT_NEAR(w_factor(z, w2, 0.5), oracle::w_minus_n3_k1_beta_half, 1e-14);

    SampleStream r(3, 0, 0);
    const auto zz = draw(r, 3, 1e-3);
    const auto ww = draw(r, 4, 1e-3);
    EXPECT_NEAR(w_factor(zz, ww, 0.4) / w_factor(ww, zz, 0.4), 1.0, 1e-14);
    EXPECT_THROW(w_factor(std::vector<double>{0.1}, std::vector<double>{0.1}, 0.5), CoincidentPointError);
}

TEST(CVMatrix, Layout)
{
    const auto d1 = build_cv_matrix(std::vector<double>{0.3}, std::vector<double>{-0.2});
    EXPECT_EQ(d1.l, 1u);
    EXPECT_DOUBLE_EQ(d1(0, 0), 2.0);
    const auto d2 = build_cv_matrix(std::vector<double>{0.3}, std::vector<double>{-0.2, 0.7});
    EXPECT_EQ(d2(0, 0), 1.0);
    EXPECT_EQ(d2(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(d2(1, 0), 2.0);
    EXPECT_DOUBLE_EQ(d2(1, 1), -2.5);
    const auto d3 = build_cv_matrix(std::vector<double>{0.1, 0.9}, std::vector<double>{-0.4, 0.35});
    EXPECT_DOUBLE_EQ(d3(0, 0), 2.0);
    EXPECT_THROW(build_cv_matrix(std::vector<double>{0.1, 0.2}, std::vector<double>{0.3}), ShapeError);
    EXPECT_THROW(build_cv_matrix(std::vector<double>{0.1}, std::vector<double>{0.1}), CoincidentPointError);
}

TEST(Determinants, OracleValues)
{
    const auto d3 = build_cv_matrix(std::vector<double>{0.3}, std::vector<double>{-0.2, 0.7});
    EXPECT_NEAR(det_exact(d3), oracle::cv_n3_k1, 1e-14);
    EXPECT_NEAR(det_laplace(d3, 1), oracle::cv_n3_k1, 1e-14);

    const std::vector<double> z4{0.1, 0.9};
    const std::vector<double> w4{-0.4, 0.35};
    EXPECT_NEAR(det_exact(build_cv_matrix(z4, w4)), oracle::cauchy_n4_k2, 1e-13);
    EXPECT_NEAR(cauchy_det(z4, w4), oracle::cauchy_n4_k2, 1e-13);
    EXPECT_NEAR(det_laplace(build_cv_matrix(z4, w4), 2), oracle::cauchy_n4_k2, 1e-13);

    const auto d5 = build_cv_matrix(std::vector<double>{0.15}, std::vector<double>{-0.8, -0.3, 0.05, 0.45});
    EXPECT_NEAR(det_exact(d5) / oracle::cv_n5_k1, 1.0, 1e-10);
    EXPECT_NEAR(det_laplace(d5, 1) / oracle::cv_n5_k1, 1.0, 1e-10);
    EXPECT_EQ(column_choices(4, 3).size(), 4u);

    const std::vector<double> z8{-0.61, 0.27};
    const std::vector<double> w8{-0.93, -0.44, -0.05, 0.12, 0.58, 0.81};
    const auto d8 = build_cv_matrix(z8, w8);
    EXPECT_NEAR(det_exact(d8) / oracle::cv_n8_k2, 1.0, 1e-12);
    EXPECT_NEAR(det_laplace(d8, 2) / oracle::cv_n8_k2, 1.0, 1e-12);
    const auto [lhs, rhs] = verify_lemma(z8, w8, 0.5);
    EXPECT_NEAR(lhs / oracle::abs_det_n8_k2_pow_beta, 1.0, 1e-12);
    EXPECT_NEAR(rhs / oracle::w_minus_n8_k2_beta_half, 1.0, 1e-12);

    EXPECT_NEAR(vandermonde_det(std::vector<double>{-0.5, 0.1, 0.4, 1.2}), oracle::vandermonde_4, 1e-15);
}

TEST(Determinants, Structure)
{
    EXPECT_EQ(vandermonde_det(std::vector<double>{0.7}), 1.0);
    EXPECT_EQ(vandermonde_det(std::vector<double>{0.0, 1.0}), 1.0);
    const std::vector<double> u{-0.3, 0.2, 0.5, 0.9};
    std::vector<double> su;
    for (double x : u) {
        su.push_back(1.7 * x);
    }
    EXPECT_NEAR(vandermonde_det(su) / vandermonde_det(u), std::pow(1.7, 6), 1e-12);

    EXPECT_NEAR(cauchy_det(std::vector<double>{0.3}, std::vector<double>{-0.2}), 2.0, 1e-15);
    const std::vector<double> z{0.1, 0.6};
    const std::vector<double> zs{0.6, 0.1};
    const std::vector<double> wt{-0.4, 0.35};
    const double a = 1.0 / (0.1 + 0.4);
    const double b = 1.0 / (0.1 - 0.35);
    const double c = 1.0 / (0.6 + 0.4);
    const double e = 1.0 / (0.6 - 0.35);
    EXPECT_NEAR(cauchy_det(z, wt), a * e - b * c, 1e-13);
    EXPECT_NEAR(cauchy_det(zs, wt), -cauchy_det(z, wt), 1e-13);
    EXPECT_THROW(det_laplace(build_cv_matrix(z, wt), 1), ShapeError);
}

TEST(Lemma, RandomDraws)
{
    for (int n = 2; n <= 8; ++n) {
        for (int k = 1; k <= n - k; ++k) {
            for (int draw_id = 0; draw_id < 20; ++draw_id) {
                SampleStream r(17, n * 16 + k, draw_id);
                const auto all = draw(r, n, 1e-3);
                const std::vector<double> z(all.begin(), all.begin() + k);
                const std::vector<double> w(all.begin() + k, all.end());
                const auto [lhs, rhs] = verify_lemma(z, w, 0.5);
                EXPECT_NEAR(lhs / rhs, 1.0, 1e-8) << "n=" << n << " k=" << k;
                const auto d = build_cv_matrix(z, w);
                EXPECT_NEAR(det_laplace(d, k) / det_exact(d), 1.0, 1e-9) << "n=" << n << " k=" << k;
            }
        }
    }
}

} // namespace

#pragma once

#include "sgpt/bessel.hpp"
#include "sgpt/cutoff.hpp"
#include "sgpt/errors.hpp"
#include "sgpt/field.hpp"
#include "sgpt/model.hpp"
#include "sgpt/propagators.hpp"
#include "sgpt/quadrature.hpp"
#include "sgpt/spacetime.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace sgpt {

namespace detail {

inline const complex I{0.0, 1.0};

/// Which two-point function a pair exponent uses.
enum class PairKind { Feynman, AntiFeynman, TwoPoint };

/// log of exp(-ai aj hbar K(d)) for the massless K of the given kind.
/// Returns false on the cone (d null), leaving `out` untouched.
inline bool pair_log(PairKind kind, double aiaj, SpacetimePoint d, double hbar, complex& out) noexcept
{
    const double u = d.u();
    const double v = d.v();
    if (u == 0.0 || v == 0.0) {
        return false;
    }
    const double re = aiaj * hbar * inv_4pi * (std::log(std::abs(u)) + std::log(std::abs(v)));
    double im = 0.0;
    if (u * v > 0.0) {
        // timelike: i Delta^D = -i/4 on both cones; (i/2) Delta = -+ i/4 future / past
        const double quarter = 0.25 * aiaj * hbar;
        switch (kind) {
        case PairKind::Feynman: im = quarter; break;
        case PairKind::AntiFeynman: im = -quarter; break;
        case PairKind::TwoPoint: im = d.t > 0.0 ? quarter : -quarter; break;
        }
    }
    out = {re, im};
    return true;
}

inline void require_same_length(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw LengthMismatch(std::string(what) + ": " + std::to_string(a) + " charges but " +
                             std::to_string(b) + " points");
    }
}

/// Sum of pair logs over i < j; false if any pair is null separated.
inline bool product_log(PairKind kind, std::span<const double> charges, std::span<const SpacetimePoint> pts,
                        double hbar, complex& out) noexcept
{
    complex sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            complex term;
            if (!pair_log(kind, charges[i] * charges[j], pts[i] - pts[j], hbar, term)) {
                return false;
            }
            sum += term;
        }
    }
    out = sum;
    return true;
}

inline double phase_sum(std::span<const double> charges, std::span<const SpacetimePoint> pts,
                        const FieldConfiguration& phi) noexcept
{
    if (phi.is_zero()) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s += charges[i] * phi(pts[i]);
    }
    return s;
}

} // namespace detail

/// theta(tau + |zeta|) - theta(tau - |zeta|) + (theta(tau - |zeta|) + theta(-tau - |zeta|)) e^{i ai aj hbar / 4}
inline complex theta_factor(double ai, double aj, double tau, double zeta, double hbar)
{
    require_off_cone({tau, zeta}, "theta_factor");
    const double az = std::abs(zeta);
    const double fut = heaviside(tau - az);
    const double pst = heaviside(-tau - az);
    const complex phase = std::exp(detail::I * (ai * aj * hbar * 0.25));
    return heaviside(tau + az) - fut + (fut + pst) * phase;
}

/// exp(-ai aj hbar Delta^F(x - y)) = theta_factor * |tau^2 - zeta^2|^{hbar ai aj / 4pi}
inline complex pair_feynman_kernel(double ai, double aj, SpacetimePoint x, SpacetimePoint y, double hbar)
{
    const SpacetimePoint d = x - y;
    require_off_cone(d, "pair_feynman_kernel");
    const double power = std::exp(ai * aj * hbar * detail::inv_4pi *
                                  (std::log(std::abs(d.u())) + std::log(std::abs(d.v()))));
    return theta_factor(ai, aj, d.t, d.x, hbar) * power;
}

/// exp(-ai aj hbar W(x - y)), the pair factor of the star product V_ai(x) * V_aj(y).
inline complex star_pair_kernel(double ai, double aj, SpacetimePoint x, SpacetimePoint y, double hbar)
{
    complex lg;
    if (!detail::pair_log(detail::PairKind::TwoPoint, ai * aj, x - y, hbar, lg)) {
        throw OnConeError("star_pair_kernel: x - y lies on the light cone");
    }
    return std::exp(lg);
}

/// exp(-i ai aj hbar Delta(x - y)): 1 at spacelike separation, e^{+-i ai aj hbar/2}
/// when x lies in the future (past) of y.
inline complex braiding_phase(double ai, double aj, SpacetimePoint x, SpacetimePoint y, double hbar)
{
    const SpacetimePoint d = x - y;
    const double delta = eval(PropagatorKind::Causal, d).real();
    return std::exp(-detail::I * (ai * aj * hbar * delta));
}

/// Kernel of T_n(V_a1 ... V_an) evaluated at phi:
/// e^{i sum ai phi(xi)} prod_{i<j} theta_{ai aj}(tau_ij, zeta_ij) |tau_ij^2 - zeta_ij^2|^{hbar ai aj / 4pi}
inline complex tn_kernel(const ChargeList& charges, std::span<const SpacetimePoint> points,
                         const FieldConfiguration& phi, const ModelParams& params)
{
    detail::require_same_length(charges.size(), points.size(), "tn_kernel");
    complex lg;
    if (!detail::product_log(detail::PairKind::Feynman, charges.values(), points, params.hbar(), lg)) {
        throw OnConeError("tn_kernel: two points are light-like separated");
    }
    lg += detail::I * detail::phase_sum(charges.values(), points, phi);
    return std::exp(lg);
}

/// Same kernel for the normal ordering of the Hadamard state W_v = W + v:
/// each pair gains exp(-hbar ai aj v(xi, xj)) and each vertex exp(-hbar ai^2 v(xi, xi) / 2).
inline complex tn_kernel(const ChargeList& charges, std::span<const SpacetimePoint> points,
                         const FieldConfiguration& phi, const ModelParams& params,
                         const SmoothStateCorrection& corr)
{
    complex value = tn_kernel(charges, points, phi, params);
    if (corr.is_none()) {
        return value;
    }
    double expo = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        expo -= 0.5 * params.hbar() * charges[i] * charges[i] * corr(points[i], points[i]);
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            expo -= params.hbar() * charges[i] * charges[j] * corr(points[i], points[j]);
        }
    }
    return value * std::exp(expo);
}

/// Node counts of the tensor rule behind two_vertex_expectation. The x
/// direction uses one node more than t so that no node pair sits on the cone
/// for symmetric supports.
struct TensorQuadrature {
    int nodes = 12;
    double rel_tol = 1e-3;
};

/// int int exp(-ai aj (hbar W(x - y) + hbar v(x, y))) f~(x) g~(y) dx dy,
/// f~ = exp(-hbar ai^2 v(x, x)/2) f and likewise for g. Computed at N and 2N
/// nodes per axis; the difference is the error estimate.
inline complex two_vertex_expectation(double ai, double aj, const CutoffFunction& f, const CutoffFunction& g,
                                      double hbar, const SmoothStateCorrection& corr = SmoothStateCorrection::none(),
                                      TensorQuadrature quad = {})
{
    auto run = [&](int n) {
        const QuadratureRule ft = gauss_legendre(n, f.t_min(), f.t_max());
        const QuadratureRule fx = gauss_legendre(n + 1, f.x_min(), f.x_max());
        const QuadratureRule gt = gauss_legendre(n + 2, g.t_min(), g.t_max());
        const QuadratureRule gx = gauss_legendre(n + 3, g.x_min(), g.x_max());
        complex total = 0.0;
        for (std::size_t a = 0; a < ft.size(); ++a) {
            for (std::size_t b = 0; b < fx.size(); ++b) {
                const SpacetimePoint x{ft.nodes[a], fx.nodes[b]};
                double wx = ft.weights[a] * fx.weights[b] * f(x);
                if (wx == 0.0) {
                    continue;
                }
                wx *= std::exp(-0.5 * hbar * ai * ai * corr(x, x));
                for (std::size_t c = 0; c < gt.size(); ++c) {
                    for (std::size_t e = 0; e < gx.size(); ++e) {
                        const SpacetimePoint y{gt.nodes[c], gx.nodes[e]};
                        double wy = gt.weights[c] * gx.weights[e] * g(y);
                        if (wy == 0.0) {
                            continue;
                        }
                        wy *= std::exp(-0.5 * hbar * aj * aj * corr(y, y));
                        complex lg;
                        if (!detail::pair_log(detail::PairKind::TwoPoint, ai * aj, x - y, hbar, lg)) {
                            continue;
                        }
                        total += wx * wy * std::exp(lg - hbar * ai * aj * corr(x, y));
                    }
                }
            }
        }
        return total;
    };
    const complex coarse = run(quad.nodes);
    const complex fine = run(2 * quad.nodes);
    const double err = std::abs(fine - coarse);
    if (err > quad.rel_tol * std::max(std::abs(fine), 1e-300)) {
        throw QuadratureFailure("two_vertex_expectation: error estimate " + std::to_string(err) +
                                " exceeds tolerance");
    }
    return fine;
}

/// Massive kernel with the modified normal ordering:
/// e^{i sum ai phi(xi)} m^{(hbar/4pi) sum ai^2} exp(-(hbar/2pi) sum_{i<j} ai aj K0(m z_ij)),
/// z_ij on the Feynman branch.
inline complex massive_tn_kernel(const ChargeList& charges, std::span<const SpacetimePoint> points,
                                 const FieldConfiguration& phi, const ModelParams& params, const MassiveParams& mp)
{
    detail::require_same_length(charges.size(), points.size(), "massive_tn_kernel");
    mp.validate();
    if (!(mp.m > 0.0)) {
        throw DomainError("massive_tn_kernel: mass must be > 0");
    }
    const double hbar = params.hbar();
    complex lg = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sq += charges[i] * charges[i];
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const SpacetimePoint d = points[i] - points[j];
            require_off_cone(d, "massive_tn_kernel");
            lg -= hbar * charges[i] * charges[j] * bessel_k0(mp.m * feynman_branch(d)) /
                  (2.0 * std::numbers::pi);
        }
    }
    lg += hbar * detail::inv_4pi * sq * std::log(mp.m);
    lg += detail::I * detail::phase_sum(charges.values(), points, phi);
    return std::exp(lg);
}

/// (sum ai)^2 hbar / 4pi: the power of m with which a sector vanishes as m -> 0.
inline double neutrality_exponent(const ChargeList& charges, double hbar) noexcept
{
    const double q = charges.total();
    return q * q * hbar * detail::inv_4pi;
}

/// m^{hbar ai^2 / 4pi}
inline double normal_ordering_factor(double ai, double m, double hbar)
{
    if (!(m > 0.0)) {
        throw DomainError("normal_ordering_factor: mass must be > 0");
    }
    return std::pow(m, hbar * ai * ai * detail::inv_4pi);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw LengthMismatch("loglog_slope: need two equally long samples of size >= 2");
    }
    double mx = 0.0;
    double my = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxy += dx * (std::log(ys[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

/// Fitted exponent of |massive_tn_kernel| in m over log-spaced masses in [m_lo, m_hi].
inline double mass_scan_slope(const ChargeList& charges, std::span<const SpacetimePoint> points,
                              const FieldConfiguration& phi, const ModelParams& params, double m_lo, double m_hi,
                              int steps = 9, double mu = 1.0)
{
    if (!(m_lo > 0.0) || !(m_hi > m_lo) || steps < 2) {
        throw DomainError("mass_scan_slope: need 0 < m_lo < m_hi and at least two steps");
    }
    std::vector<double> ms;
    std::vector<double> vals;
    for (int i = 0; i < steps; ++i) {
        const double m = m_lo * std::pow(m_hi / m_lo, static_cast<double>(i) / (steps - 1));
        ms.push_back(m);
        vals.push_back(std::abs(massive_tn_kernel(charges, points, phi, params, {m, mu})));
    }
    return loglog_slope(ms, vals);
}

} // namespace sgpt

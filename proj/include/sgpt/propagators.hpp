#pragma once

#include "sgpt/bessel.hpp"
#include "sgpt/errors.hpp"
#include "sgpt/spacetime.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

namespace sgpt {

enum class PropagatorKind {
    Retarded,
    Advanced,
    Causal,
    Dirac,
    HadamardH,
    TwoPointW,
    Feynman,
    AntiFeynman,
};

inline constexpr std::string_view to_string(PropagatorKind kind) noexcept
{
    switch (kind) {
    case PropagatorKind::Retarded: return "retarded";
    case PropagatorKind::Advanced: return "advanced";
    case PropagatorKind::Causal: return "causal";
    case PropagatorKind::Dirac: return "dirac";
    case PropagatorKind::HadamardH: return "hadamard";
    case PropagatorKind::TwoPointW: return "two-point";
    case PropagatorKind::Feynman: return "feynman";
    case PropagatorKind::AntiFeynman: return "anti-feynman";
    }
    return "?";
}

inline PropagatorKind propagator_kind_from_string(std::string_view name)
{
    for (auto kind : {PropagatorKind::Retarded, PropagatorKind::Advanced, PropagatorKind::Causal,
                      PropagatorKind::Dirac, PropagatorKind::HadamardH, PropagatorKind::TwoPointW,
                      PropagatorKind::Feynman, PropagatorKind::AntiFeynman}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw DomainError("unknown propagator kind '" + std::string(name) + "'");
}

/// Auxiliary mass m >= 0 and the scale mu > 0 of the modified propagator.
struct MassiveParams {
    double m = 0.0;
    double mu = 1.0;

    void validate() const
    {
        if (!(m >= 0.0)) {
            throw DomainError("mass must be >= 0");
        }
        if (!(mu > 0.0)) {
            throw DomainError("mu must be > 0");
        }
    }
};

inline void require_off_cone(SpacetimePoint pt, const char* what)
{
    if (pt.on_cone()) {
        throw OnConeError(std::string(what) + ": point lies on the light cone");
    }
}

namespace detail {

constexpr double inv_4pi = 0.25 / std::numbers::pi;

// theta(t - |x|) and theta(-t - |x|)
inline double theta_future(SpacetimePoint pt) noexcept { return heaviside(pt.t - std::abs(pt.x)); }
inline double theta_past(SpacetimePoint pt) noexcept { return heaviside(-pt.t - std::abs(pt.x)); }

} // namespace detail

/// H = -(1/4pi) ln|t^2 - x^2|, using ln|u| + ln|v| to keep precision near the cone.
inline double hadamard(SpacetimePoint pt)
{
    require_off_cone(pt, "hadamard");
    return -detail::inv_4pi * (std::log(std::abs(pt.u())) + std::log(std::abs(pt.v())));
}

/// Pointwise value of a massless propagator off the null cone.
inline complex eval(PropagatorKind kind, SpacetimePoint pt)
{
    require_off_cone(pt, "eval");
    const double ret = -0.5 * detail::theta_future(pt);
    const double adv = -0.5 * detail::theta_past(pt);
    switch (kind) {
    case PropagatorKind::Retarded: return ret;
    case PropagatorKind::Advanced: return adv;
    case PropagatorKind::Causal: return ret - adv;
    case PropagatorKind::Dirac: return 0.5 * (ret + adv);
    case PropagatorKind::HadamardH: return hadamard(pt);
    case PropagatorKind::TwoPointW: return {hadamard(pt), 0.5 * (ret - adv)};
    case PropagatorKind::Feynman: return {hadamard(pt), 0.5 * (ret + adv)};
    case PropagatorKind::AntiFeynman: return {hadamard(pt), -0.5 * (ret + adv)};
    }
    return 0.0;
}

/// Delta^n via theta idempotency: (-1/2)^n theta(t-|x|) + (1/2)^n theta(-t-|x|).
/// n = 0 is the constant 1.
inline double causal_power(SpacetimePoint pt, int n)
{
    require_off_cone(pt, "causal_power");
    if (n < 0) {
        throw DomainError("causal_power: n must be >= 0");
    }
    if (n == 0) {
        return 1.0;
    }
    return std::pow(-0.5, n) * detail::theta_future(pt) + std::pow(0.5, n) * detail::theta_past(pt);
}

/// W^n as the binomial sum in powers of H; a zeroth power of the theta
/// combination is 1, so the k = n term is H^n everywhere.
inline complex w_power(SpacetimePoint pt, int n)
{
    require_off_cone(pt, "w_power");
    if (n < 0) {
        throw DomainError("w_power: n must be >= 0");
    }
    const double h = hadamard(pt);
    const double fut = detail::theta_future(pt);
    const double pst = detail::theta_past(pt);
    const complex step{0.0, -0.25};
    complex sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        const int j = n - k;
        const double thetas = j == 0 ? 1.0 : fut + (j % 2 == 0 ? 1.0 : -1.0) * pst;
        sum += binom * std::pow(step, j) * thetas * std::pow(h, k);
        binom = binom * (n - k) / (k + 1);
    }
    return sum;
}

/// (2^n Delta^D(x)^n, theta(t) Delta(x)^n + theta(-t) Delta(-x)^n).
inline std::pair<double, double> dirac_power_pair(SpacetimePoint pt, int n)
{
    require_off_cone(pt, "dirac_power_pair");
    if (pt.t == 0.0) {
        throw DomainError("dirac_power_pair: t must be nonzero");
    }
    if (n < 0) {
        throw DomainError("dirac_power_pair: n must be >= 0");
    }
    const double dirac = eval(PropagatorKind::Dirac, pt).real();
    const double lhs = std::pow(2.0 * dirac, n);
    const double fwd = std::pow(eval(PropagatorKind::Causal, pt).real(), n);
    const double bwd = std::pow(eval(PropagatorKind::Causal, -pt).real(), n);
    const double rhs = heaviside(pt.t) * fwd + heaviside(-pt.t) * bwd;
    return {lhs, rhs};
}

/// Branch convention for the massive kernels: z = sqrt(-s + i0 * sign) with
/// s = t^2 - x^2, continued from the spacelike axis (z > 0) through the upper
/// half plane. Feynman ordering uses sign = +1, giving z = i sqrt(s) on both
/// timelike cones; the two-point function uses sign = sgn(t).
inline complex feynman_branch(SpacetimePoint pt)
{
    const double s = pt.interval();
    if (s < 0.0) {
        return {std::sqrt(-s), 0.0};
    }
    return {0.0, std::sqrt(s)};
}

inline complex two_point_branch(SpacetimePoint pt)
{
    const double s = pt.interval();
    if (s < 0.0) {
        return {std::sqrt(-s), 0.0};
    }
    return {0.0, pt.t > 0.0 ? std::sqrt(s) : -std::sqrt(s)};
}

namespace detail {

inline void require_positive_mass(const MassiveParams& mp, const char* what)
{
    mp.validate();
    if (!(mp.m > 0.0)) {
        throw DomainError(std::string(what) + ": mass must be > 0");
    }
}

inline complex modified_kernel(const MassiveParams& mp, complex z)
{
    const complex mz = mp.m * z;
    return (bessel_k0(mz) + std::log(mp.m / mp.mu) * bessel_i0(mz)) / (2.0 * std::numbers::pi);
}

} // namespace detail

/// (1/2pi) K0(m z), z on the Feynman branch.
inline complex massive_feynman(const MassiveParams& mp, SpacetimePoint pt)
{
    require_off_cone(pt, "massive_feynman");
    detail::require_positive_mass(mp, "massive_feynman");
    return bessel_k0(mp.m * feynman_branch(pt)) / (2.0 * std::numbers::pi);
}

/// (1/2pi) K0(m z) with z on the two-point branch.
inline complex massive_two_point(const MassiveParams& mp, SpacetimePoint pt)
{
    require_off_cone(pt, "massive_two_point");
    detail::require_positive_mass(mp, "massive_two_point");
    return bessel_k0(mp.m * two_point_branch(pt)) / (2.0 * std::numbers::pi);
}

/// Additive constant relating the m -> 0 limit of the modified propagator to
/// the massless Feynman propagator: limit = Delta^F + this.
inline double massless_limit_constant(double mu)
{
    return -(std::log(mu / 2.0) + detail::euler_gamma) / (2.0 * std::numbers::pi);
}

/// (1/2pi)(K0(m z) + ln(m/mu) I0(m z)); finite for every m >= 0.
inline complex massive_feynman_modified(const MassiveParams& mp, SpacetimePoint pt)
{
    require_off_cone(pt, "massive_feynman_modified");
    mp.validate();
    if (mp.m == 0.0) {
        return eval(PropagatorKind::Feynman, pt) + massless_limit_constant(mp.mu);
    }
    return detail::modified_kernel(mp, feynman_branch(pt));
}

inline complex massive_two_point_modified(const MassiveParams& mp, SpacetimePoint pt)
{
    require_off_cone(pt, "massive_two_point_modified");
    mp.validate();
    if (mp.m == 0.0) {
        return eval(PropagatorKind::TwoPointW, pt) + massless_limit_constant(mp.mu);
    }
    return detail::modified_kernel(mp, two_point_branch(pt));
}

} // namespace sgpt

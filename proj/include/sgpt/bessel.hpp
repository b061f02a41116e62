#pragma once

#include "sgpt/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace sgpt {

using complex = std::complex<double>;

namespace detail {

inline constexpr double euler_gamma = std::numbers::egamma;

/// sum_k (z^2/4)^k / (k!)^2 * weight(k), weight(0) term included by caller.
template <class Weight>
complex bessel_power_series(complex z, Weight weight)
{
    const complex q = z * z * 0.25;
    complex term = 1.0;
    complex sum = weight(0) * term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        const complex add = weight(k) * term;
        sum += add;
        if (std::abs(term) < 1e-18 * std::abs(sum) && std::abs(add) < 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

// K0(z) = sqrt(2/z) e^{-z} int_0^inf exp(-v^2) (1 + v^2/(2z))^{-1/2} dv, |arg z| < pi.
// The integrand is analytic in a strip around the real axis whose half-width
// is at least 0.76 for |z| >= 2, |arg z| <= 3pi/4, so the trapezoidal rule
// converges geometrically.
inline complex bessel_k0_integral(complex z)
{
    constexpr double h = 0.0625;
    const complex inv2z = 1.0 / (2.0 * z);
    complex sum = 0.5;
    for (int j = 1;; ++j) {
        const double v = h * j;
        const double w = std::exp(-v * v);
        if (w < 1e-20) {
            break;
        }
        sum += w / std::sqrt(1.0 + v * v * inv2z);
    }
    return std::sqrt(2.0 / z) * std::exp(-z) * (h * sum);
}

} // namespace detail

/// Modified Bessel function I0 by its power series.
inline complex bessel_i0(complex z)
{
    if (std::abs(z) > 500.0) {
        throw DomainError("bessel_i0: |z| > 500 is outside the supported range");
    }
    return detail::bessel_power_series(z, [](int) { return 1.0; });
}

/// Modified Bessel function K0, principal branch (cut along the negative real axis).
///
/// |z| <= 2 uses the logarithmic power series; larger arguments off the
/// negative real axis use a trapezoidal Laplace-type integral.
inline complex bessel_k0(complex z)
{
    if (z == complex{0.0, 0.0}) {
        throw DomainError("bessel_k0: K0 is singular at z = 0");
    }
    const double r = std::abs(z);
    if (r > 2.0 && std::abs(std::arg(z)) <= 0.75 * std::numbers::pi) {
        return detail::bessel_k0_integral(z);
    }
    if (r > 500.0) {
        throw DomainError("bessel_k0: |z| > 500 is outside the supported range");
    }
    // K0 = -(ln(z/2) + gamma) I0(z) + sum_{k>=1} H_k (z^2/4)^k / (k!)^2
    double harmonic = 0.0;
    int last = 0;
    const complex tail = detail::bessel_power_series(z, [&](int k) {
        while (last < k) {
            ++last;
            harmonic += 1.0 / last;
        }
        return k == 0 ? 0.0 : harmonic;
    });
    return -(std::log(z * 0.5) + detail::euler_gamma) * bessel_i0(z) + tail;
}

} // namespace sgpt

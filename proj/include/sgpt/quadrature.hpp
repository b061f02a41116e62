#pragma once

#include "sgpt/errors.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace sgpt {

/// Nodes and weights of a one-dimensional rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }

    template <class F>
    auto integrate(F&& f) const
    {
        decltype(f(0.0)) sum{};
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            sum += weights[i] * f(nodes[i]);
        }
        return sum;
    }
};

/// n-point Gauss-Legendre rule on [a, b].
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0)
{
    if (n < 1) {
        throw DomainError("gauss_legendre: need at least one node");
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = mid - half * z;
        rule.nodes[n - 1 - i] = mid + half * z;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

/// Composite Gauss-Legendre rule on [a, b] graded geometrically towards `a`,
/// for integrands with an integrable (logarithmic or weak power) singularity
/// at that endpoint. Pass a > b to grade towards the upper limit of [b, a].
inline QuadratureRule graded_rule(double a, double b, int levels = 24, int points = 10,
                                  double ratio = 0.25)
{
    QuadratureRule out;
    const double len = b - a;
    const QuadratureRule base = gauss_legendre(points, 0.0, 1.0);
    auto add = [&](double lo, double hi) {
        // lo, hi are fractions of len measured from a
        for (std::size_t i = 0; i < base.size(); ++i) {
            out.nodes.push_back(a + len * (lo + (hi - lo) * base.nodes[i]));
            out.weights.push_back(std::abs(len) * (hi - lo) * base.weights[i]);
        }
    };
    double hi = 1.0;
    for (int j = 0; j < levels; ++j) {
        const double lo = hi * ratio;
        add(lo, hi);
        hi = lo;
    }
    add(0.0, hi);
    return out;
}

/// Tanh-sinh (double exponential) rule on [a, b] with step h in the
/// transformed variable, truncated at |t| <= t_max. Handles integrable
/// endpoint singularities and integrands that are flat at the ends. Nodes
/// near either end are placed relative to that end, so they resolve
/// singularities at a or b in full precision.
inline QuadratureRule tanh_sinh(double a, double b, double h = 1.0 / 16.0, double t_max = 3.5)
{
    QuadratureRule out;
    const double len = b - a;
    const double half_pi = 0.5 * std::numbers::pi;
    const int K = static_cast<int>(std::ceil(t_max / h));
    for (int k = -K; k <= K; ++k) {
        const double t = k * h;
        const double s = half_pi * std::sinh(t);
        // p = (1 + tanh s) / 2 measured from a, q = 1 - p measured from b
        const double p = 1.0 / (1.0 + std::exp(-2.0 * s));
        const double q = 1.0 / (1.0 + std::exp(2.0 * s));
        if (p == 0.0 || q == 0.0) {
            continue;
        }
        const double cs = std::cosh(s);
        const double w = 0.5 * len * h * half_pi * std::cosh(t) / (cs * cs);
        if (w == 0.0) {
            continue;
        }
        out.nodes.push_back(p <= q ? a + len * p : b - len * q);
        out.weights.push_back(std::abs(w));
    }
    return out;
}

} // namespace sgpt

#pragma once

#include <cmath>
#include <compare>

namespace sgpt {

/// Point (or difference vector) of two-dimensional Minkowski space,
/// metric diag(1, -1), lengths in units where the scale Lambda = 1.
struct SpacetimePoint {
    double t = 0.0;
    double x = 0.0;

    constexpr double u() const noexcept { return t - x; }
    constexpr double v() const noexcept { return t + x; }
    /// Squared interval t^2 - x^2, computed as u*v.
    constexpr double interval() const noexcept { return u() * v(); }

    bool on_cone() const noexcept { return std::abs(t) == std::abs(x); }
    bool timelike() const noexcept { return std::abs(t) > std::abs(x); }
    bool future() const noexcept { return t > std::abs(x); }
    bool past() const noexcept { return -t > std::abs(x); }

    friend constexpr SpacetimePoint operator-(SpacetimePoint a, SpacetimePoint b) noexcept
    {
        return {a.t - b.t, a.x - b.x};
    }
    friend constexpr SpacetimePoint operator+(SpacetimePoint a, SpacetimePoint b) noexcept
    {
        return {a.t + b.t, a.x + b.x};
    }
    friend constexpr SpacetimePoint operator-(SpacetimePoint a) noexcept { return {-a.t, -a.x}; }
    friend constexpr bool operator==(SpacetimePoint, SpacetimePoint) = default;
};

/// Heaviside step with the value at 0 irrelevant for off-cone use.
constexpr double heaviside(double s) noexcept { return s > 0.0 ? 1.0 : 0.0; }

} // namespace sgpt

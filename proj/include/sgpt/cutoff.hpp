#pragma once

#include "sgpt/errors.hpp"
#include "sgpt/quadrature.hpp"
#include "sgpt/spacetime.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace sgpt {

/// Smooth test function supported in the box |t - t0| <= r, |x - x0| <= r.
///
/// bump:          A * b(u) b(y) with b(s) = exp(1 - 1/(1 - s^2)), u = (t - t0)/r
/// mollified-box: A * S(u) S(y), equal to 1 for |s| <= 1/2 and falling
///                smoothly to 0 at |s| = 1
class CutoffFunction {
public:
    enum class Kind { Bump, MollifiedBox };

    CutoffFunction(Kind kind, SpacetimePoint center, double radius, double amplitude = 1.0)
        : kind_(kind), center_(center), radius_(radius), amplitude_(amplitude)
    {
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw ParameterError("cutoff radius must be > 0");
        }
        if (!std::isfinite(amplitude)) {
            throw ParameterError("cutoff amplitude must be finite");
        }
    }

    static CutoffFunction bump(SpacetimePoint center, double radius, double amplitude = 1.0)
    {
        return CutoffFunction(Kind::Bump, center, radius, amplitude);
    }

    static CutoffFunction mollified_box(SpacetimePoint center, double radius, double amplitude = 1.0)
    {
        return CutoffFunction(Kind::MollifiedBox, center, radius, amplitude);
    }

    Kind kind() const noexcept { return kind_; }
    SpacetimePoint center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    double amplitude() const noexcept { return amplitude_; }
    /// sup |g|
    double sup_norm() const noexcept { return std::abs(amplitude_); }
    /// Area of the support box.
    double box_volume() const noexcept { return 4.0 * radius_ * radius_; }

    double t_min() const noexcept { return center_.t - radius_; }
    double t_max() const noexcept { return center_.t + radius_; }
    double x_min() const noexcept { return center_.x - radius_; }
    double x_max() const noexcept { return center_.x + radius_; }

    bool in_support(SpacetimePoint p) const noexcept
    {
        return std::abs(p.t - center_.t) < radius_ && std::abs(p.x - center_.x) < radius_;
    }

    CutoffFunction scaled(double factor) const { return CutoffFunction(kind_, center_, radius_, amplitude_ * factor); }

    double operator()(SpacetimePoint p) const noexcept
    {
        const double u = (p.t - center_.t) / radius_;
        const double y = (p.x - center_.x) / radius_;
        return amplitude_ * profile(u) * profile(y);
    }

    /// dg / dx^mu; mu = 0 is time, mu = 1 is space.
    double gradient(int mu, SpacetimePoint p) const noexcept
    {
        const double u = (p.t - center_.t) / radius_;
        const double y = (p.x - center_.x) / radius_;
        if (mu == 0) {
            return amplitude_ * profile_derivative(u) * profile(y) / radius_;
        }
        return amplitude_ * profile(u) * profile_derivative(y) / radius_;
    }

    /// int g over R^2 (separable profile; tanh-sinh copes with the flat edges).
    double integral() const
    {
        const QuadratureRule rule = tanh_sinh(-1.0, 1.0, 1.0 / 32.0);
        const double one_d = rule.integrate([&](double s) { return profile(s); });
        return amplitude_ * one_d * one_d * radius_ * radius_;
    }

    friend bool operator==(const CutoffFunction&, const CutoffFunction&) = default;

private:
    static double smooth_step(double y) noexcept
    {
        // 0 for y <= 0, 1 for y >= 1
        if (y <= 0.0) {
            return 0.0;
        }
        if (y >= 1.0) {
            return 1.0;
        }
        const double a = std::exp(-1.0 / y);
        const double b = std::exp(-1.0 / (1.0 - y));
        return a / (a + b);
    }

    static double smooth_step_derivative(double y) noexcept
    {
        if (y <= 0.0 || y >= 1.0) {
            return 0.0;
        }
        const double a = std::exp(-1.0 / y);
        const double b = std::exp(-1.0 / (1.0 - y));
        const double s = a + b;
        return a * b * (1.0 / (y * y) + 1.0 / ((1.0 - y) * (1.0 - y))) / (s * s);
    }

    double profile(double s) const noexcept
    {
        const double as = std::abs(s);
        if (as >= 1.0) {
            return 0.0;
        }
        if (kind_ == Kind::Bump) {
            return std::exp(1.0 - 1.0 / (1.0 - s * s));
        }
        return smooth_step(2.0 * (1.0 - as));
    }

    double profile_derivative(double s) const noexcept
    {
        const double as = std::abs(s);
        if (as >= 1.0) {
            return 0.0;
        }
        if (kind_ == Kind::Bump) {
            const double d = 1.0 - s * s;
            return std::exp(1.0 - 1.0 / d) * (-2.0 * s / (d * d));
        }
        const double sign = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
        return -2.0 * sign * smooth_step_derivative(2.0 * (1.0 - as));
    }

    Kind kind_;
    SpacetimePoint center_;
    double radius_;
    double amplitude_;
};

inline std::string_view to_string(CutoffFunction::Kind kind) noexcept
{
    return kind == CutoffFunction::Kind::Bump ? "bump" : "mollified-box";
}

inline CutoffFunction::Kind cutoff_kind_from_string(std::string_view name)
{
    if (name == "bump") {
        return CutoffFunction::Kind::Bump;
    }
    if (name == "mollified-box") {
        return CutoffFunction::Kind::MollifiedBox;
    }
    throw ParameterError("unknown cutoff kind '" + std::string(name) + "'");
}

} // namespace sgpt

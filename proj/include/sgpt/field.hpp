#pragma once

#include "sgpt/errors.hpp"
#include "sgpt/spacetime.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace sgpt {

/// Background configuration phi at which functionals are evaluated
/// (coherent-state picture). A configuration is a finite sum of profiles so
/// that perturbed configurations phi + eps * psi stay representable.
class FieldConfiguration {
public:
    enum class Kind { Zero, Constant, Gaussian, PlaneWave };

    struct Profile {
        Kind kind = Kind::Zero;
        double amplitude = 0.0;
        SpacetimePoint center{};
        double width = 1.0;
        std::array<double, 2> k{0.0, 0.0};

        friend bool operator==(const Profile&, const Profile&) = default;
    };

    FieldConfiguration() = default;

    static FieldConfiguration zero() { return {}; }

    static FieldConfiguration constant(double c)
    {
        return FieldConfiguration(Profile{Kind::Constant, c, {}, 1.0, {0.0, 0.0}});
    }

    static FieldConfiguration gaussian(SpacetimePoint center, double width, double amplitude)
    {
        if (!(width > 0.0)) {
            throw ParameterError("gaussian field: width must be > 0");
        }
        return FieldConfiguration(Profile{Kind::Gaussian, amplitude, center, width, {0.0, 0.0}});
    }

    /// amplitude * cos(k0 t - k1 x)
    static FieldConfiguration plane_wave(std::array<double, 2> k, double amplitude)
    {
        return FieldConfiguration(Profile{Kind::PlaneWave, amplitude, {}, 1.0, k});
    }

    /// this + scale * other
    FieldConfiguration plus(const FieldConfiguration& other, double scale = 1.0) const
    {
        FieldConfiguration out = *this;
        for (Profile p : other.profiles_) {
            p.amplitude *= scale;
            out.profiles_.push_back(p);
        }
        return out;
    }

    /// Kind of the leading profile; Zero for the empty configuration.
    Kind kind() const noexcept { return profiles_.empty() ? Kind::Zero : profiles_.front().kind; }
    const std::vector<Profile>& profiles() const noexcept { return profiles_; }

    bool is_zero() const noexcept
    {
        for (const auto& p : profiles_) {
            if (p.kind != Kind::Zero && p.amplitude != 0.0) {
                return false;
            }
        }
        return true;
    }

    double operator()(SpacetimePoint x) const noexcept
    {
        double sum = 0.0;
        for (const auto& p : profiles_) {
            sum += value(p, x);
        }
        return sum;
    }

    /// d phi / d x^mu, mu = 0 (time) or 1 (space).
    double derivative(int mu, SpacetimePoint x) const noexcept
    {
        double sum = 0.0;
        for (const auto& p : profiles_) {
            sum += derivative(p, mu, x);
        }
        return sum;
    }

    friend bool operator==(const FieldConfiguration&, const FieldConfiguration&) = default;

private:
    explicit FieldConfiguration(Profile p) { profiles_.push_back(p); }

    static double gauss(const Profile& p, SpacetimePoint x) noexcept
    {
        const double dt = x.t - p.center.t;
        const double dx = x.x - p.center.x;
        return std::exp(-(dt * dt + dx * dx) / (2.0 * p.width * p.width));
    }

    static double value(const Profile& p, SpacetimePoint x) noexcept
    {
        switch (p.kind) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return p.amplitude;
        case Kind::Gaussian: return p.amplitude * gauss(p, x);
        case Kind::PlaneWave: return p.amplitude * std::cos(p.k[0] * x.t - p.k[1] * x.x);
        }
        return 0.0;
    }

    static double derivative(const Profile& p, int mu, SpacetimePoint x) noexcept
    {
        switch (p.kind) {
        case Kind::Zero:
        case Kind::Constant: return 0.0;
        case Kind::Gaussian: {
            const double d = mu == 0 ? x.t - p.center.t : x.x - p.center.x;
            return -p.amplitude * gauss(p, x) * d / (p.width * p.width);
        }
        case Kind::PlaneWave: {
            const double dphase = mu == 0 ? p.k[0] : -p.k[1];
            return -p.amplitude * std::sin(p.k[0] * x.t - p.k[1] * x.x) * dphase;
        }
        }
        return 0.0;
    }

    std::vector<Profile> profiles_;
};

/// Smooth symmetric correction v(x, y) between the Hadamard parametrix and
/// the two-point function of a Hadamard state (W_v = W + v).
class SmoothStateCorrection {
public:
    enum class Kind { None, Constant, Gaussian };

    static SmoothStateCorrection none() { return SmoothStateCorrection(Kind::None, 0.0, 1.0); }
    static SmoothStateCorrection constant(double c) { return SmoothStateCorrection(Kind::Constant, c, 1.0); }

    /// c * exp(-|x - y|_E^2 / (2 width^2)), Euclidean distance in (t, x).
    static SmoothStateCorrection gaussian(double c, double width)
    {
        if (!(width > 0.0)) {
            throw ParameterError("state correction: width must be > 0");
        }
        return SmoothStateCorrection(Kind::Gaussian, c, width);
    }

    Kind kind() const noexcept { return kind_; }
    bool is_none() const noexcept { return kind_ == Kind::None || strength_ == 0.0; }
    double strength() const noexcept { return strength_; }
    double width() const noexcept { return width_; }

    double operator()(SpacetimePoint x, SpacetimePoint y) const noexcept
    {
        switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::Constant: return strength_;
        case Kind::Gaussian: {
            const double dt = x.t - y.t;
            const double dx = x.x - y.x;
            return strength_ * std::exp(-(dt * dt + dx * dx) / (2.0 * width_ * width_));
        }
        }
        return 0.0;
    }

    friend bool operator==(const SmoothStateCorrection&, const SmoothStateCorrection&) = default;

private:
    SmoothStateCorrection(Kind kind, double c, double w) : kind_(kind), strength_(c), width_(w) {}

    Kind kind_;
    double strength_;
    double width_;
};

} // namespace sgpt

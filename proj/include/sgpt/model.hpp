#pragma once

#include "sgpt/errors.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace sgpt {

/// Coupling data. beta = hbar a^2 / 4pi is derived; p is the Hoelder
/// exponent of the convergence estimate and defaults to (1 + 1/beta)/2.
class ModelParams {
public:
    ModelParams(double a, double hbar, double lambda, std::optional<double> p = std::nullopt)
        : a_(a), hbar_(hbar), lambda_(lambda)
    {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw ParameterError("charge unit a must be > 0");
        }
        if (!(hbar > 0.0) || !std::isfinite(hbar)) {
            throw ParameterError("hbar must be > 0");
        }
        if (!std::isfinite(lambda)) {
            throw ParameterError("lambda must be finite");
        }
        beta_ = hbar * a * a / (4.0 * std::numbers::pi);
        if (beta_ >= 1.0 && beta_ < 2.0) {
            throw SuperrenormalizableRegime("beta = " + std::to_string(beta_) +
                                            " lies in [1, 2), which requires renormalization");
        }
        if (beta_ >= 1.0) {
            throw ParameterError("beta = " + std::to_string(beta_) + " must be < 1");
        }
        p_ = p.value_or(0.5 * (1.0 + 1.0 / beta_));
        if (!(p_ > 1.0)) {
            throw ParameterError("Hoelder exponent p must be > 1");
        }
        if (!(beta_ * p_ < 1.0)) {
            throw ParameterError("beta * p must be < 1");
        }
    }

    /// Parameters with a chosen from beta.
    static ModelParams from_beta(double beta, double hbar, double lambda,
                                 std::optional<double> p = std::nullopt)
    {
        if (!(beta > 0.0)) {
            throw ParameterError("beta must be > 0");
        }
        return ModelParams(std::sqrt(4.0 * std::numbers::pi * beta / hbar), hbar, lambda, p);
    }

    double a() const noexcept { return a_; }
    double hbar() const noexcept { return hbar_; }
    double lambda() const noexcept { return lambda_; }
    double beta() const noexcept { return beta_; }
    double p() const noexcept { return p_; }
    double q() const noexcept { return p_ / (p_ - 1.0); }

    ModelParams with_lambda(double lambda) const { return ModelParams(a_, hbar_, lambda, p_); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    double a_;
    double hbar_;
    double lambda_;
    double beta_ = 0.0;
    double p_ = 0.0;
};

/// Ordered list of vertex charges, each +a or -a.
class ChargeList {
public:
    ChargeList(double a, std::vector<double> charges) : a_(a), charges_(std::move(charges))
    {
        if (charges_.empty()) {
            throw LengthMismatch("charge list must not be empty");
        }
        for (double c : charges_) {
            if (c != a && c != -a) {
                throw ParameterError("every charge must be +a or -a");
            }
        }
    }

    /// k charges +a followed by n - k charges -a.
    static ChargeList sector(double a, int n, int k)
    {
        if (n < 1 || k < 0 || k > n) {
            throw IndexError("sector: need n >= 1 and 0 <= k <= n");
        }
        std::vector<double> c(n, -a);
        for (int i = 0; i < k; ++i) {
            c[i] = a;
        }
        return ChargeList(a, std::move(c));
    }

    double unit() const noexcept { return a_; }
    std::size_t size() const noexcept { return charges_.size(); }
    double operator[](std::size_t i) const { return charges_[i]; }
    const std::vector<double>& values() const noexcept { return charges_; }

    double total() const noexcept
    {
        double q = 0.0;
        for (double c : charges_) {
            q += c;
        }
        return q;
    }

    ChargeList negated() const
    {
        std::vector<double> c = charges_;
        for (double& x : c) {
            x = -x;
        }
        return ChargeList(a_, std::move(c));
    }

    friend bool operator==(const ChargeList&, const ChargeList&) = default;

private:
    double a_;
    std::vector<double> charges_;
};

} // namespace sgpt

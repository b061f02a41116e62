#pragma once

#include "sgpt/cutoff.hpp"
#include "sgpt/errors.hpp"
#include "sgpt/field.hpp"
#include "sgpt/model.hpp"
#include "sgpt/parallel.hpp"
#include "sgpt/propagators.hpp"
#include "sgpt/quadrature.hpp"
#include "sgpt/rng.hpp"
#include "sgpt/vertex_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgpt {

enum class IntegrationMethod { MonteCarlo, QuasiMonteCarlo, Tensor };

inline std::string_view to_string(IntegrationMethod m) noexcept
{
    switch (m) {
    case IntegrationMethod::MonteCarlo: return "monte-carlo";
    case IntegrationMethod::QuasiMonteCarlo: return "quasi-monte-carlo";
    case IntegrationMethod::Tensor: return "tensor-quadrature";
    }
    return "?";
}

inline IntegrationMethod integration_method_from_string(std::string_view name)
{
    for (auto m : {IntegrationMethod::MonteCarlo, IntegrationMethod::QuasiMonteCarlo, IntegrationMethod::Tensor}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ParameterError("unknown integration method '" + std::string(name) + "'");
}

struct IntegrationSpec {
    IntegrationMethod method = IntegrationMethod::MonteCarlo;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    int max_order = 4;
    /// Worker threads, 0 = hardware concurrency. Never affects results.
    int threads = 0;
    /// Tensor rule: nodes per axis for the first point (later points use a
    /// few more so that node pairs do not coincide).
    int tensor_nodes = 0;
    /// Monte Carlo only: draw a fraction of the samples with one pair of
    /// points pulled towards each other along both light-cone directions,
    /// matching the |u|^{-beta} |v|^{-beta} pair singularity.
    bool pair_importance = true;

    void validate(int n) const
    {
        if (method == IntegrationMethod::MonteCarlo && samples < 1000) {
            throw ParameterError("monte-carlo needs at least 1000 samples");
        }
        if (method == IntegrationMethod::QuasiMonteCarlo && samples < 1000) {
            throw ParameterError("quasi-monte-carlo needs at least 1000 samples");
        }
        if (method == IntegrationMethod::Tensor && n > 3) {
            throw ParameterError("tensor quadrature is limited to n <= 3");
        }
        if (max_order < 0) {
            throw ParameterError("max_order must be >= 0");
        }
    }

    friend bool operator==(const IntegrationSpec&, const IntegrationSpec&) = default;
};

struct Estimate {
    complex value{};
    double stderr = 0.0;
    std::uint64_t resamples = 0;
    /// Second channel of a split integrand (see Split); zero otherwise.
    complex part{};
};

/// Integrand value carrying a distinguished part of the total.
struct Split {
    complex total{};
    complex part{};
};

namespace detail {

struct Accumulator {
    complex sum{};
    double sum_sq = 0.0;
    std::uint64_t resamples = 0;
    complex part{};

    void set(const Split& v, double w) noexcept
    {
        sum = v.total * w;
        part = v.part * w;
        sum_sq = std::norm(sum);
    }

    Accumulator& operator+=(const Accumulator& o) noexcept
    {
        sum += o.sum;
        part += o.part;
        sum_sq += o.sum_sq;
        resamples += o.resamples;
        return *this;
    }
};

inline constexpr int max_attempts = 64;
inline constexpr int qmc_replicates = 16;

/// Generalized golden ratio phi_d, the real root of x^{d+1} = x + 1.
inline double kronecker_root(int d)
{
    double x = 2.0;
    for (int i = 0; i < 200; ++i) {
        x = std::pow(1.0 + x, 1.0 / (d + 1.0));
    }
    return x;
}

inline std::vector<double> kronecker_alpha(int dim)
{
    const double g = kronecker_root(dim);
    std::vector<double> a(dim);
    for (int j = 0; j < dim; ++j) {
        a[j] = std::fmod(1.0 / std::pow(g, j + 1), 1.0);
    }
    return a;
}

inline Estimate finish_mc(const Accumulator& acc, std::uint64_t count, double scale)
{
    const double n = static_cast<double>(count);
    const complex mean = acc.sum / n;
    const double var = std::max(0.0, (acc.sum_sq / n - std::norm(mean)) * n / (n - 1.0));
    return {mean * scale, std::sqrt(var / n) * scale, acc.resamples, acc.part / n * scale};
}

inline std::optional<Split> as_split(const std::optional<complex>& v)
{
    if (!v) {
        return std::nullopt;
    }
    return Split{*v, {}};
}

inline std::optional<Split> as_split(const std::optional<Split>& v) { return v; }

inline constexpr double uniform_share = 0.3;

/// Exponent of the pair proposal: a little stronger than the beta singularity
/// it has to cover.
inline double proposal_power(double beta) noexcept { return beta + 0.3 * (1.0 - beta); }

/// Set of disjoint index pairs (i, j), i < j.
using Matching = std::vector<std::pair<int, int>>;

/// All matchings of {0..n-1} with floor(n/2) pairs.
inline std::vector<Matching> maximal_matchings(int n)
{
    std::vector<Matching> out;
    Matching cur;
    std::vector<bool> used(n, false);
    const int want = n / 2;
    auto rec = [&](auto&& self, int skipped) -> void {
        int first = 0;
        while (first < n && used[first]) {
            ++first;
        }
        if (static_cast<int>(cur.size()) == want) {
            out.push_back(cur);
            return;
        }
        if (first == n) {
            return;
        }
        used[first] = true;
        for (int j = first + 1; j < n; ++j) {
            if (!used[j]) {
                used[j] = true;
                cur.push_back({first, j});
                self(self, skipped);
                cur.pop_back();
                used[j] = false;
            }
        }
        if (skipped == 0 && n % 2 == 1) {
            self(self, 1);
        }
        used[first] = false;
    };
    rec(rec, 0);
    return out;
}

/// Integral over (box of g)^n of integrand(points); the integrand returns
/// nullopt for configurations on the light cone, which are redrawn.
/// `singular_power` > 0 enables pair importance sampling for Monte Carlo.
/// Matchings of size min(k, n - k) pairing a +a point with a -a point.
inline std::vector<Matching> opposite_matchings(std::span<const double> charges)
{
    std::vector<Matching> out;
    for (const Matching& m : maximal_matchings(static_cast<int>(charges.size()))) {
        Matching kept;
        for (const auto& pr : m) {
            if (charges[pr.first] * charges[pr.second] < 0.0) {
                kept.push_back(pr);
            }
        }
        if (kept.empty()) {
            continue;
        }
        bool seen = false;
        for (const auto& o : out) {
            seen = seen || o == kept;
        }
        if (!seen) {
            out.push_back(std::move(kept));
        }
    }
    std::size_t best = 0;
    for (const auto& o : out) {
        best = std::max(best, o.size());
    }
    std::erase_if(out, [&](const Matching& o) { return o.size() < best; });
    return out;
}

/// Integral over (box of g)^n of integrand(points); the integrand returns
/// nullopt for configurations on the light cone, which are redrawn.
/// `singular_power` > 0 enables pair importance sampling for Monte Carlo over
/// the given matchings (all maximal matchings when empty).
template <class F>
Estimate integrate_points(int n, const CutoffFunction& g, const IntegrationSpec& spec, std::uint32_t stream,
                          F&& integrand, double singular_power = 0.0, std::vector<Matching> proposals = {})
{
    const double t0 = g.t_min();
    const double x0 = g.x_min();
    const double side = 2.0 * g.radius();
    const double volume = std::pow(g.box_volume(), n);

    if (spec.method == IntegrationMethod::Tensor) {
        const int base = spec.tensor_nodes > 0 ? spec.tensor_nodes : (n == 1 ? 48 : n == 2 ? 14 : 7);
        auto run = [&](int nodes) {
            std::vector<QuadratureRule> rt;
            std::vector<QuadratureRule> rx;
            std::size_t total = 1;
            for (int i = 0; i < n; ++i) {
                rt.push_back(gauss_legendre(nodes + 2 * i, g.t_min(), g.t_max()));
                rx.push_back(gauss_legendre(nodes + 2 * i + 1, g.x_min(), g.x_max()));
                total *= rt.back().size() * rx.back().size();
            }
            const Accumulator acc = deterministic_sum<Accumulator>(
                total,
                [&](std::size_t idx) {
                    SpacetimePoint pts[8];
                    double w = 1.0;
                    for (int i = 0; i < n; ++i) {
                        const std::size_t nt = rt[i].size();
                        const std::size_t nx = rx[i].size();
                        const std::size_t a = idx % nt;
                        idx /= nt;
                        const std::size_t b = idx % nx;
                        idx /= nx;
                        pts[i] = {rt[i].nodes[a], rx[i].nodes[b]};
                        w *= rt[i].weights[a] * rx[i].weights[b];
                    }
                    Accumulator acc1;
                    if (auto v = as_split(integrand(std::span<const SpacetimePoint>(pts, n)))) {
                        acc1.set(*v, w);
                    } else {
                        acc1.resamples = 1;
                    }
                    return acc1;
                },
                spec.threads);
            return acc;
        };
        const Accumulator fine = run(base);
        const Accumulator coarse = run(std::max(2, (2 * base) / 3));
        return {fine.sum, std::abs(fine.sum - coarse.sum), fine.resamples, fine.part};
    }

    if (n > 8) {
        throw ParameterError("integration is limited to n <= 8 points");
    }

    auto draw = [&](std::size_t index, int attempt, std::span<const double> shift, std::size_t j,
                    std::span<const double> alpha) {
        SpacetimePoint pts[8];
        SampleStream rng(spec.seed, stream, index, static_cast<std::uint32_t>(attempt));
        for (int i = 0; i < n; ++i) {
            double ut;
            double ux;
            if (attempt == 0 && !alpha.empty()) {
                ut = std::fmod(shift[2 * i] + (j + 1) * alpha[2 * i], 1.0);
                ux = std::fmod(shift[2 * i + 1] + (j + 1) * alpha[2 * i + 1], 1.0);
            } else {
                ut = rng.uniform();
                ux = rng.uniform();
            }
            pts[i] = {t0 + side * ut, x0 + side * ux};
        }
        return as_split(integrand(std::span<const SpacetimePoint>(pts, n)));
    };

    auto sample = [&](std::size_t index, std::span<const double> shift, std::size_t j,
                      std::span<const double> alpha) {
        Accumulator acc;
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            if (auto v = draw(index, attempt, shift, j, alpha)) {
                acc.set(*v, 1.0);
                return acc;
            }
            ++acc.resamples;
        }
        throw SingularHitBudgetExceeded("integrate: sample kept landing on the light cone");
    };

    if (spec.method == IntegrationMethod::MonteCarlo && spec.pair_importance && n >= 2 && singular_power > 0.0) {
        // Sampled in light-cone coordinates u = t - x, v = t + x, each point
        // centred on the box. Base law: u and v independent with the triangular
        // density f(s) = (2r - |s|) / (4 r^2) on [-2r, 2r]. In each direction
        // separately, with probability 1 - uniform_share a random maximal
        // matching is drawn and matched partners are moved to u_i + d with
        // d ~ rho(d) proportional to |d|^{-gam} on eps <= |d| <= D.
        // Because the two directions are independent, products of
        // |u_ij|^{-beta} and |v_kl|^{-beta} over different pairs are covered.
        const double gam = singular_power;
        const double r = g.radius();
        const double D = 4.0 * r;
        const std::vector<Matching> matchings = proposals.empty() ? maximal_matchings(n) : std::move(proposals);
        const double nm = static_cast<double>(matchings.size());
        // rho is truncated to |d| >= eps so that partners stay resolvable in
        // double precision; the uniform share still covers |d| < eps.
        const double eps = 1e-9 * D;
        const double top = std::pow(D, 1.0 - gam);
        const double bottom = std::pow(eps, 1.0 - gam);
        const double rho_norm = (1.0 - gam) / (2.0 * (top - bottom));
        auto tri = [&](double s) { return (2.0 * r - std::abs(s)) / (4.0 * r * r); };
        const SpacetimePoint c = g.center();

        // fills coordinate s[] for one direction, returns false if outside the range
        auto draw_direction = [&](SampleStream& rng, double* s) {
            for (int i = 0; i < n; ++i) {
                s[i] = r * (rng.uniform() + rng.uniform() - 1.0) * 2.0;
            }
            if (rng.uniform() >= uniform_share) {
                const auto& mt = matchings[std::min<std::size_t>(matchings.size() - 1,
                                                                 static_cast<std::size_t>(rng.uniform() * nm))];
                for (const auto& [i, j] : mt) {
                    const double mag = std::pow(bottom + (top - bottom) * rng.uniform(), 1.0 / (1.0 - gam));
                    s[j] = s[i] + (rng.uniform() < 0.5 ? -mag : mag);
                }
            }
            for (int i = 0; i < n; ++i) {
                if (std::abs(s[i]) >= 2.0 * r) {
                    return false;
                }
            }
            return true;
        };
        // density of one direction divided by prod f(s_i)
        auto mixture = [&](const double* s) {
            double sum = 0.0;
            for (const auto& mt : matchings) {
                double f = 1.0;
                for (const auto& [i, j] : mt) {
                    const double d = std::abs(s[j] - s[i]);
                    f *= d < eps || d > D ? 0.0 : rho_norm * std::pow(d, -gam) / tri(s[j]);
                }
                sum += f;
            }
            return uniform_share + (1.0 - uniform_share) * sum / nm;
        };

        auto draw_one = [&](std::size_t index, int attempt, Accumulator& acc) -> bool {
            SampleStream rng(spec.seed, stream, index, static_cast<std::uint32_t>(attempt));
            double u[8];
            double v[8];
            const bool inside_u = draw_direction(rng, u);
            const bool inside_v = draw_direction(rng, v);
            if (!inside_u || !inside_v) {
                return true; // outside the support, the integrand vanishes
            }
            SpacetimePoint pts[8];
            double base = 1.0;
            for (int i = 0; i < n; ++i) {
                pts[i] = {c.t + 0.5 * (u[i] + v[i]), c.x + 0.5 * (v[i] - u[i])};
                if (!g.in_support(pts[i])) {
                    return true;
                }
                base *= tri(u[i]) * tri(v[i]);
            }
            for (int a = 0; a < n; ++a) {
                for (int b = a + 1; b < n; ++b) {
                    if (u[a] == u[b] || v[a] == v[b]) {
                        return false;
                    }
                }
            }
            auto val = as_split(integrand(std::span<const SpacetimePoint>(pts, n)));
            if (!val) {
                return false;
            }
            // dt dx = du dv / 2 per point
            const double q = base * mixture(u) * mixture(v) * std::pow(2.0, n);
            acc.set(*val, 1.0 / q);
            return true;
        };
        const Accumulator acc = deterministic_sum<Accumulator>(
            spec.samples,
            [&](std::size_t i) {
                Accumulator a;
                for (int attempt = 0; attempt < max_attempts; ++attempt) {
                    if (draw_one(i, attempt, a)) {
                        return a;
                    }
                    ++a.resamples;
                }
                throw SingularHitBudgetExceeded("integrate: sample kept landing on the light cone");
            },
            spec.threads);
        return finish_mc(acc, spec.samples, 1.0);
    }

    if (spec.method == IntegrationMethod::MonteCarlo) {
        const Accumulator acc = deterministic_sum<Accumulator>(
            spec.samples, [&](std::size_t i) { return sample(i, {}, 0, {}); }, spec.threads);
        return finish_mc(acc, spec.samples, volume);
    }

    // randomized Kronecker lattice, replicate spread as the error estimate
    const std::vector<double> alpha = kronecker_alpha(2 * n);
    const std::uint64_t per = spec.samples / qmc_replicates;
    complex mean_sum = 0.0;
    double sq_sum = 0.0;
    std::uint64_t resamples = 0;
    complex part_sum = 0.0;
    for (int r = 0; r < qmc_replicates; ++r) {
        std::vector<double> shift(2 * n);
        SampleStream srng(spec.seed, stream ^ 0x80000000u, static_cast<std::uint64_t>(r));
        for (double& s : shift) {
            s = srng.uniform();
        }
        const Accumulator acc = deterministic_sum<Accumulator>(
            per, [&](std::size_t j) { return sample(r * per + j, shift, j, alpha); }, spec.threads);
        const complex m = acc.sum / static_cast<double>(per);
        mean_sum += m;
        part_sum += acc.part / static_cast<double>(per);
        sq_sum += std::norm(m);
        resamples += acc.resamples;
    }
    const double R = qmc_replicates;
    const complex mean = mean_sum / R;
    const double var = std::max(0.0, (sq_sum / R - std::norm(mean)) * R / (R - 1.0));
    return {mean * volume, std::sqrt(var / R) * volume, resamples, part_sum / R * volume};
}

inline void check_estimate(const Estimate& e, std::uint64_t samples, const IntegrationSpec& spec, const char* what)
{
    if (spec.method != IntegrationMethod::Tensor && static_cast<double>(e.resamples) > 1e-4 * samples) {
        throw SingularHitBudgetExceeded(std::string(what) + ": " + std::to_string(e.resamples) +
                                        " resampled cone hits exceed 0.01% of the samples");
    }
    if (spec.method != IntegrationMethod::Tensor && e.stderr > 0.25 * std::abs(e.value)) {
        throw VarianceBlowup(std::string(what) + ": standard error exceeds 25% of the estimate");
    }
}

inline std::uint32_t stream_id(std::uint32_t tag, int n, int k) noexcept
{
    return (tag << 24) | (static_cast<std::uint32_t>(n) << 12) | static_cast<std::uint32_t>(k);
}

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

inline double log_binomial(int n, int k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

inline double binomial(int n, int k) { return std::round(std::exp(log_binomial(n, k))); }

} // namespace detail

/// int tn_kernel(k charges +a, n - k charges -a; x1..xn) prod g(xi) dx over (supp g)^n.
inline Estimate integrate_tn(int n, int k, const CutoffFunction& g, const FieldConfiguration& phi,
                             const ModelParams& params, const IntegrationSpec& spec)
{
    if (n < 1 || k < 0 || k > n) {
        throw IndexError("integrate_tn: need n >= 1 and 0 <= k <= n");
    }
    spec.validate(n);
    const ChargeList charges = ChargeList::sector(params.a(), n, k);
    const double hbar = params.hbar();
    const Estimate e = detail::integrate_points(
        n, g, spec, detail::stream_id(1, n, k), [&](std::span<const SpacetimePoint> pts) -> std::optional<complex> {
            double weight = 1.0;
            for (const auto& p : pts) {
                weight *= g(p);
            }
            if (weight == 0.0) {
                return complex{0.0, 0.0};
            }
            complex lg;
            if (!detail::product_log(detail::PairKind::Feynman, charges.values(), pts, hbar, lg)) {
                return std::nullopt;
            }
            lg += detail::I * detail::phase_sum(charges.values(), pts, phi);
            return weight * std::exp(lg);
        },
        k == 0 || k == n ? 0.0 : detail::proposal_power(params.beta()), detail::opposite_matchings(charges.values()));
    detail::check_estimate(e, spec.samples, spec, "integrate_tn");
    return e;
}

/// Same integral with massive_tn_kernel in place of tn_kernel.
inline Estimate integrate_tn_massive(int n, int k, const CutoffFunction& g, const FieldConfiguration& phi,
                                     const ModelParams& params, const MassiveParams& mp, const IntegrationSpec& spec)
{
    if (n < 1 || k < 0 || k > n) {
        throw IndexError("integrate_tn_massive: need n >= 1 and 0 <= k <= n");
    }
    spec.validate(n);
    const ChargeList charges = ChargeList::sector(params.a(), n, k);
    const Estimate e = detail::integrate_points(
        n, g, spec, detail::stream_id(2, n, k), [&](std::span<const SpacetimePoint> pts) -> std::optional<complex> {
            double weight = 1.0;
            for (const auto& p : pts) {
                weight *= g(p);
            }
            if (weight == 0.0) {
                return complex{0.0, 0.0};
            }
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t j = i + 1; j < pts.size(); ++j) {
                    if ((pts[i] - pts[j]).on_cone()) {
                        return std::nullopt;
                    }
                }
            }
            return weight * massive_tn_kernel(charges, pts, phi, params, mp);
        },
        k == 0 || k == n ? 0.0 : detail::proposal_power(params.beta()), detail::opposite_matchings(charges.values()));
    // non-neutral sectors are suppressed by powers of m, so only the hit budget applies
    if (spec.method != IntegrationMethod::Tensor && static_cast<double>(e.resamples) > 1e-4 * spec.samples) {
        throw SingularHitBudgetExceeded("integrate_tn_massive: too many resampled cone hits");
    }
    return e;
}

struct SectorResult {
    int k = 0;
    complex value{};
    double stderr = 0.0;
};

struct OrderResult {
    int n = 0;
    /// Contributions (1/n!)(i lambda/hbar)^n 2^{-n} C(n,k) I_{n,k}; they sum to total.
    std::vector<SectorResult> k_breakdown;
    complex total{};
    double stderr = 0.0;
    double bound = 0.0;
};

/// Sum over k of 1 / ((n-k)! k!) ((n-k)!/(n-2k)!)^{1/p} for k <= n/2, and
/// floor(n/2) / (floor(n/2)!)^{1 - 1/p}.
inline std::pair<double, double> holder_sum(int n, double p)
{
    if (n < 0 || !(p > 1.0)) {
        throw ParameterError("holder_sum: need n >= 0 and p > 1");
    }
    double lhs = 0.0;
    for (int k = 0; k <= n / 2; ++k) {
        const double lg = -detail::log_factorial(n - k) - detail::log_factorial(k) +
                          (detail::log_factorial(n - k) - detail::log_factorial(n - 2 * k)) / p;
        lhs += std::exp(lg);
    }
    const int h = n / 2;
    const double rhs = h == 0 ? 0.0 : std::exp(std::log(h) - (1.0 - 1.0 / p) * detail::log_factorial(h));
    return {lhs, rhs};
}

/// floor(n/2) (C lambda)^n / (floor(n/2)!)^{1 - 1/p}
inline double bound_s_n(int n, const ModelParams& params, double C)
{
    if (n < 0) {
        throw ParameterError("bound_s_n: n must be >= 0");
    }
    const int h = n / 2;
    if (h == 0) {
        return 0.0;
    }
    const double cl = C * std::abs(params.lambda());
    if (cl == 0.0) {
        return 0.0;
    }
    return std::exp(std::log(h) + n * std::log(cl) - (1.0 - 1.0 / params.p()) * detail::log_factorial(h));
}

namespace detail {

/// log of the explicit bound B_n on |S_n|: Hoelder in (t, x) with exponents
/// (q, p), then Hoelder again between the u and v light-cone factors, the
/// Laplace expansion of |det D|^{beta p}, the sup of Vandermonde blocks over
/// the box and the closed-form integral of |z - w|^{-beta p} over a square.
inline double log_explicit_bound(int n, const CutoffFunction& g, const ModelParams& params)
{
    if (n == 0) {
        return 0.0;
    }
    const double lam = std::abs(params.lambda());
    if (lam == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double p = params.p();
    const double q = params.q();
    const double bp = params.beta() * p;
    const double L = 4.0 * g.radius();
    const double cc = 2.0 * std::pow(L, 2.0 - bp) / ((1.0 - bp) * (2.0 - bp));
    const double gq = std::log(2.0 * g.box_volume()) + q * std::log(g.sup_norm());
    std::vector<double> terms;
    for (int k = 0; k <= n; ++k) {
        const int kp = std::min(k, n - k);
        const int m = n - 2 * kp;
        const double lx = log_factorial(n - kp) - log_factorial(m) + m * std::log(L) +
                          bp * 0.5 * m * (m - 1) * std::log(L) + kp * std::log(cc);
        terms.push_back(log_binomial(n, k) + (2.0 / p) * lx);
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) {
        sum += std::exp(t - top);
    }
    return n * std::log(lam / (2.0 * params.hbar())) - log_factorial(n) - n * std::log(2.0) + (n / q) * gq +
           top + std::log(sum);
}

} // namespace detail

/// Rigorous bound on |S_n| for real phi, before any constants are absorbed.
inline double explicit_bound(int n, const CutoffFunction& g, const ModelParams& params)
{
    return std::exp(detail::log_explicit_bound(n, g, params));
}

struct BoundConstants {
    /// (2 Vol sup|g|^q)^{1/q}: the L^q norm of g per vertex in light-cone measure
    double C_gq = 0.0;
    /// sup of a light-cone coordinate difference over the box
    double C_vdm = 0.0;
    /// int int |z - w|^{-beta p} over the square of side C_vdm
    double C_cauchy = 0.0;
    /// constant of bound_s_n: sup over 2 <= n <= 200 of (B_n / (lambda^n floor(n/2) / (floor(n/2)!)^{1-1/p}))^{1/n}
    double C = 0.0;
};

inline BoundConstants estimate_constants(const CutoffFunction& g, const ModelParams& params, int n_max = 200)
{
    BoundConstants c;
    const double bp = params.beta() * params.p();
    c.C_vdm = 4.0 * g.radius();
    c.C_cauchy = 2.0 * std::pow(c.C_vdm, 2.0 - bp) / ((1.0 - bp) * (2.0 - bp));
    c.C_gq = std::exp((std::log(2.0 * g.box_volume()) + params.q() * std::log(g.sup_norm())) / params.q());
    const ModelParams unit = params.with_lambda(1.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int n = 2; n <= n_max; ++n) {
        const int h = n / 2;
        const double lform = std::log(h) - (1.0 - 1.0 / params.p()) * detail::log_factorial(h);
        best = std::max(best, (detail::log_explicit_bound(n, g, unit) - lform) / n);
    }
    c.C = std::exp(best);
    return c;
}

/// Largest support radius r (bisection) for which C(r) |lambda| < 1.
inline double critical_radius(CutoffFunction::Kind kind, const ModelParams& params, double amplitude = 1.0)
{
    if (params.lambda() == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    auto excess = [&](double r) {
        const CutoffFunction g(kind, {0.0, 0.0}, r, amplitude);
        return estimate_constants(g, params).C * std::abs(params.lambda()) - 1.0;
    };
    double lo = 1e-9;
    double hi = 1e3;
    if (excess(lo) >= 0.0) {
        return 0.0;
    }
    if (excess(hi) < 0.0) {
        return hi;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = std::sqrt(lo * hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    return lo;
}

struct RatioTest {
    /// Smallest n0 with bound(n+2)/bound(n) < 1 for every n0 <= n <= n_max - 2; -1 if none.
    int n0 = -1;
    double last_ratio = 0.0;
    bool passed = false;
};

/// Ratio test on the series of bound_s_n, in log space.
inline RatioTest bound_ratio_test(const ModelParams& params, double C, int n_max = 200)
{
    RatioTest rt;
    auto lb = [&](int n) {
        const int h = n / 2;
        return std::log(h) + n * std::log(C * std::abs(params.lambda())) -
               (1.0 - 1.0 / params.p()) * detail::log_factorial(h);
    };
    if (C * std::abs(params.lambda()) == 0.0) {
        rt.n0 = 2;
        rt.passed = true;
        return rt;
    }
    int n0 = -1;
    for (int n = n_max - 2; n >= 2; --n) {
        const double r = std::exp(lb(n + 2) - lb(n));
        if (n == n_max - 2) {
            rt.last_ratio = r;
        }
        if (r < 1.0) {
            n0 = n;
        } else {
            break;
        }
    }
    rt.n0 = n0;
    rt.passed = n0 >= 0;
    return rt;
}

/// Order-n coefficient of the S-matrix, S_n = (1/n!)(i lambda/hbar)^n 2^{-n} sum_k C(n,k) I_{n,k}.
/// With a mass the sectors use massive_tn_kernel.
inline OrderResult s_n(int n, const CutoffFunction& g, const FieldConfiguration& phi, const ModelParams& params,
                       const IntegrationSpec& spec, const std::optional<MassiveParams>& mass = std::nullopt,
                       std::optional<BoundConstants> consts = std::nullopt)
{
    if (n < 0) {
        throw IndexError("s_n: n must be >= 0");
    }
    OrderResult r;
    r.n = n;
    if (!consts) {
        consts = estimate_constants(g, params);
    }
    r.bound = n >= 2 ? bound_s_n(n, params, consts->C) : explicit_bound(n, g, params);
    if (n == 0) {
        r.total = 1.0;
        return r;
    }
    const complex pref = std::pow(complex{0.0, params.lambda() / params.hbar()}, n) *
                         std::exp(-detail::log_factorial(n) - n * std::log(2.0));
    if (params.lambda() == 0.0) {
        for (int k = 0; k <= n; ++k) {
            r.k_breakdown.push_back({k, 0.0, 0.0});
        }
        return r;
    }
    const bool symmetric = phi.is_zero();
    std::vector<Estimate> est(n + 1);
    double var = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (symmetric && 2 * k > n) {
            est[k] = est[n - k];
            continue;
        }
        est[k] = mass ? integrate_tn_massive(n, k, g, phi, params, *mass, spec)
                      : integrate_tn(n, k, g, phi, params, spec);
        const double mult = symmetric && 2 * k != n ? 2.0 : 1.0;
        const double s = mult * std::abs(pref) * detail::binomial(n, k) * est[k].stderr;
        var += s * s;
    }
    for (int k = 0; k <= n; ++k) {
        const double c = detail::binomial(n, k);
        SectorResult sr{k, pref * c * est[k].value, std::abs(pref) * c * est[k].stderr};
        r.total += sr.value;
        r.k_breakdown.push_back(sr);
    }
    r.stderr = std::sqrt(var);
    return r;
}

struct ConvergenceReport {
    std::vector<OrderResult> orders;
    std::vector<complex> partial_sums;
    /// |partial_sums[n] - partial_sums[n-1]|, with increments[0] = |partial_sums[0]|
    std::vector<double> increments;
    std::vector<double> bound_series;
    /// increments[n] / increments[n-1] (0 where undefined)
    std::vector<double> ratio_estimates;
    RatioTest bound_ratio;
    /// Every nonzero increment from order 2 on is at most the previous nonzero
    /// one plus three combined standard errors.
    bool increments_decreasing = false;
};

namespace detail {

inline ConvergenceReport assemble(std::vector<OrderResult> orders, const ModelParams& params, double C)
{
    ConvergenceReport rep;
    complex sum = 0.0;
    for (const auto& o : orders) {
        sum += o.total;
        const double inc = rep.partial_sums.empty() ? std::abs(sum) : std::abs(o.total);
        const double prev = rep.increments.empty() ? 0.0 : rep.increments.back();
        rep.partial_sums.push_back(sum);
        rep.ratio_estimates.push_back(prev > 0.0 ? inc / prev : 0.0);
        rep.increments.push_back(inc);
        rep.bound_series.push_back(o.bound);
    }
    rep.bound_ratio = bound_ratio_test(params, C);
    bool ok = true;
    int last = -1;
    for (std::size_t n = 2; n < orders.size(); ++n) {
        if (rep.increments[n] == 0.0) {
            continue;
        }
        if (last >= 0) {
            const double sig = std::hypot(orders[n].stderr, orders[last].stderr);
            ok = ok && rep.increments[n] <= rep.increments[last] + 3.0 * sig;
        }
        last = static_cast<int>(n);
    }
    rep.increments_decreasing = ok;
    rep.orders = std::move(orders);
    return rep;
}

} // namespace detail

inline ConvergenceReport partial_sums(int N, const CutoffFunction& g, const FieldConfiguration& phi,
                                      const ModelParams& params, const IntegrationSpec& spec,
                                      const std::optional<MassiveParams>& mass = std::nullopt)
{
    if (N < 0 || N > spec.max_order) {
        throw ParameterError("partial_sums: order " + std::to_string(N) + " exceeds max_order " +
                             std::to_string(spec.max_order));
    }
    const BoundConstants consts = estimate_constants(g, params);
    std::vector<OrderResult> orders;
    for (int n = 0; n <= N; ++n) {
        orders.push_back(s_n(n, g, phi, params, spec, mass, consts));
    }
    return detail::assemble(std::move(orders), params, consts.C);
}

/// Vacuum (m -> 0) limit: only the neutral sector k = n/2 of even orders
/// survives; odd orders are exactly 0. With a mass the full massive sums are
/// reported instead, for comparison with the limit.
inline ConvergenceReport vacuum_limit_series(int N, const CutoffFunction& g, const FieldConfiguration& phi,
                                             const ModelParams& params, const IntegrationSpec& spec,
                                             const std::optional<MassiveParams>& mass = std::nullopt)
{
    if (mass) {
        return partial_sums(N, g, phi, params, spec, mass);
    }
    if (N < 0 || N > spec.max_order) {
        throw ParameterError("vacuum_limit_series: order exceeds max_order");
    }
    const BoundConstants consts = estimate_constants(g, params);
    std::vector<OrderResult> orders;
    for (int n = 0; n <= N; ++n) {
        OrderResult r;
        r.n = n;
        r.bound = n >= 2 ? bound_s_n(n, params, consts.C) : explicit_bound(n, g, params);
        if (n == 0) {
            r.total = 1.0;
        } else if (n % 2 == 0 && params.lambda() != 0.0) {
            const int k = n / 2;
            const complex pref = std::pow(complex{0.0, params.lambda() / params.hbar()}, n) *
                                 std::exp(-detail::log_factorial(n) - n * std::log(2.0)) * detail::binomial(n, k);
            const Estimate e = integrate_tn(n, k, g, phi, params, spec);
            r.total = pref * e.value;
            r.stderr = std::abs(pref) * e.stderr;
            r.k_breakdown.push_back({k, r.total, r.stderr});
        }
        orders.push_back(r);
    }
    return detail::assemble(std::move(orders), params, consts.C);
}

/// l-th derivative of the smeared vertex V_a(g)[phi] = int g e^{i a phi} in
/// the direction psi: (i a)^l int g psi^l e^{i a phi}. `charge` is +a or -a.
inline complex functional_derivative(int l, const FieldConfiguration& psi, const CutoffFunction& g,
                                     const FieldConfiguration& phi, double charge, int nodes = 64)
{
    if (l < 0) {
        throw ParameterError("functional_derivative: l must be >= 0");
    }
    const QuadratureRule rt = gauss_legendre(nodes, g.t_min(), g.t_max());
    const QuadratureRule rx = gauss_legendre(nodes + 1, g.x_min(), g.x_max());
    complex sum = 0.0;
    for (std::size_t i = 0; i < rt.size(); ++i) {
        for (std::size_t j = 0; j < rx.size(); ++j) {
            const SpacetimePoint x{rt.nodes[i], rx.nodes[j]};
            const double w = rt.weights[i] * rx.weights[j] * g(x);
            sum += w * std::pow(psi(x), l) * std::exp(detail::I * (charge * phi(x)));
        }
    }
    return std::pow(detail::I * charge, l) * sum;
}

inline double functional_derivative_norm(int l, const FieldConfiguration& psi, const CutoffFunction& g,
                                         const ModelParams& params,
                                         const FieldConfiguration& phi = FieldConfiguration::zero())
{
    return std::abs(functional_derivative(l, psi, g, phi, params.a()));
}

} // namespace sgpt

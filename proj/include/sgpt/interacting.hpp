#pragma once

#include "sgpt/bessel.hpp"
#include "sgpt/cutoff.hpp"
#include "sgpt/errors.hpp"
#include "sgpt/field.hpp"
#include "sgpt/model.hpp"
#include "sgpt/propagators.hpp"
#include "sgpt/quadrature.hpp"
#include "sgpt/series.hpp"
#include "sgpt/spacetime.hpp"
#include "sgpt/vertex_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgpt {

enum class FieldMode { Current, Field };

inline std::string_view to_string(FieldMode m) noexcept { return m == FieldMode::Current ? "current" : "field"; }

inline FieldMode field_mode_from_string(std::string_view name)
{
    if (name == "current") {
        return FieldMode::Current;
    }
    if (name == "field") {
        return FieldMode::Field;
    }
    throw ParameterError("unknown field mode '" + std::string(name) + "'");
}

/// The observable d_mu Phi(f) (current mode) or Phi(f) (field mode).
struct CurrentObservable {
    int mu = 0;
    CutoffFunction f;
    FieldMode field_mode = FieldMode::Current;

    void validate() const
    {
        if (mu != 0 && mu != 1) {
            throw ParameterError("current: mu must be 0 or 1");
        }
    }

    friend bool operator==(const CurrentObservable&, const CurrentObservable&) = default;
};

/// R_n = J_n + M_n. J_n collects the free observable and its contractions
/// with the antichronological block, M_n the contractions with the
/// chronological block.
struct RetardedOrder {
    int n = 0;
    complex j_part{};
    complex m_part{};
    complex total{};
    double stderr = 0.0;
    /// (charge assignment, block split) pairs summed per configuration
    std::uint64_t terms = 0;
};

/// State in which the interacting observable is built: the massless vacuum
/// parametrix (default), a Hadamard state W + v, or the mass-limit mode with
/// massive kernels at m.
struct StateModel {
    SmoothStateCorrection v = SmoothStateCorrection::none();
    std::optional<MassiveParams> mass;

    bool mass_limit() const noexcept { return mass.has_value(); }

    void validate() const
    {
        if (mass) {
            mass->validate();
            if (!(mass->m > 0.0)) {
                throw DomainError("mass-limit mode needs m > 0");
            }
            if (!v.is_none()) {
                throw ParameterError("a state correction v cannot be combined with the mass-limit mode");
            }
        }
    }
};

/// Kernel of the antichronological product: tn_kernel with Delta^AF in every pair.
inline complex antichron_kernel(const ChargeList& charges, std::span<const SpacetimePoint> points,
                                const FieldConfiguration& phi, const ModelParams& params)
{
    detail::require_same_length(charges.size(), points.size(), "antichron_kernel");
    complex lg;
    if (!detail::product_log(detail::PairKind::AntiFeynman, charges.values(), points, params.hbar(), lg)) {
        throw OnConeError("antichron_kernel: two points are light-like separated");
    }
    lg += detail::I * detail::phase_sum(charges.values(), points, phi);
    return std::exp(lg);
}

/// (tn_kernel at phi = 0, star product of the vertices taken latest first).
inline std::pair<complex, complex> chron_ordering_identity(const ChargeList& charges,
                                                           std::span<const SpacetimePoint> points,
                                                           const ModelParams& params)
{
    detail::require_same_length(charges.size(), points.size(), "chron_ordering_identity");
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (points[i].t == points[j].t) {
                throw EqualTimesError("chron_ordering_identity: two points share a time");
            }
        }
    }
    const complex lhs = tn_kernel(charges, points, FieldConfiguration::zero(), params);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a].t > points[b].t; });
    complex rhs = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t p = order[i];
            const std::size_t q = order[j];
            rhs *= star_pair_kernel(charges[p], charges[q], points[p], points[q], params.hbar());
        }
    }
    return {lhs, rhs};
}

/// d_mu of the closed form off the cone. The theta factors are locally
/// constant there, so only the Hadamard part contributes.
inline complex grad_propagator(PropagatorKind kind, int mu, SpacetimePoint pt)
{
    require_off_cone(pt, "grad_propagator");
    if (mu != 0 && mu != 1) {
        throw ParameterError("grad_propagator: mu must be 0 or 1");
    }
    switch (kind) {
    case PropagatorKind::Feynman:
    case PropagatorKind::AntiFeynman:
    case PropagatorKind::TwoPointW:
    case PropagatorKind::HadamardH: break;
    default: return 0.0;
    }
    const double s = pt.interval();
    const double num = mu == 0 ? 2.0 * pt.t : -2.0 * pt.x;
    return -detail::inv_4pi * num / s;
}

/// Step of the nested tanh-sinh rules behind the convolutions.
struct ConvolutionRule {
    double step = 1.0 / 32.0;
};

/// Pieces of int K(x - y) w(y) dy from which every propagator kind is built:
/// the Hadamard part (plus the state correction) and the integrals of w over
/// the future and past cones of x.
struct ConvolutionParts {
    double hadamard = 0.0;
    double future = 0.0;
    double past = 0.0;
};

inline complex combine(PropagatorKind kind, const ConvolutionParts& c)
{
    const complex I = detail::I;
    switch (kind) {
    case PropagatorKind::Retarded: return -0.5 * c.future;
    case PropagatorKind::Advanced: return -0.5 * c.past;
    case PropagatorKind::Causal: return -0.5 * c.future + 0.5 * c.past;
    case PropagatorKind::Dirac: return -0.25 * (c.future + c.past);
    case PropagatorKind::HadamardH: return c.hadamard;
    case PropagatorKind::TwoPointW: return c.hadamard - 0.25 * I * c.future + 0.25 * I * c.past;
    case PropagatorKind::Feynman: return c.hadamard - 0.25 * I * (c.future + c.past);
    case PropagatorKind::AntiFeynman: return c.hadamard + 0.25 * I * (c.future + c.past);
    }
    return 0.0;
}

namespace detail {

/// Rule on [lo, hi] with a breakpoint at 0 when it lies inside.
inline QuadratureRule split_rule(double lo, double hi, const ConvolutionRule& rule)
{
    if (lo < 0.0 && hi > 0.0) {
        QuadratureRule a = tanh_sinh(lo, 0.0, rule.step);
        const QuadratureRule b = tanh_sinh(0.0, hi, rule.step);
        a.nodes.insert(a.nodes.end(), b.nodes.begin(), b.nodes.end());
        a.weights.insert(a.weights.end(), b.weights.begin(), b.weights.end());
        return a;
    }
    return tanh_sinh(lo, hi, rule.step);
}

/// Parts of int K(x - y) w(y) dy for w supported in the box of `box`, in
/// light-cone coordinates (u, v) of d = x - y: the v integral runs over the
/// exact slice of the box, and both levels break at the null lines u, v = 0.
template <class W>
ConvolutionParts convolution_parts(W&& w, const CutoffFunction& box, SpacetimePoint x,
                                   const SmoothStateCorrection& corr, const ConvolutionRule& rule)
{
    const SpacetimePoint c = box.center();
    const double r = box.radius();
    const double du = x.u() - c.u();
    const QuadratureRule ru = split_rule(du - 2.0 * r, du + 2.0 * r, rule);
    ConvolutionParts out;
    for (std::size_t i = 0; i < ru.size(); ++i) {
        const double ud = ru.nodes[i];
        const double yu = x.u() - ud;
        // y_v range from |y_t - c_t| < r and |y_x - c_x| < r
        const double yv_lo = std::max(2.0 * (c.t - r) - yu, 2.0 * (c.x - r) + yu);
        const double yv_hi = std::min(2.0 * (c.t + r) - yu, 2.0 * (c.x + r) + yu);
        if (!(yv_hi > yv_lo)) {
            continue;
        }
        const double lu = std::log(std::abs(ud));
        const QuadratureRule rv = split_rule(x.v() - yv_hi, x.v() - yv_lo, rule);
        for (std::size_t j = 0; j < rv.size(); ++j) {
            const double vd = rv.nodes[j];
            const SpacetimePoint y{x.t - 0.5 * (ud + vd), x.x - 0.5 * (vd - ud)};
            const double val = w(y);
            if (val == 0.0) {
                continue;
            }
            // dt dx = du dv / 2
            const double wt = 0.5 * ru.weights[i] * rv.weights[j] * val;
            double h = -inv_4pi * (lu + std::log(std::abs(vd)));
            if (!corr.is_none()) {
                h += corr(x, y);
            }
            out.hadamard += h * wt;
            if (ud > 0.0 && vd > 0.0) {
                out.future += wt;
            } else if (ud < 0.0 && vd < 0.0) {
                out.past += wt;
            }
        }
    }
    return out;
}

/// Weight w with int K(x - y) w(y) dy = c_K(x), where the insertion of the
/// observable F into a time-ordered product of vertices V_ai(xi) multiplies
/// the kernel by F(phi) - i hbar sum_i ai c_K(xi).
/// Current: F = int f d_mu phi, w = d_mu f. Field: F = int f phi, w = -f.
inline double observable_weight(const CurrentObservable& obs, SpacetimePoint y)
{
    return obs.field_mode == FieldMode::Current ? obs.f.gradient(obs.mu, y) : -obs.f(y);
}

} // namespace detail

/// (K * d_mu f)(x) = (d_mu K * f)(x) in the sense of distributions. Computed
/// as K * d_mu f, which keeps the contribution of the jump of the theta
/// factors across the cone. The result is cross-checked against a rule with half the step.
inline complex smooth_convolution(PropagatorKind kind, int mu, const CutoffFunction& f, SpacetimePoint x,
                                  const ConvolutionRule& rule = {})
{
    if (mu != 0 && mu != 1) {
        throw ParameterError("smooth_convolution: mu must be 0 or 1");
    }
    const auto w = [&](SpacetimePoint y) { return f.gradient(mu, y); };
    const auto none = SmoothStateCorrection::none();
    const complex fine = combine(kind, detail::convolution_parts(w, f, x, none, rule));
    const ConvolutionRule finer_rule{0.5 * rule.step};
    const complex finer = combine(kind, detail::convolution_parts(w, f, x, none, finer_rule));
    const double scale = f.sup_norm() * f.radius() * (1.0 + std::abs(std::log(f.radius())));
    if (!std::isfinite(std::abs(fine)) || std::abs(fine - finer) > 1e-7 * scale + 1e-6 * std::abs(fine)) {
        throw QuadratureFailure("smooth_convolution: refinement did not settle");
    }
    return fine;
}

/// Tensor Chebyshev interpolant of the convolution parts over the support
/// box of g, so that Monte Carlo samples avoid a quadrature per point.
class ConvolutionTable {
public:
    ConvolutionTable(const CurrentObservable& obs, const CutoffFunction& g, const SmoothStateCorrection& corr,
                     int nodes = 20, const ConvolutionRule& rule = {})
        : g_(g), n_(nodes)
    {
        obs.validate();
        if (nodes < 2) {
            throw ParameterError("convolution table needs at least 2 nodes");
        }
        const double pi = std::numbers::pi;
        for (int k = 0; k < n_; ++k) {
            const double angle = (2.0 * k + 1.0) * pi / (2.0 * n_);
            cheb_.push_back(std::cos(angle));
            bary_.push_back((k % 2 == 0 ? 1.0 : -1.0) * std::sin(angle));
        }
        values_.resize(static_cast<std::size_t>(n_) * n_);
        const auto w = [&](SpacetimePoint y) { return detail::observable_weight(obs, y); };
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                const SpacetimePoint x{g.center().t + g.radius() * cheb_[i], g.center().x + g.radius() * cheb_[j]};
                values_[i * n_ + j] = detail::convolution_parts(w, obs.f, x, corr, rule);
            }
        }
    }

    ConvolutionParts operator()(SpacetimePoint x) const
    {
        const double st = (x.t - g_.center().t) / g_.radius();
        const double sx = (x.x - g_.center().x) / g_.radius();
        double ct[64];
        double cx[64];
        weights(st, ct);
        weights(sx, cx);
        ConvolutionParts out;
        for (int i = 0; i < n_; ++i) {
            if (ct[i] == 0.0) {
                continue;
            }
            for (int j = 0; j < n_; ++j) {
                const double w = ct[i] * cx[j];
                const ConvolutionParts& v = values_[i * n_ + j];
                out.hadamard += w * v.hadamard;
                out.future += w * v.future;
                out.past += w * v.past;
            }
        }
        return out;
    }

    complex operator()(PropagatorKind kind, SpacetimePoint x) const { return combine(kind, (*this)(x)); }

    /// max over the interpolation nodes of |c_F| and |c_W|
    double sup_estimate() const
    {
        double s = 0.0;
        for (const auto& v : values_) {
            s = std::max({s, std::abs(combine(PropagatorKind::Feynman, v)),
                          std::abs(combine(PropagatorKind::TwoPointW, v))});
        }
        return s;
    }

private:
    // normalized barycentric weights for the first-kind Chebyshev nodes
    void weights(double s, double* out) const
    {
        if (n_ > 64) {
            throw ParameterError("convolution table: at most 64 nodes per direction");
        }
        double sum = 0.0;
        for (int k = 0; k < n_; ++k) {
            const double d = s - cheb_[k];
            if (d == 0.0) {
                std::fill(out, out + n_, 0.0);
                out[k] = 1.0;
                return;
            }
            out[k] = bary_[k] / d;
            sum += out[k];
        }
        for (int k = 0; k < n_; ++k) {
            out[k] /= sum;
        }
    }

    CutoffFunction g_;
    int n_;
    std::vector<double> cheb_;
    std::vector<double> bary_;
    std::vector<ConvolutionParts> values_;
};

/// F(phi): int f d_mu phi (current) or int f phi (field), by Gauss-Legendre on the box of f.
inline double observable_value(const CurrentObservable& obs, const FieldConfiguration& phi, int nodes = 64)
{
    obs.validate();
    if (phi.is_zero()) {
        return 0.0;
    }
    const QuadratureRule rt = gauss_legendre(nodes, obs.f.t_min(), obs.f.t_max());
    const QuadratureRule rx = gauss_legendre(nodes, obs.f.x_min(), obs.f.x_max());
    double s = 0.0;
    for (std::size_t i = 0; i < rt.size(); ++i) {
        for (std::size_t j = 0; j < rx.size(); ++j) {
            const SpacetimePoint y{rt.nodes[i], rx.nodes[j]};
            const double p = obs.field_mode == FieldMode::Current ? phi.derivative(obs.mu, y) : phi(y);
            s += rt.weights[i] * rx.weights[j] * obs.f(y) * p;
        }
    }
    return s;
}

namespace detail {

/// Per-configuration evaluation of the Bogoliubov sums
///   sum_charges sum_{S subset [n]} (-1)^|S| K_S(x) * bracket_S(x)
/// where S is the antichronological block, K_S carries Delta^AF pairs inside
/// S, Delta^F pairs inside the complement and W(x_left - x_right) pairs
/// across, and bracket_S = F(phi) - i hbar (sum_{S} ai c_W(xi) + sum_{S^c} aj c_F(xj)).
class BogoliubovIntegrand {
public:
    enum class Mode { Retarded, Unitarity };

    BogoliubovIntegrand(int n, const CutoffFunction& g, const FieldConfiguration& phi, const ModelParams& params,
                        const StateModel& state, const ConvolutionTable* table, double F0, Mode mode)
        : n_(n), g_(g), phi_(phi), params_(params), state_(state), table_(table), F0_(F0), mode_(mode)
    {
    }

    /// Sum over charges and blocks at one configuration, times prod g(xi).
    /// `terms` (if given) receives the number of (charges, block) pairs visited.
    std::optional<Split> operator()(std::span<const SpacetimePoint> pts, std::uint64_t* terms = nullptr) const
    {
        const int n = n_;
        const double a = params_.a();
        const double hbar = params_.hbar();
        double weight = 1.0;
        for (int i = 0; i < n; ++i) {
            weight *= g_(pts[i]);
        }
        if (weight == 0.0 && terms == nullptr) {
            return Split{};
        }
        struct Pair {
            int i, j;
            double log_sep;
            int causal; // +1: xi later than xj, -1: earlier, 0: spacelike
            double v;
            complex kf, kw_ij, kw_ji;
        };
        Pair pairs[28];
        int np = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const SpacetimePoint d = pts[i] - pts[j];
                const double u = d.u();
                const double v = d.v();
                if (u == 0.0 || v == 0.0) {
                    return std::nullopt;
                }
                Pair p{i, j, std::log(std::abs(u)) + std::log(std::abs(v)), 0, 0.0, {}, {}, {}};
                if (u * v > 0.0) {
                    p.causal = d.t > 0.0 ? 1 : -1;
                }
                if (!state_.v.is_none()) {
                    p.v = state_.v(pts[i], pts[j]);
                }
                if (state_.mass) {
                    const double m = state_.mass->m;
                    p.kf = bessel_k0(m * feynman_branch(d));
                    p.kw_ij = bessel_k0(m * two_point_branch(d));
                    p.kw_ji = bessel_k0(m * two_point_branch(-d));
                }
                pairs[np++] = p;
            }
        }
        double phis[8];
        double vself[8];
        complex cf[8];
        complex cw[8];
        for (int i = 0; i < n; ++i) {
            phis[i] = phi_(pts[i]);
            vself[i] = state_.v.is_none() ? 0.0 : state_.v(pts[i], pts[i]);
            if (table_ != nullptr) {
                const ConvolutionParts parts = (*table_)(pts[i]);
                cf[i] = combine(PropagatorKind::Feynman, parts);
                cw[i] = combine(PropagatorKind::TwoPointW, parts);
            }
        }
        const double a2 = a * a;
        double self_log = 0.0;
        for (int i = 0; i < n; ++i) {
            self_log -= 0.5 * hbar * a2 * vself[i];
        }
        if (state_.mass) {
            self_log += n * hbar * inv_4pi * a2 * std::log(state_.mass->m);
        }
        const double quarter = 0.25 * hbar;
        const double two_pi = 2.0 * std::numbers::pi;

        complex total = 0.0;
        complex jpart = 0.0;
        std::uint64_t count = 0;
        const unsigned full = 1u << n;
        for (unsigned cm = 0; cm < full; ++cm) {
            double q[8];
            double phase = 0.0;
            for (int i = 0; i < n; ++i) {
                q[i] = (cm >> i) & 1u ? a : -a;
                phase += q[i] * phis[i];
            }
            for (unsigned S = 0; S < full; ++S) {
                ++count;
                complex lg{self_log, phase};
                for (int k = 0; k < np; ++k) {
                    const Pair& p = pairs[k];
                    const double s = q[p.i] * q[p.j];
                    const bool li = (S >> p.i) & 1u;
                    const bool lj = (S >> p.j) & 1u;
                    if (state_.mass) {
                        complex kk;
                        if (li && lj) {
                            kk = std::conj(p.kf);
                        } else if (!li && !lj) {
                            kk = p.kf;
                        } else {
                            kk = li ? p.kw_ij : p.kw_ji;
                        }
                        lg -= hbar * s * kk / two_pi;
                    } else {
                        int sign;
                        if (li && lj) {
                            sign = -(p.causal != 0);
                        } else if (!li && !lj) {
                            sign = p.causal != 0;
                        } else {
                            sign = li ? p.causal : -p.causal;
                        }
                        lg += complex{s * hbar * inv_4pi * p.log_sep, s * quarter * sign};
                    }
                    lg -= hbar * s * p.v;
                }
                const complex K = (std::popcount(S) % 2 == 0 ? 1.0 : -1.0) * std::exp(lg);
                if (mode_ == Mode::Unitarity) {
                    total += K;
                    continue;
                }
                complex cj = F0_;
                complex cm_ins = 0.0;
                for (int i = 0; i < n; ++i) {
                    if ((S >> i) & 1u) {
                        cj -= I * hbar * q[i] * cw[i];
                    } else {
                        cm_ins -= I * hbar * q[i] * cf[i];
                    }
                }
                jpart += K * cj;
                total += K * (cj + cm_ins);
            }
        }
        if (terms != nullptr) {
            *terms = count;
        }
        if (mode_ == Mode::Unitarity) {
            jpart = total;
        }
        return Split{total * weight, jpart * weight};
    }

private:
    int n_;
    const CutoffFunction& g_;
    const FieldConfiguration& phi_;
    const ModelParams& params_;
    const StateModel& state_;
    const ConvolutionTable* table_;
    double F0_;
    Mode mode_;
};

/// (i / hbar)^n / 2^n
inline complex bogoliubov_prefactor(int n, double hbar)
{
    return std::pow(I / hbar, n) * std::pow(0.5, n);
}

inline void check_hits(const Estimate& e, const IntegrationSpec& spec, const char* what)
{
    if (spec.method != IntegrationMethod::Tensor && static_cast<double>(e.resamples) > 1e-4 * spec.samples) {
        throw SingularHitBudgetExceeded(std::string(what) + ": too many resampled cone hits");
    }
}

inline void require_mode(const CurrentObservable& obs, const StateModel& state)
{
    obs.validate();
    state.validate();
    if (obs.field_mode == FieldMode::Field && state.mass_limit()) {
        throw FieldModeError("the field Phi(f) has no massless limit; use the current or a Hadamard state");
    }
}

} // namespace detail

/// The two terms of T_{l+1}(V^l, F) at phi:
/// (i) T_l(V^l) F(phi), (ii) T_l(V^l) with -i hbar sum_j aj c_F(xj) inserted.
inline std::pair<complex, complex> t_with_current(int l, const CutoffFunction& g, const CurrentObservable& current,
                                                  const FieldConfiguration& phi, const ModelParams& params,
                                                  const IntegrationSpec& spec, const StateModel& state = {})
{
    detail::require_mode(current, state);
    if (l < 0) {
        throw ParameterError("t_with_current: l must be >= 0");
    }
    const double F0 = observable_value(current, phi);
    if (l == 0) {
        return {F0, 0.0};
    }
    spec.validate(l);
    const ConvolutionTable table(current, g, state.v);
    const double a = params.a();
    const double hbar = params.hbar();
    const auto integrand = [&](std::span<const SpacetimePoint> pts) -> std::optional<Split> {
        double weight = 1.0;
        for (const auto& p : pts) {
            weight *= g(p);
        }
        complex first = 0.0;
        complex second = 0.0;
        const unsigned full = 1u << l;
        std::vector<double> q(l);
        for (unsigned cm = 0; cm < full; ++cm) {
            for (int i = 0; i < l; ++i) {
                q[i] = (cm >> i) & 1u ? a : -a;
            }
            const ChargeList charges(a, q);
            complex K;
            try {
                K = state.mass ? massive_tn_kernel(charges, pts, phi, params, *state.mass)
                               : tn_kernel(charges, pts, phi, params, state.v);
            } catch (const OnConeError&) {
                return std::nullopt;
            }
            complex ins = 0.0;
            for (int i = 0; i < l; ++i) {
                ins -= detail::I * hbar * q[i] * table(PropagatorKind::Feynman, pts[i]);
            }
            first += K * F0;
            second += K * ins;
        }
        return Split{(first + second) * weight, first * weight};
    };
    const Estimate e = detail::integrate_points(l, g, spec, detail::stream_id(5, l, 0), integrand,
                                                detail::proposal_power(params.beta()));
    detail::check_hits(e, spec, "t_with_current");
    const double pre = std::pow(0.5, l);
    return {e.part * pre, (e.value - e.part) * pre};
}

/// R_n = (i/hbar)^n sum_k C(n,k) (-1)^k antiT_k(V^k) * T_{n-k+1}(V^{n-k}, F), evaluated at phi.
inline RetardedOrder retarded_product(int n, const CutoffFunction& g, const CurrentObservable& current,
                                      const FieldConfiguration& phi, const ModelParams& params,
                                      const IntegrationSpec& spec, const StateModel& state = {},
                                      const ConvolutionTable* table = nullptr)
{
    detail::require_mode(current, state);
    if (n < 0) {
        throw ParameterError("retarded_product: n must be >= 0");
    }
    const double F0 = observable_value(current, phi);
    RetardedOrder out;
    out.n = n;
    if (n == 0) {
        out.j_part = F0;
        out.total = F0;
        out.terms = 1;
        return out;
    }
    spec.validate(n);
    std::optional<ConvolutionTable> own;
    if (table == nullptr) {
        own.emplace(current, g, state.v);
        table = &*own;
    }
    const detail::BogoliubovIntegrand integrand(n, g, phi, params, state, table, F0,
                                                detail::BogoliubovIntegrand::Mode::Retarded);
    const Estimate e = detail::integrate_points(
        n, g, spec, detail::stream_id(3, n, 0), [&](std::span<const SpacetimePoint> pts) { return integrand(pts); },
        detail::proposal_power(params.beta()));
    detail::check_hits(e, spec, "retarded_product");
    const complex pre = detail::bogoliubov_prefactor(n, params.hbar());
    out.total = pre * e.value;
    out.j_part = pre * e.part;
    out.m_part = out.total - out.j_part;
    out.stderr = std::abs(pre) * e.stderr;
    out.terms = std::uint64_t{1} << (2 * n);
    return out;
}

/// Order-lambda coefficient of -i hbar d/dt S(lambda V)^{-1} * S(lambda V + tF) at t = 0,
/// from a central difference in t of the exponential generating functional:
/// T(V_a(x) e^{itF/hbar}) = V_a(x) e^{itF/hbar} e^{t a c_F(x)} and
/// V_a(x) * e^{itF/hbar} = V_a(x) e^{itF/hbar} e^{t a c_W(x)}, up to the
/// common F-F self pairing, which is 1 + O(t^2).
/// Shares the sample stream of retarded_product(1, ...).
inline complex bogoliubov_difference_first_order(const CutoffFunction& g, const CurrentObservable& current,
                                                 const FieldConfiguration& phi, const ModelParams& params,
                                                 const IntegrationSpec& spec, double step = 1e-4,
                                                 const StateModel& state = {},
                                                 const ConvolutionTable* table = nullptr)
{
    detail::require_mode(current, state);
    if (state.mass_limit()) {
        throw ParameterError("the difference check runs in the massless state only");
    }
    spec.validate(1);
    std::optional<ConvolutionTable> own;
    if (table == nullptr) {
        own.emplace(current, g, state.v);
        table = &*own;
    }
    const double F0 = observable_value(current, phi);
    const double a = params.a();
    const double hbar = params.hbar();
    // G(t) / (i lambda / hbar)
    auto G = [&](double t) {
        const auto integrand = [&](std::span<const SpacetimePoint> pts) -> std::optional<complex> {
            const SpacetimePoint x = pts[0];
            const ConvolutionParts parts = (*table)(x);
            const complex cf = combine(PropagatorKind::Feynman, parts);
            const complex cw = combine(PropagatorKind::TwoPointW, parts);
            const double vs = state.v.is_none() ? 0.0 : state.v(x, x);
            complex s = 0.0;
            for (double q : {a, -a}) {
                const complex vertex = std::exp(complex{-0.5 * hbar * q * q * vs, q * phi(x)});
                s += vertex * (std::exp(t * q * cf) - std::exp(t * q * cw));
            }
            return 0.5 * g(x) * s * std::exp(detail::I * t * F0 / hbar);
        };
        const Estimate e = detail::integrate_points(1, g, spec, detail::stream_id(3, 1, 0), integrand);
        return e.value;
    };
    const complex dG = (G(step) - G(-step)) / (2.0 * step);
    // -i hbar * (i / hbar) * dG
    return dG;
}

struct UnitarityCheck {
    double residual = 0.0;
    double stderr = 0.0;
};

/// |(truncated S^{-1}) * (truncated S) - 1| through order lambda^N.
inline UnitarityCheck unitarity_check(int N, const CutoffFunction& g, const FieldConfiguration& phi,
                                      const ModelParams& params, const IntegrationSpec& spec,
                                      const StateModel& state = {})
{
    state.validate();
    if (N < 1) {
        throw ParameterError("unitarity_check: N must be >= 1");
    }
    UnitarityCheck out;
    if (params.lambda() == 0.0) {
        return out;
    }
    complex sum = 0.0;
    double var = 0.0;
    for (int n = 1; n <= N; ++n) {
        spec.validate(n);
        const detail::BogoliubovIntegrand integrand(n, g, phi, params, state, nullptr, 0.0,
                                                    detail::BogoliubovIntegrand::Mode::Unitarity);
        const Estimate e = detail::integrate_points(
            n, g, spec, detail::stream_id(4, n, 0),
            [&](std::span<const SpacetimePoint> pts) { return integrand(pts); }, detail::proposal_power(params.beta()));
        detail::check_hits(e, spec, "unitarity_check");
        const double scale = std::pow(params.lambda(), n) / std::exp(detail::log_factorial(n));
        const complex pre = detail::bogoliubov_prefactor(n, params.hbar()) * scale;
        sum += pre * e.value;
        var += std::norm(std::abs(pre) * e.stderr);
    }
    out.residual = std::abs(sum);
    out.stderr = std::sqrt(var);
    return out;
}

/// Partial sums of F_int = sum_n lambda^n / n! R_n, plus the per-order split.
struct CurrentReport : ConvergenceReport {
    /// lambda^n / n! times R_n, J_n, M_n
    std::vector<RetardedOrder> retarded;
};

namespace detail {

/// Masses of the mass-limit scan.
inline constexpr double mass_scan[3] = {1e-2, 1e-3, 1e-4};

/// Value at m = 0 of the least-squares line A + B m^e through the scan.
inline complex extrapolate_mass(const complex (&vals)[3], double e)
{
    double xs[3];
    double mx = 0.0;
    complex my = 0.0;
    for (int i = 0; i < 3; ++i) {
        xs[i] = std::pow(mass_scan[i], e);
        mx += xs[i] / 3.0;
        my += vals[i] / 3.0;
    }
    double sxx = 0.0;
    complex sxy = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (vals[i] - my);
    }
    const complex slope = sxx > 0.0 ? sxy / sxx : complex{};
    return my - slope * mx;
}

} // namespace detail

/// Interacting current through order N. In the mass-limit mode every order
/// is computed at m = 1e-2, 1e-3, 1e-4 and extrapolated linearly in
/// m^e, e the smallest positive neutrality exponent at that order.
inline CurrentReport current_series(int N, const CutoffFunction& g, const CurrentObservable& current,
                                    const FieldConfiguration& phi, const ModelParams& params,
                                    const IntegrationSpec& spec, const StateModel& state = {})
{
    detail::require_mode(current, state);
    if (N < 0 || N > spec.max_order) {
        throw ParameterError("current_series: order " + std::to_string(N) + " exceeds max_order " +
                             std::to_string(spec.max_order));
    }
    const ConvolutionTable table(current, g, state.v);
    const double F0 = observable_value(current, phi);
    const double csup = table.sup_estimate();
    const double lambda = params.lambda();
    std::vector<OrderResult> orders;
    CurrentReport rep;
    for (int n = 0; n <= N; ++n) {
        RetardedOrder r;
        r.n = n;
        if (n == 0) {
            r = retarded_product(0, g, current, phi, params, spec, state, &table);
        } else if (lambda != 0.0) {
            if (state.mass_limit()) {
                complex tot[3];
                complex jp[3];
                double err = 0.0;
                for (int i = 0; i < 3; ++i) {
                    StateModel s = state;
                    s.mass->m = detail::mass_scan[i];
                    const RetardedOrder ri = retarded_product(n, g, current, phi, params, spec, s, &table);
                    tot[i] = ri.total;
                    jp[i] = ri.j_part;
                    err = std::max(err, ri.stderr);
                    r.terms = ri.terms;
                }
                const double e = params.beta() * (n % 2 == 1 ? 1.0 : 4.0);
                r.total = detail::extrapolate_mass(tot, e);
                r.j_part = detail::extrapolate_mass(jp, e);
                r.m_part = r.total - r.j_part;
                r.stderr = err;
            } else {
                r = retarded_product(n, g, current, phi, params, spec, state, &table);
            }
        }
        const double scale = std::pow(lambda, n) / std::exp(detail::log_factorial(n));
        r.total *= scale;
        r.j_part *= scale;
        r.m_part *= scale;
        r.stderr *= scale;
        OrderResult o;
        o.n = n;
        o.total = r.total;
        o.stderr = r.stderr;
        o.bound = n == 0 ? std::abs(F0)
                         : std::pow(2.0, n) * explicit_bound(n, g, params) *
                               (std::abs(F0) + params.hbar() * std::abs(params.a()) * n * csup);
        orders.push_back(o);
        rep.retarded.push_back(r);
    }
    const BoundConstants consts = estimate_constants(g, params);
    ConvergenceReport base = detail::assemble(std::move(orders), params, consts.C);
    static_cast<ConvergenceReport&>(rep) = std::move(base);
    return rep;
}

} // namespace sgpt

#pragma once

#include "sgpt/errors.hpp"
#include "sgpt/spacetime.hpp"

#include <cmath>
#include <cstdlib>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sgpt {

/// Light-cone coordinates of n points, the first k of which carry charge +a:
/// z = t - x, z' = t + x for those, w = t - x, w' = t + x for the rest.
struct LightconeCoords {
    std::vector<double> z;
    std::vector<double> w;
    std::vector<double> zp;
    std::vector<double> wp;

    std::size_t k() const noexcept { return z.size(); }
    std::size_t n() const noexcept { return z.size() + w.size(); }
};

inline LightconeCoords to_lightcone(std::span<const SpacetimePoint> points, int k)
{
    if (k < 0 || static_cast<std::size_t>(k) > points.size()) {
        throw IndexError("to_lightcone: k = " + std::to_string(k) + " outside [0, " +
                         std::to_string(points.size()) + "]");
    }
    LightconeCoords lc;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const bool plus = i < static_cast<std::size_t>(k);
        (plus ? lc.z : lc.w).push_back(points[i].u());
        (plus ? lc.zp : lc.wp).push_back(points[i].v());
    }
    return lc;
}

inline std::vector<SpacetimePoint> from_lightcone(const LightconeCoords& lc)
{
    std::vector<SpacetimePoint> pts;
    auto add = [&](double u, double v) { pts.push_back({0.5 * (u + v), 0.5 * (v - u)}); };
    for (std::size_t i = 0; i < lc.z.size(); ++i) {
        add(lc.z[i], lc.zp[i]);
    }
    for (std::size_t i = 0; i < lc.w.size(); ++i) {
        add(lc.w[i], lc.wp[i]);
    }
    return pts;
}

enum class ConeSign { Minus, Plus };

/// prod_{i<j} |zi - zj|^beta prod_{i<j} |wi - wj|^beta prod_{i,j} |zi - wj|^{-beta}
inline double w_factor(std::span<const double> z, std::span<const double> w, double beta)
{
    double lg = 0.0;
    auto add = [&](double d, double sign) {
        if (d == 0.0) {
            throw CoincidentPointError("w_factor: coincident light-cone coordinates");
        }
        lg += sign * beta * std::log(std::abs(d));
    };
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            add(z[i] - z[j], 1.0);
        }
        for (double wj : w) {
            add(z[i] - wj, -1.0);
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = i + 1; j < w.size(); ++j) {
            add(w[i] - w[j], 1.0);
        }
    }
    return std::exp(lg);
}

inline double w_factor(ConeSign sign, const LightconeCoords& lc, double beta)
{
    return sign == ConeSign::Minus ? w_factor(lc.z, lc.w, beta) : w_factor(lc.zp, lc.wp, beta);
}

/// l x l matrix (l = number of w's): the first l - k rows are w_j^{i-1}, the
/// remaining k rows are 1 / (z_i - w_j).
struct CVMatrix {
    std::size_t l = 0;
    std::vector<double> z;
    std::vector<double> w;
    std::vector<double> entries; // row major

    std::size_t k() const noexcept { return z.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries[i * l + j]; }
};

inline CVMatrix build_cv_matrix(std::span<const double> z, std::span<const double> w)
{
    if (z.size() > w.size()) {
        throw ShapeError("build_cv_matrix: need k <= n - k; swap the roles of z and w");
    }
    if (w.empty()) {
        throw ShapeError("build_cv_matrix: empty matrix");
    }
    CVMatrix d;
    d.l = w.size();
    d.z.assign(z.begin(), z.end());
    d.w.assign(w.begin(), w.end());
    d.entries.resize(d.l * d.l);
    const std::size_t m = d.l - z.size();
    for (std::size_t j = 0; j < d.l; ++j) {
        double power = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            d.entries[i * d.l + j] = power;
            power *= w[j];
        }
        for (std::size_t i = m; i < d.l; ++i) {
            const double diff = z[i - m] - w[j];
            if (diff == 0.0) {
                throw CoincidentPointError("build_cv_matrix: z_i = w_j");
            }
            d.entries[i * d.l + j] = 1.0 / diff;
        }
    }
    return d;
}

/// Determinant by Gaussian elimination with partial pivoting in long double,
/// with the entries rebuilt from z and w in long double.
inline double det_exact(const CVMatrix& d)
{
    const std::size_t n = d.l;
    std::vector<long double> a(d.entries.begin(), d.entries.end());
    const std::size_t m = n - d.k();
    for (std::size_t j = 0; j < n; ++j) {
        long double power = 1.0L;
        for (std::size_t i = 0; i < m; ++i) {
            a[i * n + j] = power;
            power *= d.w[j];
        }
        for (std::size_t i = m; i < n; ++i) {
            a[i * n + j] = 1.0L / (static_cast<long double>(d.z[i - m]) - d.w[j]);
        }
    }
    long double det = 1.0L;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) {
                piv = r;
            }
        }
        if (a[piv * n + c] == 0.0L) {
            return 0.0;
        }
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a[c * n + j], a[piv * n + j]);
            }
            det = -det;
        }
        const long double p = a[c * n + c];
        det *= p;
        for (std::size_t r = c + 1; r < n; ++r) {
            const long double f = a[r * n + c] / p;
            if (f == 0.0L) {
                continue;
            }
            for (std::size_t j = c; j < n; ++j) {
                a[r * n + j] -= f * a[c * n + j];
            }
        }
    }
    return static_cast<double>(det);
}

namespace detail {

inline long double vandermonde_det_ld(std::span<const double> u)
{
    long double p = 1.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            p *= static_cast<long double>(u[j]) - u[i];
        }
    }
    return p;
}

inline long double cauchy_det_ld(std::span<const double> z, std::span<const double> wt)
{
    if (z.size() != wt.size()) {
        throw ShapeError("cauchy_det: z and wt differ in length");
    }
    long double num = 1.0L;
    long double den = 1.0L;
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            num *= (static_cast<long double>(z[i]) - z[j]) * (static_cast<long double>(wt[j]) - wt[i]);
        }
        for (std::size_t j = 0; j < wt.size(); ++j) {
            const long double diff = static_cast<long double>(z[i]) - wt[j];
            if (diff == 0.0L) {
                throw CoincidentPointError("cauchy_det: z_i = wt_j");
            }
            den *= diff;
        }
    }
    return num / den;
}

} // namespace detail

/// prod_{i<j} (u_j - u_i)
inline double vandermonde_det(std::span<const double> u)
{
    return static_cast<double>(detail::vandermonde_det_ld(u));
}

/// det [1 / (z_i - wt_j)] = prod_{i<j} (z_i - z_j)(wt_j - wt_i) / prod_{i,j} (z_i - wt_j)
inline double cauchy_det(std::span<const double> z, std::span<const double> wt)
{
    return static_cast<double>(detail::cauchy_det_ld(z, wt));
}

/// Strictly increasing 1-based column indices c, with complement c'.
struct ColumnChoice {
    std::vector<int> c;
    std::vector<int> complement;

    int weight() const noexcept
    {
        int s = 0;
        for (int v : c) {
            s += v;
        }
        return s;
    }
};

/// All choices of `m` columns out of `l`, in lexicographic order.
inline std::vector<ColumnChoice> column_choices(int l, int m)
{
    std::vector<ColumnChoice> out;
    if (m < 0 || m > l) {
        return out;
    }
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) {
        idx[i] = i + 1;
    }
    while (true) {
        ColumnChoice cc;
        cc.c = idx;
        std::size_t p = 0;
        for (int j = 1; j <= l; ++j) {
            if (p < idx.size() && idx[p] == j) {
                ++p;
            } else {
                cc.complement.push_back(j);
            }
        }
        out.push_back(std::move(cc));
        int i = m - 1;
        while (i >= 0 && idx[i] == l - m + i + 1) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++idx[i];
        for (int j = i + 1; j < m; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

/// Laplace expansion of det D along its l - k monomial rows: each term is a
/// Vandermonde determinant on the chosen columns times a Cauchy determinant
/// on the rest. Carries the row sign (-1)^{m(m+1)/2}, so it equals det_exact.
inline double det_laplace(const CVMatrix& d, int k)
{
    if (k < 0 || static_cast<std::size_t>(k) != d.k() || static_cast<std::size_t>(k) > d.l) {
        throw ShapeError("det_laplace: k does not match the matrix");
    }
    const int l = static_cast<int>(d.l);
    const int m = l - k;
    long double sum = 0.0L;
    std::vector<double> wc;
    std::vector<double> wr;
    for (const ColumnChoice& cc : column_choices(l, m)) {
        wc.clear();
        wr.clear();
        for (int j : cc.c) {
            wc.push_back(d.w[j - 1]);
        }
        for (int j : cc.complement) {
            wr.push_back(d.w[j - 1]);
        }
        const long double term = detail::vandermonde_det_ld(wc) * detail::cauchy_det_ld(d.z, wr);
        sum += cc.weight() % 2 == 0 ? term : -term;
    }
    const int row_sign = (m * (m + 1) / 2) % 2 == 0 ? 1 : -1;
    return static_cast<double>(row_sign * sum);
}

/// (|det D(z, w)|^beta, w^-_{n,k}(z, w)); the two agree for k <= n - k.
inline std::pair<double, double> verify_lemma(std::span<const double> z, std::span<const double> w, double beta)
{
    const CVMatrix d = build_cv_matrix(z, w);
    return {std::pow(std::abs(det_exact(d)), beta), w_factor(z, w, beta)};
}

} // namespace sgpt

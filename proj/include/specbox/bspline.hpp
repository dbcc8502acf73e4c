#pragma once

// B-spline basis on a finite interval: knot construction, stable evaluation
// (values and first derivatives), and per-interval Gauss-Legendre quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "specbox/errors.hpp"

namespace specbox {

inline constexpr int max_spline_order = 24;

struct KnotVector {
    int order = 0;              // k >= 2; polynomial degree is k-1
    std::vector<double> knots;  // size num_splines + order, endpoints repeated k times

    int num_splines() const { return static_cast<int>(knots.size()) - order; }
    int num_intervals() const { return num_splines() - order + 1; }
    double a() const { return knots.front(); }
    double b() const { return knots.back(); }

    // breakpoints (distinct knots)
    std::vector<double> breakpoints() const {
        std::vector<double> br;
        br.push_back(knots[order - 1]);
        for (int i = order; i <= num_splines(); ++i)
            if (knots[i] > br.back()) br.push_back(knots[i]);
        return br;
    }
};

// Uniform interior breakpoints, endpoint multiplicity k.
inline KnotVector build_knots(int n_splines, int k, double a, double b) {
    if (k < 2 || k > max_spline_order)
        throw ConfigError("spline order must be in [2, " + std::to_string(max_spline_order) +
                          "], got " + std::to_string(k));
    if (n_splines < k)
        throw ConfigError("underdetermined basis: n_splines=" + std::to_string(n_splines) +
                          " < order k=" + std::to_string(k));
    if (!(b > a)) throw ConfigError("empty knot domain");

    const int nbreak = n_splines - k + 2;
    KnotVector kv;
    kv.order = k;
    kv.knots.reserve(static_cast<size_t>(n_splines + k));
    for (int i = 0; i < k - 1; ++i) kv.knots.push_back(a);
    for (int i = 0; i < nbreak; ++i)
        kv.knots.push_back(a + (b - a) * static_cast<double>(i) / (nbreak - 1));
    for (int i = 0; i < k - 1; ++i) kv.knots.push_back(b);
    kv.knots.front() = a;
    kv.knots[static_cast<size_t>(k - 1 + nbreak - 1)] = b;  // exact endpoints
    return kv;
}

// Index s with knots[s] <= x < knots[s+1] over the nonempty spans; x == b maps
// to the last nonempty span.
inline int find_span(const KnotVector& kv, double x) {
    const int k = kv.order;
    const int n = kv.num_splines();
    if (x < kv.a() || x > kv.b()) throw ConfigError("coordinate outside spline domain");
    if (x >= kv.knots[static_cast<size_t>(n)]) return n - 1;
    auto it = std::upper_bound(kv.knots.begin() + k, kv.knots.begin() + n, x);
    return static_cast<int>(it - kv.knots.begin()) - 1;
}

// Values and first derivatives of the k splines active at x.
// Writes into val[0..k) and der[0..k); returns the index of the first
// active spline, i.e. spline (first + j) has value val[j].
inline int eval_splines(const KnotVector& kv, double x, double* val, double* der) {
    const int k = kv.order;
    const int deg = k - 1;
    const int span = find_span(kv, x);
    const double* t = kv.knots.data();

    std::array<double, max_spline_order> left{}, right{}, nlow{};
    val[0] = 1.0;
    for (int j = 1; j <= deg; ++j) {
        left[static_cast<size_t>(j)] = x - t[span + 1 - j];
        right[static_cast<size_t>(j)] = t[span + j] - x;
        if (j == deg)  // keep the degree k-2 row for the derivative
            for (int r = 0; r < j; ++r) nlow[static_cast<size_t>(r)] = val[r];
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = val[r] / (right[static_cast<size_t>(r + 1)] + left[static_cast<size_t>(j - r)]);
            val[r] = saved + right[static_cast<size_t>(r + 1)] * temp;
            saved = left[static_cast<size_t>(j - r)] * temp;
        }
        val[j] = saved;
    }

    // B'_{i,k} = (k-1) [ B_{i,k-1}/(t_{i+k-1}-t_i) - B_{i+1,k-1}/(t_{i+k}-t_{i+1}) ]
    const int first = span - deg;
    for (int r = 0; r <= deg; ++r) {
        const int i = first + r;
        double d = 0.0;
        if (r > 0) {
            const double dt = t[i + deg] - t[i];
            if (dt > 0.0) d += nlow[static_cast<size_t>(r - 1)] / dt;
        }
        if (r < deg) {
            const double dt = t[i + k] - t[i + 1];
            if (dt > 0.0) d -= nlow[static_cast<size_t>(r)] / dt;
        }
        der[r] = deg * d;
    }
    return first;
}

struct SplineValue {
    int index;
    double value;
    double derivative;
};

// Convenience wrapper returning the nonzero splines at x.
inline std::vector<SplineValue> eval_splines(const KnotVector& kv, double x) {
    std::array<double, max_spline_order> v{}, d{};
    const int first = eval_splines(kv, x, v.data(), d.data());
    std::vector<SplineValue> out;
    out.reserve(static_cast<size_t>(kv.order));
    for (int j = 0; j < kv.order; ++j) out.push_back({first + j, v[static_cast<size_t>(j)], d[static_cast<size_t>(j)]});
    return out;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<size_t>(m), 0.0);
    w.assign(static_cast<size_t>(m), 0.0);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
            }
            pp = m * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(m - 1 - i)] = z;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<size_t>(m - 1 - i)] = w[static_cast<size_t>(i)];
    }
}

// Per-interval Gauss-Legendre rule over the breakpoint spans of a knot vector.
struct QuadratureRule {
    int points_per_interval = 0;
    std::vector<double> nodes;    // flattened, interval-major
    std::vector<double> weights;  // positive

    int num_intervals() const {
        return points_per_interval ? static_cast<int>(nodes.size()) / points_per_interval : 0;
    }
};

inline QuadratureRule make_quadrature(const KnotVector& kv, int points_per_interval = 0) {
    const int k = kv.order;
    int m = points_per_interval > 0 ? points_per_interval : k + 1;
    if (m < k)
        throw ConfigError("quadrature needs at least k points per interval");
    std::vector<double> gx, gw;
    gauss_legendre(m, gx, gw);
    const auto br = kv.breakpoints();
    QuadratureRule q;
    q.points_per_interval = m;
    q.nodes.reserve(static_cast<size_t>(m) * (br.size() - 1));
    q.weights.reserve(static_cast<size_t>(m) * (br.size() - 1));
    for (size_t iv = 0; iv + 1 < br.size(); ++iv) {
        const double c = 0.5 * (br[iv] + br[iv + 1]);
        const double h = 0.5 * (br[iv + 1] - br[iv]);
        for (int j = 0; j < m; ++j) {
            q.nodes.push_back(c + h * gx[static_cast<size_t>(j)]);
            q.weights.push_back(h * gw[static_cast<size_t>(j)]);
        }
    }
    return q;
}

} // namespace specbox

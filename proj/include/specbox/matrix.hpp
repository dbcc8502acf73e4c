#pragma once

// Dense and banded matrix containers plus B-spline operator assembly.
// Symmetric banded matrices use LAPACK lower band storage so they can be
// handed to the banded eigensolvers without repacking.

#include <cmath>
#include <functional>
#include <vector>

#include "specbox/bspline.hpp"
#include "specbox/errors.hpp"

namespace specbox {

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    // rectangular slice [r0, r1) x [c0, c1)
    DenseMatrix slice(int r0, int r1, int c0, int c1) const {
        DenseMatrix s(r1 - r0, c1 - c0);
        for (int i = r0; i < r1; ++i)
            for (int j = c0; j < c1; ++j) s(i - r0, j - c0) = (*this)(i, j);
        return s;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// C = A * B (plain loops; the hot propagation path uses its own kernels)
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int l = 0; l < a.cols(); ++l) {
            const double av = a(i, l);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += av * b(l, j);
        }
    return c;
}

inline DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {  // A^T * B
    DenseMatrix c(a.cols(), b.cols());
    for (int l = 0; l < a.rows(); ++l)
        for (int i = 0; i < a.cols(); ++i) {
            const double av = a(l, i);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += av * b(l, j);
        }
    return c;
}

enum class BandKind { symmetric, antisymmetric };

// Lower band storage, column major: entry (i, j), j <= i <= j + kd, lives at
// ab[(i - j) + j*(kd+1)].  Antisymmetric matrices store the lower triangle;
// get() applies the sign.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(int n, int kd, BandKind kind = BandKind::symmetric)
        : n_(n), kd_(kd), kind_(kind), ab_(static_cast<size_t>(kd + 1) * n, 0.0) {}

    int n() const { return n_; }
    int kd() const { return kd_; }
    BandKind kind() const { return kind_; }
    double* data() { return ab_.data(); }
    const double* data() const { return ab_.data(); }
    int ld() const { return kd_ + 1; }

    double& at(int i, int j) {  // lower triangle only
        return ab_[static_cast<size_t>(j) * (kd_ + 1) + (i - j)];
    }
    double get(int i, int j) const {
        if (i < j) {
            const double v = get(j, i);
            return kind_ == BandKind::antisymmetric ? -v : v;
        }
        if (i - j > kd_) return 0.0;
        return ab_[static_cast<size_t>(j) * (kd_ + 1) + (i - j)];
    }

private:
    int n_ = 0, kd_ = 0;
    BandKind kind_ = BandKind::symmetric;
    std::vector<double> ab_;
};

using WeightFn = std::function<double(double)>;

// General weighted pair integral over a spline basis:
//   M(i, j) = sum_q w_q weight(x_q) (d^a B_i)(x_q) (d^b B_j)(x_q)
// Returned dense (n x n); callers trim boundary splines / transform as needed.
inline DenseMatrix assemble_pair(const KnotVector& kv, const QuadratureRule& quad,
                                 const WeightFn& weight, bool deriv_bra, bool deriv_ket) {
    const int n = kv.num_splines();
    const int k = kv.order;
    DenseMatrix m(n, n);
    std::array<double, max_spline_order> v{}, d{};
    for (size_t q = 0; q < quad.nodes.size(); ++q) {
        const double x = quad.nodes[q];
        double wq = quad.weights[q] * (weight ? weight(x) : 1.0);
        if (wq == 0.0) continue;
        if (!std::isfinite(wq))
            throw NumericError("non-finite integrand weight at x=" + std::to_string(x));
        const int first = eval_splines(kv, x, v.data(), d.data());
        const double* bra = deriv_bra ? d.data() : v.data();
        const double* ket = deriv_ket ? d.data() : v.data();
        for (int a = 0; a < k; ++a) {
            const double ba = bra[a] * wq;
            if (ba == 0.0) continue;
            for (int b = 0; b < k; ++b) m(first + a, first + b) += ba * ket[b];
        }
    }
    return m;
}

enum class OperatorKind { overlap, kinetic, potential, first_derivative };

// Banded operator matrix over the full spline set.  overlap/potential:
// weight*B_i*B_j; kinetic: (1/2) weight*B_i'*B_j'; first_derivative: the
// antisymmetric part (1/2) weight*(B_i B_j' - B_i' B_j), which equals the
// full integral for constant weight once boundary splines are dropped.
inline BandMatrix assemble_band(const KnotVector& kv, const QuadratureRule& quad,
                                const WeightFn& weight, OperatorKind kind) {
    const int n = kv.num_splines();
    const int k = kv.order;
    const bool anti = (kind == OperatorKind::first_derivative);
    BandMatrix m(n, k - 1, anti ? BandKind::antisymmetric : BandKind::symmetric);
    std::array<double, max_spline_order> v{}, d{};
    for (size_t q = 0; q < quad.nodes.size(); ++q) {
        const double x = quad.nodes[q];
        double wq = quad.weights[q] * (weight ? weight(x) : 1.0);
        if (wq == 0.0) continue;
        if (!std::isfinite(wq))
            throw NumericError("non-finite integrand weight at x=" + std::to_string(x));
        const int first = eval_splines(kv, x, v.data(), d.data());
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b <= a; ++b) {
                const int i = first + a, j = first + b;
                double contrib = 0.0;
                switch (kind) {
                    case OperatorKind::overlap:
                    case OperatorKind::potential:
                        contrib = wq * v[a] * v[b];
                        break;
                    case OperatorKind::kinetic:
                        contrib = 0.5 * wq * d[a] * d[b];
                        break;
                    case OperatorKind::first_derivative:
                        contrib = 0.5 * wq * (v[a] * d[b] - d[a] * v[b]);
                        break;
                }
                m.at(i, j) += contrib;
            }
        }
    }
    return m;
}

} // namespace specbox

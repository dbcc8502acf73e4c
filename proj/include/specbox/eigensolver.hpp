#pragma once

// Generalized symmetric-definite banded eigensolvers (LAPACK dsbgvd/dsbgvx)
// behind a value-type interface.  Inputs are copied: LAPACK destroys its
// arguments.

#include <string>
#include <vector>

#include "specbox/errors.hpp"
#include "specbox/matrix.hpp"

extern "C" {
void dsbgvd_(const char* jobz, const char* uplo, const int* n, const int* ka, const int* kb,
             double* ab, const int* ldab, double* bb, const int* ldbb, double* w, double* z,
             const int* ldz, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void dsbgvx_(const char* jobz, const char* range, const char* uplo, const int* n, const int* ka,
             const int* kb, double* ab, const int* ldab, double* bb, const int* ldbb, double* q,
             const int* ldq, const double* vl, const double* vu, const int* il, const int* iu,
             const double* abstol, int* m, double* w, double* z, const int* ldz, double* work,
             int* iwork, int* ifail, int* info);
void dpbtrf_(const char* uplo, const int* n, const int* kd, double* ab, const int* ldab,
             int* info);
}

namespace specbox {

struct EigenSolution {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // (n x m), column j belongs to values[j]; B-orthonormal
};

// All eigenpairs of A x = lambda B x with banded symmetric A and SPD B.
inline EigenSolution gen_eig_banded(const BandMatrix& a, const BandMatrix& b,
                                    const std::string& label = {}) {
    const int n = a.n();
    if (b.n() != n) throw NumericError("eigensolver: dimension mismatch");
    BandMatrix ac = a, bc = b;
    const int ka = a.kd(), kb = b.kd(), ldab = a.ld(), ldbb = b.ld();
    std::vector<double> w(static_cast<size_t>(n));
    std::vector<double> z(static_cast<size_t>(n) * n);
    int lwork = -1, liwork = -1, info = 0;
    double wq = 0;
    int iwq = 0;
    dsbgvd_("V", "L", &n, &ka, &kb, ac.data(), &ldab, bc.data(), &ldbb, w.data(), z.data(), &n,
            &wq, &lwork, &iwq, &liwork, &info);
    lwork = static_cast<int>(wq);
    liwork = iwq;
    std::vector<double> work(static_cast<size_t>(lwork));
    std::vector<int> iwork(static_cast<size_t>(liwork));
    dsbgvd_("V", "L", &n, &ka, &kb, ac.data(), &ldab, bc.data(), &ldbb, w.data(), z.data(), &n,
            work.data(), &lwork, iwork.data(), &liwork, &info);
    if (info != 0)
        throw NumericError("dsbgvd failed (info=" + std::to_string(info) + ")" +
                           (label.empty() ? "" : " in block " + label));
    EigenSolution s;
    s.values = std::move(w);
    s.vectors = DenseMatrix(n, n);
    // LAPACK returns column-major; DenseMatrix is row-major
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) s.vectors(i, j) = z[static_cast<size_t>(j) * n + i];
    return s;
}

// Eigenpairs il..iu (1-based, ascending) only; avoids the O(n^2) vector
// storage of the full solve for large problems.
inline EigenSolution gen_eig_banded_range(const BandMatrix& a, const BandMatrix& b, int il, int iu,
                                          const std::string& label = {}) {
    const int n = a.n();
    if (b.n() != n) throw NumericError("eigensolver: dimension mismatch");
    BandMatrix ac = a, bc = b;
    const int ka = a.kd(), kb = b.kd(), ldab = a.ld(), ldbb = b.ld();
    const int nev = iu - il + 1;
    std::vector<double> q(static_cast<size_t>(n) * n);
    std::vector<double> w(static_cast<size_t>(n));
    std::vector<double> z(static_cast<size_t>(n) * nev);
    std::vector<double> work(static_cast<size_t>(7) * n);
    std::vector<int> iwork(static_cast<size_t>(5) * n);
    std::vector<int> ifail(static_cast<size_t>(n));
    const double vl = 0, vu = 0, abstol = 0;
    int m = 0, info = 0;
    dsbgvx_("V", "I", "L", &n, &ka, &kb, ac.data(), &ldab, bc.data(), &ldbb, q.data(), &n, &vl,
            &vu, &il, &iu, &abstol, &m, w.data(), z.data(), &n, work.data(), iwork.data(),
            ifail.data(), &info);
    if (info != 0)
        throw NumericError("dsbgvx failed (info=" + std::to_string(info) + ")" +
                           (label.empty() ? "" : " in block " + label));
    EigenSolution s;
    s.values.assign(w.begin(), w.begin() + m);
    s.vectors = DenseMatrix(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) s.vectors(i, j) = z[static_cast<size_t>(j) * n + i];
    return s;
}

// Cholesky feasibility of a banded matrix (positive definiteness probe).
inline bool is_positive_definite(const BandMatrix& b) {
    BandMatrix bc = b;
    const int n = b.n(), kd = b.kd(), ldab = b.ld();
    int info = 0;
    dpbtrf_("L", &n, &kd, bc.data(), &ldab, &info);
    return info == 0;
}

} // namespace specbox

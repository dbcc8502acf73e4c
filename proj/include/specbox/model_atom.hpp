#pragma once

// One-parameter screened-Coulomb model atom: potential, ionisation-potential
// approximation and calibration, radial eigenbases per angular momentum, and
// velocity-gauge dipole couplings between adjacent l blocks.
//
// Radial problems are solved in reduced form u(r) = r R(r) with u(0) = 0 and
// u(r_max) = 0 enforced by dropping the first and last spline.

#include <cmath>
#include <string>
#include <vector>

#include "specbox/basis_types.hpp"
#include "specbox/bspline.hpp"
#include "specbox/eigensolver.hpp"
#include "specbox/errors.hpp"
#include "specbox/matrix.hpp"

namespace specbox {

struct ModelAtomSpec {
    double alpha = 0.0;
    double r_max = 350.0;
    int n_splines = 350;
    int order = 15;
    int l_max = 3;
    int quad_points = 0;  // 0: order+2

    void validate() const {
        if (!(r_max > 0)) throw ConfigError("model atom: r_max must be positive");
        if (l_max < 0) throw ConfigError("model atom: l_max must be >= 0");
    }
};

// V(r) = -(1/r) [1 + sgn(alpha) exp(-2 r / sqrt(|alpha|))]; alpha = 0 is the
// bare Coulomb potential (the screening term is absent).
inline double model_potential(double r, double alpha) {
    if (!(r > 0)) throw ConfigError("model potential requires r > 0");
    if (alpha == 0.0) return -1.0 / r;
    const double sgn = alpha > 0 ? 1.0 : -1.0;
    return -(1.0 / r) * (1.0 + sgn * std::exp(-2.0 * r / std::sqrt(std::abs(alpha))));
}

// Closed-form estimate of the ionisation potential of the model atom.
inline double ip_approx(double alpha) {
    if (alpha == 0.0) return 0.5;
    const double s = alpha > 0 ? 1.0 : 2.75;
    return 0.5 + alpha / std::pow(1.0 + std::sqrt(std::abs(alpha)), s);
}

struct AtomicEigenBasis {
    ModelAtomSpec spec;
    KnotVector kv;
    SpectralBasis basis;  // one block per l = 0..l_max, threshold 0
};

namespace detail {

struct RadialOperators {
    KnotVector kv;
    QuadratureRule quad;
    BandMatrix kinetic;   // (1/2) u' u'
    BandMatrix overlap;   // u u
    int lo = 1, hi = 0;   // kept spline range [lo, hi)
};

inline RadialOperators radial_operators(const ModelAtomSpec& spec) {
    RadialOperators ops;
    ops.kv = build_knots(spec.n_splines, spec.order, 0.0, spec.r_max);
    ops.quad = make_quadrature(ops.kv, spec.quad_points > 0 ? spec.quad_points : spec.order + 2);
    ops.kinetic = assemble_band(ops.kv, ops.quad, nullptr, OperatorKind::kinetic);
    ops.overlap = assemble_band(ops.kv, ops.quad, nullptr, OperatorKind::overlap);
    ops.hi = spec.n_splines - 1;
    return ops;
}

inline BandMatrix trim_band(const BandMatrix& m, int lo, int hi) {
    BandMatrix t(hi - lo, m.kd(), m.kind());
    for (int j = lo; j < hi; ++j)
        for (int i = j; i < std::min(hi, j + m.kd() + 1); ++i) t.at(i - lo, j - lo) = m.get(i, j);
    return t;
}

inline EigenSolution solve_radial_block(const RadialOperators& ops, const ModelAtomSpec& spec,
                                        int l, int nev = 0) {
    const double alpha = spec.alpha;
    const WeightFn eff = [alpha, l](double r) {
        double v = model_potential(r, alpha);
        if (l > 0) v += 0.5 * l * (l + 1) / (r * r);
        return v;
    };
    BandMatrix pot = assemble_band(ops.kv, ops.quad, eff, OperatorKind::potential);
    BandMatrix h = trim_band(ops.kinetic, ops.lo, ops.hi);
    const BandMatrix pt = trim_band(pot, ops.lo, ops.hi);
    for (int j = 0; j < h.n(); ++j)
        for (int i = j; i < std::min(h.n(), j + h.kd() + 1); ++i) h.at(i, j) += pt.get(i, j);
    const BandMatrix s = trim_band(ops.overlap, ops.lo, ops.hi);
    const std::string label = "l=" + std::to_string(l);
    if (nev > 0) return gen_eig_banded_range(h, s, 1, nev, label);
    return gen_eig_banded(h, s, label);
}

} // namespace detail

// Field-free eigenbasis, one block per l.  Negative energies are bound
// states; the discretized continuum starts at the threshold 0.
inline AtomicEigenBasis solve_atom(const ModelAtomSpec& spec) {
    spec.validate();
    auto ops = detail::radial_operators(spec);
    AtomicEigenBasis out;
    out.spec = spec;
    out.kv = ops.kv;
    out.basis.ionisation_threshold = 0.0;
    for (int l = 0; l <= spec.l_max; ++l) {
        auto sol = detail::solve_radial_block(ops, spec, l);
        StateBlock blk;
        blk.label = BlockLabel{l, Parity::none, l};
        blk.energies = std::move(sol.values);
        blk.coeffs = std::move(sol.vectors);
        out.basis.blocks.push_back(std::move(blk));
    }
    return out;
}

// Ground-state binding energy computed from the basis (lowest l=0 level).
inline double computed_ip(const ModelAtomSpec& spec) {
    spec.validate();
    auto ops = detail::radial_operators(spec);
    auto sol = detail::solve_radial_block(ops, spec, 0, 1);
    return -sol.values[0];
}

// Find alpha whose computed ground-state binding energy equals target_ip.
// Bisection on the monotone Ip(alpha); ip_approx provides the initial
// bracket only.
inline double calibrate_alpha(double target_ip, ModelAtomSpec spec) {
    if (!(target_ip >= 0.05 && target_ip <= 5.0))
        throw ConfigError("calibrate_alpha: target Ip outside sanity bounds [0.05, 5]");
    // dense quadrature keeps the short-range term visible down to alpha ~ 1e-9
    spec.quad_points = std::max(spec.quad_points, 5 * spec.order);
    auto ops = detail::radial_operators(spec);
    auto ip_at = [&](double alpha) {
        spec.alpha = alpha;
        auto sol = detail::solve_radial_block(ops, spec, 0, 1);
        return -sol.values[0];
    };
    // invert the closed-form estimate for a starting point
    double g_lo = -0.9, g_hi = 4.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (g_lo + g_hi);
        (ip_approx(mid) < target_ip ? g_lo : g_hi) = mid;
    }
    double lo = 0.5 * (g_lo + g_hi) - 0.02, hi = lo + 0.04;
    double flo = ip_at(lo) - target_ip, fhi = ip_at(hi) - target_ip;
    for (int it = 0; it < 60 && flo * fhi > 0; ++it) {
        if (flo > 0) { lo -= 0.05; flo = ip_at(lo) - target_ip; }
        else { hi += 0.05; fhi = ip_at(hi) - target_ip; }
        if (lo < -0.99 || hi > 8.0)
            throw NumericError("calibrate_alpha: failed to bracket target Ip");
    }
    if (flo * fhi > 0) throw NumericError("calibrate_alpha: failed to bracket target Ip");
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = ip_at(mid) - target_ip;
        if (std::abs(fm) < 1e-7 && (hi - lo) < 1e-8) return mid;
        (fm < 0 ? lo : hi) = mid;
        (fm < 0 ? flo : fhi) = fm;
    }
    return 0.5 * (lo + hi);
}

// z-projection angular factor <l+1,0|cos(theta)|l,0>
inline double cg_z(int l) { return (l + 1.0) / std::sqrt((2.0 * l + 1.0) * (2.0 * l + 3.0)); }

// Velocity-gauge couplings <n', l+1 | d/dz | n, l> for linear polarisation
// along z (m = 0 chain).  Blocks are stored for l -> l+1; the full matrix is
// antisymmetric.
inline DipoleCouplingSet atomic_dipole_set(const AtomicEigenBasis& ab) {
    if (ab.spec.l_max < 1) throw ConfigError("dipole set needs l_max >= 1");
    const auto& spec = ab.spec;
    auto quad = make_quadrature(ab.kv, spec.quad_points > 0 ? spec.quad_points : spec.order + 2);
    const int lo = 1, hi = spec.n_splines - 1;
    // radial pieces: u' and u/r
    DenseMatrix ddr = assemble_pair(ab.kv, quad, nullptr, false, true);
    DenseMatrix invr = assemble_pair(ab.kv, quad, [](double r) { return 1.0 / r; }, false, false);
    ddr = ddr.slice(lo, hi, lo, hi);
    invr = invr.slice(lo, hi, lo, hi);

    DipoleCouplingSet set;
    set.orientation = Orientation::isotropic;
    for (int l = 0; l < spec.l_max; ++l) {
        // <u_{l+1} | d/dr - (l+1)/r | u_l>, angular factor cg_z(l)
        const auto& vk = ab.basis.blocks[static_cast<size_t>(l)].coeffs;
        const auto& vb = ab.basis.blocks[static_cast<size_t>(l + 1)].coeffs;
        DenseMatrix op(ddr.rows(), ddr.cols());
        for (int i = 0; i < op.rows(); ++i)
            for (int j = 0; j < op.cols(); ++j)
                op(i, j) = ddr(i, j) - (l + 1.0) * invr(i, j);
        CouplingBlock cb;
        cb.from = l;
        cb.to = l + 1;
        cb.d = matmul_tn(vb, matmul(op, vk));
        const double ang = cg_z(l);
        for (int i = 0; i < cb.d.rows(); ++i)
            for (int j = 0; j < cb.d.cols(); ++j) cb.d(i, j) *= ang;
        set.blocks.push_back(std::move(cb));
    }
    return set;
}

// Length-gauge counterparts <n', l+1 | z | n, l>; used for gauge
// cross-checks against the velocity set.
inline DipoleCouplingSet atomic_length_set(const AtomicEigenBasis& ab) {
    const auto& spec = ab.spec;
    auto quad = make_quadrature(ab.kv, spec.quad_points > 0 ? spec.quad_points : spec.order + 2);
    const int lo = 1, hi = spec.n_splines - 1;
    DenseMatrix rmat = assemble_pair(ab.kv, quad, [](double r) { return r; }, false, false);
    rmat = rmat.slice(lo, hi, lo, hi);
    DipoleCouplingSet set;
    set.orientation = Orientation::isotropic;
    for (int l = 0; l < spec.l_max; ++l) {
        const auto& vk = ab.basis.blocks[static_cast<size_t>(l)].coeffs;
        const auto& vb = ab.basis.blocks[static_cast<size_t>(l + 1)].coeffs;
        CouplingBlock cb;
        cb.from = l;
        cb.to = l + 1;
        cb.d = matmul_tn(vb, matmul(rmat, vk));
        const double ang = cg_z(l);
        for (int i = 0; i < cb.d.rows(); ++i)
            for (int j = 0; j < cb.d.cols(); ++j) cb.d(i, j) *= ang;
        set.blocks.push_back(std::move(cb));
    }
    return set;
}

} // namespace specbox

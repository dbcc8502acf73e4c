#pragma once

// One-electron two-center eigenproblem in prolate spheroidal coordinates
// (1 <= xi <= xi_max, -1 <= eta <= 1), box-discretized with tensor-product
// B-splines.  Sectors are labelled by |Lambda| and inversion parity; for
// Lambda > 0 the splines carry the regularity prefactor
// (xi^2-1)^{L/2} (1-eta^2)^{L/2}.  Homonuclear symmetry is exploited by
// building even/odd eta subbases.  Velocity-gauge couplings are provided for
// polarisation parallel and perpendicular to the internuclear axis; the
// perpendicular set between reflection-symmetrized degenerate states carries
// a factor sqrt(2) exactly when Lambda + Lambda' = 1.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "specbox/basis_types.hpp"
#include "specbox/bspline.hpp"
#include "specbox/eigensolver.hpp"
#include "specbox/errors.hpp"
#include "specbox/matrix.hpp"

namespace specbox {

struct TwoCenterSpec {
    double R = 2.0;           // internuclear distance, a.u. (charges 1, 1)
    double box_radius = 120;  // major semi-axis of the box; xi_max = 2*box/R
    int n_xi = 120, k_xi = 10;
    int n_eta = 24, k_eta = 8;
    int lambda_max = 3;
    bool include_repulsion = true;  // add +1/R to reported energies
    int quad_points_xi = 0;         // 0: k_xi + lambda_max + 3
    int quad_points_eta = 0;
    int eta_node_limit = -1;        // drop states with more eta nodes; <0: off

    void validate() const {
        if (!(R > 0)) throw ConfigError("two-center: R must be positive");
        if (lambda_max < 0) throw ConfigError("two-center: lambda_max must be >= 0");
        if (!(2.0 * box_radius > R))
            throw ConfigError("two-center: box radius must exceed R/2 (xi_max > 1)");
    }
    double xi_max() const { return 2.0 * box_radius / R; }
};

struct SymmetryBlock {
    int lambda = 0;
    Parity parity = Parity::gerade;

    // eta parity of the spline factor; the full-state inversion parity is
    // eta_parity * (-1)^lambda
    int eta_parity() const {
        const int ps = parity == Parity::gerade ? +1 : -1;
        return (lambda % 2 == 0) ? ps : -ps;
    }
    std::string str() const { return BlockLabel{lambda, parity, lambda}.str(); }
};

// Sectors reachable from the sigma_g ground state for a given polarisation.
inline std::vector<SymmetryBlock> propagation_blocks(Orientation o, int lambda_max) {
    std::vector<SymmetryBlock> v;
    v.push_back({0, Parity::gerade});
    if (o == Orientation::parallel) {
        v.push_back({0, Parity::ungerade});
    } else {
        for (int l = 1; l <= lambda_max; ++l)
            v.push_back({l, l % 2 ? Parity::ungerade : Parity::gerade});
    }
    return v;
}

namespace tc_detail {

// columns: parity-adapted spline combinations on the symmetric eta grid
inline DenseMatrix eta_sym_matrix(int n, int parity) {
    const double inv = 1.0 / std::sqrt(2.0);
    const int half = n / 2;
    const int m = (n % 2 == 1 && parity > 0) ? half + 1 : half;
    DenseMatrix c(n, m);
    for (int j = 0; j < half; ++j) {
        c(j, j) = inv;
        c(n - 1 - j, j) = parity * inv;
    }
    if (m > half) c(half, half) = 1.0;
    return c;
}

struct Engine {
    TwoCenterSpec spec;
    KnotVector kv_xi, kv_eta;
    QuadratureRule q_xi, q_eta;
    int m_xi;  // kept xi splines (last dropped for the box condition)

    explicit Engine(const TwoCenterSpec& s) : spec(s) {
        spec.validate();
        kv_xi = build_knots(spec.n_xi, spec.k_xi, 1.0, spec.xi_max());
        kv_eta = build_knots(spec.n_eta, spec.k_eta, -1.0, 1.0);
        const int qx = spec.quad_points_xi > 0 ? spec.quad_points_xi
                                               : spec.k_xi + spec.lambda_max + 3;
        const int qe = spec.quad_points_eta > 0 ? spec.quad_points_eta
                                                : spec.k_eta + spec.lambda_max + 3;
        q_xi = make_quadrature(kv_xi, qx);
        q_eta = make_quadrature(kv_eta, qe);
        m_xi = spec.n_xi - 1;
    }

    DenseMatrix xi_pair(const WeightFn& w, bool da, bool db) const {
        return assemble_pair(kv_xi, q_xi, w, da, db).slice(0, m_xi, 0, m_xi);
    }
    DenseMatrix eta_pair(const DenseMatrix& c_bra, const DenseMatrix& c_ket, const WeightFn& w,
                         bool da, bool db) const {
        const DenseMatrix raw = assemble_pair(kv_eta, q_eta, w, da, db);
        return matmul_tn(c_bra, matmul(raw, c_ket));
    }
    DenseMatrix eta_c(const SymmetryBlock& b) const {
        return eta_sym_matrix(spec.n_eta, b.eta_parity());
    }
};

struct KronTerm {
    DenseMatrix x, y;
    double factor = 1.0;
};

// Hamiltonian and overlap of one sector as sums of Kronecker products of
// 1D integrals (xi index major).
inline void sector_matrices(const Engine& eng, const SymmetryBlock& blk,
                            std::vector<KronTerm>& ham, std::vector<KronTerm>& ovl) {
    const double R = eng.spec.R;
    const int L = blk.lambda;
    const DenseMatrix c = eng.eta_c(blk);
    auto wxl = [L](double x) { return std::pow(x * x - 1.0, L); };
    auto wel = [L](double e) { return std::pow(1.0 - e * e, L); };

    DenseMatrix s_xi = eng.xi_pair(wxl, false, false);
    DenseMatrix s_xi1 = eng.xi_pair([&](double x) { return x * wxl(x); }, false, false);
    DenseMatrix s_xi2 = eng.xi_pair([&](double x) { return x * x * wxl(x); }, false, false);
    DenseMatrix s_eta = eng.eta_pair(c, c, wel, false, false);
    DenseMatrix s_eta2 = eng.eta_pair(c, c, [&](double e) { return e * e * wel(e); }, false, false);

    DenseMatrix t_xi = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L + 1); }, true, true);
    DenseMatrix t_eta = eng.eta_pair(c, c, [L](double e) { return std::pow(1.0 - e * e, L + 1); }, true, true);
    if (L > 0) {
        const DenseMatrix x01 = eng.xi_pair([&](double x) { return x * wxl(x); }, false, true);
        const DenseMatrix x10 = eng.xi_pair([&](double x) { return x * wxl(x); }, true, false);
        const DenseMatrix xc = eng.xi_pair(
            [L](double x) { return L * L * (x * x + 1.0) * std::pow(x * x - 1.0, L - 1); }, false,
            false);
        for (int i = 0; i < t_xi.rows(); ++i)
            for (int j = 0; j < t_xi.cols(); ++j)
                t_xi(i, j) += L * (x01(i, j) + x10(i, j)) + xc(i, j);
        const DenseMatrix e01 = eng.eta_pair(c, c, [&](double e) { return e * wel(e); }, false, true);
        const DenseMatrix e10 = eng.eta_pair(c, c, [&](double e) { return e * wel(e); }, true, false);
        const DenseMatrix ec = eng.eta_pair(
            c, c, [L](double e) { return L * L * (1.0 + e * e) * std::pow(1.0 - e * e, L - 1); },
            false, false);
        for (int i = 0; i < t_eta.rows(); ++i)
            for (int j = 0; j < t_eta.cols(); ++j)
                t_eta(i, j) += -L * (e01(i, j) + e10(i, j)) + ec(i, j);
    }

    ham.clear();
    ovl.clear();
    ham.push_back({t_xi, s_eta, R / 4.0});
    ham.push_back({s_xi, t_eta, R / 4.0});
    ham.push_back({s_xi1, s_eta, -R * R / 2.0});  // -Z1/r1 - Z2/r2, Z1 = Z2 = 1
    ovl.push_back({s_xi2, s_eta, R * R * R / 8.0});
    ovl.push_back({s_xi, s_eta2, -R * R * R / 8.0});
}

inline BandMatrix band_from_kron(const std::vector<KronTerm>& terms, int m_xi, int m_eta,
                                 int k_xi) {
    const int n = m_xi * m_eta;
    const int kd = std::min(n - 1, k_xi * m_eta - 1);
    BandMatrix m(n, kd);
    for (int j = 0; j < n; ++j) {
        const int jx = j / m_eta, je = j % m_eta;
        for (int i = j; i <= std::min(n - 1, j + kd); ++i) {
            const int ix = i / m_eta, ie = i % m_eta;
            if (ix - jx >= k_xi) break;
            double v = 0;
            for (const auto& t : terms) v += t.factor * t.x(ix, jx) * t.y(ie, je);
            m.at(i, j) = v;
        }
    }
    return m;
}

// eigenstate transform: V_bra^T (sum_t f_t X_t (x) Y_t) V_ket
inline DenseMatrix transform_kron(const std::vector<KronTerm>& terms, const DenseMatrix& v_bra,
                                  const DenseMatrix& v_ket, int m_eta_bra, int m_eta_ket) {
    const int nk = v_ket.cols();
    const int dim_bra = v_bra.rows();
    const int mx_ket = v_ket.rows() / m_eta_ket;
    const int mx_bra = dim_bra / m_eta_bra;
    DenseMatrix m1(dim_bra, nk);
    DenseMatrix cm(mx_ket, m_eta_ket), xc(mx_bra, m_eta_ket), xcy(mx_bra, m_eta_bra);
    for (int s = 0; s < nk; ++s) {
        for (int i = 0; i < mx_ket; ++i)
            for (int j = 0; j < m_eta_ket; ++j) cm(i, j) = v_ket(i * m_eta_ket + j, s);
        for (const auto& t : terms) {
            // X * Cm
            for (int i = 0; i < mx_bra; ++i)
                for (int j = 0; j < m_eta_ket; ++j) {
                    double acc = 0;
                    for (int l = 0; l < mx_ket; ++l) acc += t.x(i, l) * cm(l, j);
                    xc(i, j) = acc;
                }
            // (X Cm) * Y^T
            for (int i = 0; i < mx_bra; ++i)
                for (int j = 0; j < m_eta_bra; ++j) {
                    double acc = 0;
                    for (int l = 0; l < m_eta_ket; ++l) acc += xc(i, l) * t.y(j, l);
                    xcy(i, j) = acc;
                }
            for (int i = 0; i < mx_bra; ++i)
                for (int j = 0; j < m_eta_bra; ++j)
                    m1(i * m_eta_bra + j, s) += t.factor * xcy(i, j);
        }
    }
    return matmul_tn(v_bra, m1);
}

} // namespace tc_detail

// Eigenpairs of one symmetry sector.  Energies include the nuclear repulsion
// +1/R when include_repulsion is set; the electronic continuum then opens at
// +1/R.
inline EigenSolution solve_two_center(const TwoCenterSpec& spec, const SymmetryBlock& blk,
                                      int nev = 0) {
    tc_detail::Engine eng(spec);
    std::vector<tc_detail::KronTerm> ham, ovl;
    tc_detail::sector_matrices(eng, blk, ham, ovl);
    const int m_eta = eng.eta_c(blk).cols();
    BandMatrix h = tc_detail::band_from_kron(ham, eng.m_xi, m_eta, spec.k_xi);
    BandMatrix s = tc_detail::band_from_kron(ovl, eng.m_xi, m_eta, spec.k_xi);
    EigenSolution sol = nev > 0 ? gen_eig_banded_range(h, s, 1, nev, blk.str())
                                : gen_eig_banded(h, s, blk.str());
    if (spec.include_repulsion)
        for (auto& e : sol.values) e += 1.0 / spec.R;
    return sol;
}

// |ground(spec) - ground(refined spec)|; throws when above tol.
inline double two_center_ground_convergence(const TwoCenterSpec& spec, const SymmetryBlock& blk,
                                            double tol) {
    TwoCenterSpec fine = spec;
    fine.n_xi += 15;
    fine.n_eta += 4;
    const double e0 = solve_two_center(spec, blk, 1).values[0];
    const double e1 = solve_two_center(fine, blk, 1).values[0];
    const double gap = std::abs(e0 - e1);
    if (gap > tol)
        throw NumericError("insufficient basis in block " + blk.str() + ": ground energy moved " +
                           std::to_string(gap) + " under refinement");
    return gap;
}

struct MolecularEigenBasis {
    TwoCenterSpec spec;
    std::vector<SymmetryBlock> sectors;  // parallel to basis.blocks
    SpectralBasis basis;
};

// Count sign changes of the eta profile at the xi location where the state
// peaks (used by the optional angular-node filter).
inline int count_eta_nodes(const tc_detail::Engine& eng, const SymmetryBlock& blk,
                           const DenseMatrix& coeffs, int state) {
    const DenseMatrix c = eng.eta_c(blk);
    const int m_eta = c.cols(), m_xi = eng.m_xi;
    // coarse xi profile: max |coefficient| row
    int ix_ref = 0;
    double best = -1;
    for (int i = 0; i < m_xi; ++i) {
        double acc = 0;
        for (int j = 0; j < m_eta; ++j) acc += std::abs(coeffs(i * m_eta + j, state));
        if (acc > best) { best = acc; ix_ref = i; }
    }
    const int ngrid = 8 * eng.spec.n_eta;
    std::array<double, max_spline_order> bv{}, bd{};
    std::vector<double> prof(static_cast<size_t>(ngrid));
    double vmax = 0;
    for (int g = 0; g < ngrid; ++g) {
        const double eta = -1.0 + 2.0 * (g + 0.5) / ngrid;
        const int first = eval_splines(eng.kv_eta, eta, bv.data(), bd.data());
        double val = 0;
        for (int a = 0; a < eng.kv_eta.order; ++a) {
            const int spline = first + a;
            for (int j = 0; j < m_eta; ++j) {
                const double cc = c(spline, j);
                if (cc != 0.0) val += cc * bv[static_cast<size_t>(a)] * coeffs(ix_ref * m_eta + j, state);
            }
        }
        prof[static_cast<size_t>(g)] = val;
        vmax = std::max(vmax, std::abs(val));
    }
    int nodes = 0;
    double prev = 0;
    for (double v : prof) {
        if (std::abs(v) < 1e-8 * vmax) continue;
        if (prev != 0.0 && v * prev < 0) ++nodes;
        prev = v;
    }
    return nodes;
}

// Field-free eigenbasis over the given sectors.
inline MolecularEigenBasis build_molecular_basis(const TwoCenterSpec& spec,
                                                 const std::vector<SymmetryBlock>& sectors) {
    MolecularEigenBasis out;
    out.spec = spec;
    out.sectors = sectors;
    out.basis.ionisation_threshold = spec.include_repulsion ? 1.0 / spec.R : 0.0;
    tc_detail::Engine eng(spec);
    for (const auto& blk : sectors) {
        EigenSolution sol = solve_two_center(spec, blk);
        StateBlock sb;
        sb.label = BlockLabel{blk.lambda, blk.parity, blk.lambda};
        if (spec.eta_node_limit >= 0) {
            std::vector<int> keep;
            for (int s = 0; s < static_cast<int>(sol.values.size()); ++s)
                if (count_eta_nodes(eng, blk, sol.vectors, s) <= spec.eta_node_limit)
                    keep.push_back(s);
            sb.energies.reserve(keep.size());
            sb.coeffs = DenseMatrix(sol.vectors.rows(), static_cast<int>(keep.size()));
            for (size_t m = 0; m < keep.size(); ++m) {
                sb.energies.push_back(sol.values[static_cast<size_t>(keep[m])]);
                for (int i = 0; i < sol.vectors.rows(); ++i)
                    sb.coeffs(i, static_cast<int>(m)) = sol.vectors(i, keep[m]);
            }
        } else {
            sb.energies = std::move(sol.values);
            sb.coeffs = std::move(sol.vectors);
        }
        out.basis.blocks.push_back(std::move(sb));
    }
    return out;
}

namespace tc_detail {

// <Lam, p' | d/dz | Lam, p> between spline bases (kron-term list)
inline std::vector<KronTerm> z_velocity_terms(const Engine& eng, const SymmetryBlock& bra,
                                              const SymmetryBlock& ket) {
    const int L = ket.lambda;
    const double R = eng.spec.R;
    const DenseMatrix cb = eng.eta_c(bra), ck = eng.eta_c(ket);
    auto wxl = [L](double x) { return std::pow(x * x - 1.0, L); };
    auto wel = [L](double e) { return std::pow(1.0 - e * e, L); };
    DenseMatrix x1 = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L + 1); }, false, true);
    if (L > 0) {
        const DenseMatrix xe = eng.xi_pair([&](double x) { return x * wxl(x); }, false, false);
        for (int i = 0; i < x1.rows(); ++i)
            for (int j = 0; j < x1.cols(); ++j) x1(i, j) += L * xe(i, j);
    }
    DenseMatrix e1 = eng.eta_pair(cb, ck, [&](double e) { return e * wel(e); }, false, false);
    DenseMatrix x2 = eng.xi_pair([&](double x) { return x * wxl(x); }, false, false);
    DenseMatrix e2 = eng.eta_pair(cb, ck, [L](double e) { return std::pow(1.0 - e * e, L + 1); },
                                  false, true);
    if (L > 0) {
        const DenseMatrix ee = eng.eta_pair(cb, ck, [&](double e) { return e * wel(e); }, false, false);
        for (int i = 0; i < e2.rows(); ++i)
            for (int j = 0; j < e2.cols(); ++j) e2(i, j) += -L * ee(i, j);
    }
    return {{x1, e1, R * R / 4.0}, {x2, e2, R * R / 4.0}};
}

// <Lam+1, p' | (1/2)(d_rho - Lam/rho) e^{i phi} component | Lam, p>
inline std::vector<KronTerm> x_raise_terms(const Engine& eng, const SymmetryBlock& bra,
                                           const SymmetryBlock& ket) {
    const int L = ket.lambda;
    const double R = eng.spec.R;
    const double f = R * R / 8.0;
    const DenseMatrix cb = eng.eta_c(bra), ck = eng.eta_c(ket);
    std::vector<KronTerm> t;
    DenseMatrix x1 = eng.xi_pair([L](double x) { return x * std::pow(x * x - 1.0, L + 1); }, false, true);
    DenseMatrix e1 = eng.eta_pair(cb, ck, [L](double e) { return std::pow(1.0 - e * e, L + 1); },
                                  false, false);
    DenseMatrix x3 = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L + 1); }, false, false);
    DenseMatrix e3 = eng.eta_pair(cb, ck,
                                  [L](double e) { return -e * std::pow(1.0 - e * e, L + 1); },
                                  false, true);
    t.push_back({x1, e1, f});
    t.push_back({x3, e3, f});
    if (L > 0) {
        DenseMatrix x2 = eng.xi_pair([L](double x) { return x * x * std::pow(x * x - 1.0, L); },
                                     false, false);
        DenseMatrix e4 = eng.eta_pair(cb, ck,
                                      [L](double e) { return e * e * std::pow(1.0 - e * e, L); },
                                      false, false);
        DenseMatrix x0 = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L); }, false, false);
        DenseMatrix e0 = eng.eta_pair(cb, ck, [L](double e) { return std::pow(1.0 - e * e, L); },
                                      false, false);
        t.push_back({x2, e1, f * L});
        t.push_back({x3, e4, f * L});
        t.push_back({x2, e0, -f * L});  // -(L/rho) piece
        t.push_back({x0, e4, f * L});
    }
    return t;
}

// <Lam-1, p' | (1/2)(d_rho + Lam/rho) e^{-i phi} component | Lam, p>
inline std::vector<KronTerm> x_lower_terms(const Engine& eng, const SymmetryBlock& bra,
                                           const SymmetryBlock& ket) {
    const int L = ket.lambda;
    const double R = eng.spec.R;
    const double f = R * R / 8.0;
    const DenseMatrix cb = eng.eta_c(bra), ck = eng.eta_c(ket);
    std::vector<KronTerm> t;
    DenseMatrix x1 = eng.xi_pair([L](double x) { return x * std::pow(x * x - 1.0, L); }, false, true);
    DenseMatrix e1 = eng.eta_pair(cb, ck, [L](double e) { return std::pow(1.0 - e * e, L); },
                                  false, false);
    DenseMatrix x3 = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L); }, false, false);
    DenseMatrix e3 = eng.eta_pair(cb, ck, [L](double e) { return -e * std::pow(1.0 - e * e, L); },
                                  false, true);
    DenseMatrix x2 = eng.xi_pair([L](double x) { return x * x * std::pow(x * x - 1.0, L - 1); },
                                 false, false);
    DenseMatrix e4 = eng.eta_pair(cb, ck,
                                  [L](double e) { return e * e * std::pow(1.0 - e * e, L - 1); },
                                  false, false);
    DenseMatrix x0 = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L - 1); }, false, false);
    DenseMatrix e0 = eng.eta_pair(cb, ck, [L](double e) { return std::pow(1.0 - e * e, L - 1); },
                                  false, false);
    t.push_back({x1, e1, f});
    t.push_back({x2, e1, f * L});
    t.push_back({x3, e3, f});
    t.push_back({x3, e4, f * L});
    t.push_back({x2, e0, f * L});  // +(L/rho) piece
    t.push_back({x0, e4, -f * L});
    return t;
}

// length-gauge counterparts, for gauge cross-checks
inline std::vector<KronTerm> z_length_terms(const Engine& eng, const SymmetryBlock& bra,
                                            const SymmetryBlock& ket) {
    const int L = ket.lambda;
    const double R = eng.spec.R;
    const double f = std::pow(R, 4) / 16.0;
    const DenseMatrix cb = eng.eta_c(bra), ck = eng.eta_c(ket);
    auto wxl = [L](double x) { return std::pow(x * x - 1.0, L); };
    auto wel = [L](double e) { return std::pow(1.0 - e * e, L); };
    DenseMatrix x3 = eng.xi_pair([&](double x) { return x * x * x * wxl(x); }, false, false);
    DenseMatrix e1 = eng.eta_pair(cb, ck, [&](double e) { return e * wel(e); }, false, false);
    DenseMatrix x1 = eng.xi_pair([&](double x) { return x * wxl(x); }, false, false);
    DenseMatrix e3 = eng.eta_pair(cb, ck, [&](double e) { return e * e * e * wel(e); }, false, false);
    return {{x3, e1, f}, {x1, e3, -f}};
}

inline std::vector<KronTerm> x_length_terms(const Engine& eng, const SymmetryBlock& bra,
                                            const SymmetryBlock& ket) {
    const int L = ket.lambda;  // bra = L+1
    const double R = eng.spec.R;
    const double f = std::pow(R, 4) / 32.0;
    const DenseMatrix cb = eng.eta_c(bra), ck = eng.eta_c(ket);
    DenseMatrix x2 = eng.xi_pair([L](double x) { return x * x * std::pow(x * x - 1.0, L + 1); },
                                 false, false);
    DenseMatrix e1 = eng.eta_pair(cb, ck, [L](double e) { return std::pow(1.0 - e * e, L + 1); },
                                  false, false);
    DenseMatrix x0 = eng.xi_pair([L](double x) { return std::pow(x * x - 1.0, L + 1); }, false, false);
    DenseMatrix e2 = eng.eta_pair(cb, ck,
                                  [L](double e) { return e * e * std::pow(1.0 - e * e, L + 1); },
                                  false, false);
    return {{x2, e1, f}, {x0, e2, -f}};
}

enum class CouplingGauge { velocity, length };

inline DenseMatrix coupling_matrix(const Engine& eng, const MolecularEigenBasis& mb, int ib_bra,
                                   int ib_ket, CouplingGauge gauge) {
    const SymmetryBlock& bra = mb.sectors[static_cast<size_t>(ib_bra)];
    const SymmetryBlock& ket = mb.sectors[static_cast<size_t>(ib_ket)];
    std::vector<KronTerm> terms;
    if (bra.lambda == ket.lambda) {
        terms = gauge == CouplingGauge::velocity ? z_velocity_terms(eng, bra, ket)
                                                 : z_length_terms(eng, bra, ket);
    } else if (bra.lambda == ket.lambda + 1) {
        terms = gauge == CouplingGauge::velocity ? x_raise_terms(eng, bra, ket)
                                                 : x_length_terms(eng, bra, ket);
    } else if (bra.lambda == ket.lambda - 1) {
        if (gauge != CouplingGauge::velocity)
            throw ConfigError("length couplings are built in raising order");
        terms = x_lower_terms(eng, bra, ket);
    } else {
        throw ConfigError("no dipole coupling between " + bra.str() + " and " + ket.str());
    }
    const int me_bra = eng.eta_c(bra).cols(), me_ket = eng.eta_c(ket).cols();
    return transform_kron(terms, mb.basis.blocks[static_cast<size_t>(ib_bra)].coeffs,
                          mb.basis.blocks[static_cast<size_t>(ib_ket)].coeffs, me_bra, me_ket);
}

} // namespace tc_detail

// Velocity-gauge couplings between the reflection-symmetrized (propagated)
// states.  Parallel: equal-Lambda, opposite-parity blocks.  Perpendicular:
// |dLambda| = 1, opposite-parity blocks; elements carry sqrt(2) exactly when
// Lambda + Lambda' = 1.  Couplings <psi'|e.grad|psi*> between a state and a
// conjugated partner vanish unless (Lambda'=0, Lambda=1), which is what the
// sqrt(2) bookkeeping encodes; no other cross blocks exist.
inline DipoleCouplingSet molecular_dipole_set(const MolecularEigenBasis& mb, Orientation o) {
    if (o == Orientation::isotropic) throw ConfigError("two-center orientation must be parallel or perpendicular");
    tc_detail::Engine eng(mb.spec);
    DipoleCouplingSet set;
    set.orientation = o;
    // one stored block per unordered pair; the reverse block is -d^T
    for (size_t ik = 0; ik < mb.sectors.size(); ++ik) {
        for (size_t ib = ik + 1; ib < mb.sectors.size(); ++ib) {
            const auto& ket = mb.sectors[ik];
            const auto& bra = mb.sectors[ib];
            if (bra.parity == ket.parity) continue;
            const bool pair_ok = (o == Orientation::parallel)
                                     ? (bra.lambda == ket.lambda)
                                     : (std::abs(bra.lambda - ket.lambda) == 1);
            if (!pair_ok) continue;
            CouplingBlock cb;
            cb.from = static_cast<int>(ik);
            cb.to = static_cast<int>(ib);
            if (bra.lambda >= ket.lambda) {
                cb.d = tc_detail::coupling_matrix(eng, mb, static_cast<int>(ib),
                                                  static_cast<int>(ik),
                                                  tc_detail::CouplingGauge::velocity);
            } else {
                // stored direction lowers Lambda: use minus the transposed raise
                DenseMatrix raise = tc_detail::coupling_matrix(
                    eng, mb, static_cast<int>(ik), static_cast<int>(ib),
                    tc_detail::CouplingGauge::velocity);
                cb.d = raise.transposed();
                for (int i = 0; i < cb.d.rows(); ++i)
                    for (int j = 0; j < cb.d.cols(); ++j) cb.d(i, j) = -cb.d(i, j);
            }
            cb.sym_factor = (bra.lambda + ket.lambda == 1) ? std::sqrt(2.0) : 1.0;
            if (cb.sym_factor != 1.0)
                for (int i = 0; i < cb.d.rows(); ++i)
                    for (int j = 0; j < cb.d.cols(); ++j) cb.d(i, j) *= cb.sym_factor;
            set.blocks.push_back(std::move(cb));
        }
    }
    return set;
}

// Length-gauge analogue (gauge cross-checks only; raising order, no sqrt(2)).
inline DipoleCouplingSet molecular_length_set(const MolecularEigenBasis& mb, Orientation o) {
    tc_detail::Engine eng(mb.spec);
    DipoleCouplingSet set;
    set.orientation = o;
    for (size_t ik = 0; ik < mb.sectors.size(); ++ik)
        for (size_t ib = ik + 1; ib < mb.sectors.size(); ++ib) {
            const auto& ket = mb.sectors[ik];
            const auto& bra = mb.sectors[ib];
            if (bra.parity == ket.parity) continue;
            const bool pair_ok = (o == Orientation::parallel) ? (bra.lambda == ket.lambda)
                                                              : (bra.lambda == ket.lambda + 1);
            if (!pair_ok) continue;
            CouplingBlock cb;
            cb.from = static_cast<int>(ik);
            cb.to = static_cast<int>(ib);
            cb.d = tc_detail::coupling_matrix(eng, mb, static_cast<int>(ib), static_cast<int>(ik),
                                              tc_detail::CouplingGauge::length);
            set.blocks.push_back(std::move(cb));
        }
    return set;
}

// Reference system that keeps both degenerate partners M = +-Lambda as
// explicit complex states with raw (un-symmetrized) couplings.  Propagating
// it from the sigma_g ground state must reproduce the symmetrized system's
// populations identically.
struct SignedReference {
    MolecularEigenBasis mb;       // blocks duplicated per signed M
    DipoleCouplingSet couplings;  // raw, no sqrt(2)
};

inline SignedReference build_signed_reference(const TwoCenterSpec& spec) {
    SignedReference ref;
    const auto sectors = propagation_blocks(Orientation::perpendicular, spec.lambda_max);
    MolecularEigenBasis solved = build_molecular_basis(spec, sectors);
    ref.mb.spec = spec;
    ref.mb.basis.ionisation_threshold = solved.basis.ionisation_threshold;
    // block layout: sigma_g, then (M=+L, M=-L) pairs
    ref.mb.sectors.push_back(sectors[0]);
    ref.mb.basis.blocks.push_back(solved.basis.blocks[0]);
    for (size_t i = 1; i < sectors.size(); ++i) {
        for (int sign : {+1, -1}) {
            StateBlock sb = solved.basis.blocks[i];
            sb.label.m_signed = sign * sectors[i].lambda;
            ref.mb.sectors.push_back(sectors[i]);
            ref.mb.basis.blocks.push_back(std::move(sb));
        }
    }
    tc_detail::Engine eng(spec);
    ref.couplings.orientation = Orientation::perpendicular;
    // raw raise matrices per Lambda -> Lambda+1 (same values for the mirrored
    // M < 0 chain)
    for (size_t i = 0; i + 1 < sectors.size(); ++i) {
        const DenseMatrix d = tc_detail::coupling_matrix(eng, solved, static_cast<int>(i + 1),
                                                         static_cast<int>(i),
                                                         tc_detail::CouplingGauge::velocity);
        auto block_of = [&](int lambda, int sign) {
            if (lambda == 0) return 0;
            return 1 + 2 * (lambda - 1) + (sign > 0 ? 0 : 1);
        };
        // block_of(0, sign) is the single M = 0 block for either sign, so the
        // sigma chain fans out into both signed towers
        for (int sign : {+1, -1}) {
            CouplingBlock cb;
            cb.from = block_of(sectors[i].lambda, sign);
            cb.to = block_of(sectors[i + 1].lambda, sign);
            cb.d = d;
            ref.couplings.blocks.push_back(std::move(cb));
        }
    }
    return ref;
}

// Reflection-symmetric combination of a degenerate pair, phi = (psi + psi*)/sqrt(2).
// The azimuthal content is tracked explicitly: amplitudes of exp(+-i Lambda phi).
struct AzimuthalState {
    int lambda = 0;
    std::complex<double> c_plus{1.0, 0.0};   // exp(+i Lambda phi) amplitude
    std::complex<double> c_minus{0.0, 0.0};  // exp(-i Lambda phi) amplitude
    bool identity_flagged = false;

    double norm_sq() const { return std::norm(c_plus) + std::norm(c_minus); }
};

// Reflection in a plane containing the molecular axis; with the real radial
// parts of this basis it acts as complex conjugation.
inline AzimuthalState reflect(const AzimuthalState& s) {
    AzimuthalState r = s;
    r.c_plus = std::conj(s.c_minus);
    r.c_minus = std::conj(s.c_plus);
    return r;
}

inline AzimuthalState symmetrize_degenerate(const AzimuthalState& psi) {
    if (psi.lambda == 0) {
        AzimuthalState out = psi;
        out.identity_flagged = true;  // Lambda = 0 is already reflection symmetric
        return out;
    }
    const AzimuthalState refl = reflect(psi);
    AzimuthalState out;
    out.lambda = psi.lambda;
    const double inv = 1.0 / std::sqrt(2.0);
    out.c_plus = (psi.c_plus + refl.c_plus) * inv;
    out.c_minus = (psi.c_minus + refl.c_minus) * inv;
    return out;
}

} // namespace specbox

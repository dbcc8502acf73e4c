#pragma once

// Time propagation of the expansion-coefficient ODE system
//
//   i dC/dt = E C + i A(t) D C
//
// with diagonal field-free energies E and block-sparse antisymmetric
// velocity couplings D.  Integrated as paired real components with a
// variable-order, variable-step Adams method (GSL msadams).  An interaction
// picture C~ = exp(iE(t-t0)) C removes the diagonal phases; observables are
// representation independent.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include <chrono>
#include <complex>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "specbox/basis_types.hpp"
#include "specbox/errors.hpp"
#include "specbox/pulse.hpp"

namespace specbox {

struct PropagationOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double e_cut = 11.0;               // a.u.; states above are excluded
    bool interaction_picture = true;
    int initial_block = 0;             // default: ground state of the lowest block
    int initial_state = 0;
    int checkpoint_samples = 0;        // 0: none; else evenly spaced over the window

    void validate() const {
        if (!(rtol > 0 && rtol <= 1e-2) || !(atol > 0 && atol <= 1e-2))
            throw ConfigError("propagation tolerances must be in (0, 1e-2]");
    }
};

struct Checkpoint {
    double t;
    double p_gs;
    double norm;
};

struct PropagationResult {
    std::vector<std::complex<double>> coeffs;  // kept states, block-concatenated
    std::vector<int> block_offsets;            // offset per kept block, plus total
    std::vector<double> energies;              // kept-state energies
    std::vector<BlockLabel> block_labels;
    double ionisation_threshold = 0.0;
    int ground_index = 0;
    double norm_drift = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
    double wall_seconds = 0.0;
    std::vector<Checkpoint> checkpoints;

    double norm_sq() const {
        double s = 0;
        for (const auto& c : coeffs) s += std::norm(c);
        return s;
    }
};

// Energy-cut view of a basis + couplings, flattened for the integrator.
struct PackedSystem {
    std::vector<double> energies;
    std::vector<int> offsets;       // per block; offsets.back() == total
    std::vector<BlockLabel> labels;
    struct Coupling {
        int from, to;
        DenseMatrix d;  // kept_to x kept_from
    };
    std::vector<Coupling> couplings;
    double ionisation_threshold = 0.0;
    int ground_index = 0;

    int size() const { return offsets.empty() ? 0 : offsets.back(); }
};

inline PackedSystem pack_system(const SpectralBasis& basis, const DipoleCouplingSet& couplings,
                                const PropagationOptions& opts) {
    PackedSystem ps;
    ps.ionisation_threshold = basis.ionisation_threshold;
    std::vector<int> kept(basis.blocks.size());
    int off = 0;
    for (size_t b = 0; b < basis.blocks.size(); ++b) {
        const auto& en = basis.blocks[b].energies;
        int m = 0;
        while (m < static_cast<int>(en.size()) && en[static_cast<size_t>(m)] <= opts.e_cut) ++m;
        kept[b] = m;
        ps.offsets.push_back(off);
        ps.labels.push_back(basis.blocks[b].label);
        for (int i = 0; i < m; ++i) ps.energies.push_back(en[static_cast<size_t>(i)]);
        off += m;
    }
    ps.offsets.push_back(off);
    if (opts.initial_block >= static_cast<int>(basis.blocks.size()) ||
        opts.initial_state >= kept[static_cast<size_t>(opts.initial_block)])
        throw ConfigError("initial state not present below the energy cut-off");
    ps.ground_index = ps.offsets[static_cast<size_t>(opts.initial_block)] + opts.initial_state;
    if (opts.e_cut <= ps.energies[static_cast<size_t>(ps.ground_index)])
        throw ConfigError("energy cut-off must lie above the initial-state energy");
    for (const auto& cb : couplings.blocks) {
        const int nf = kept[static_cast<size_t>(cb.from)], nt = kept[static_cast<size_t>(cb.to)];
        if (cb.d.cols() < nf || cb.d.rows() < nt)
            throw ConfigError("couplings were built from a different basis");
        PackedSystem::Coupling c;
        c.from = cb.from;
        c.to = cb.to;
        c.d = cb.d.slice(0, nt, 0, nf);
        ps.couplings.push_back(std::move(c));
    }
    return ps;
}

namespace detail {

struct RhsContext {
    const PackedSystem* sys;
    const std::function<double(double)>* a_of_t;
    bool interaction_picture;
    double t0;
    // scratch
    std::vector<std::complex<double>> w, z;
    std::vector<std::complex<double>> phase;
};

// y is interleaved re/im; std::complex<double> is layout compatible.
inline int rhs(double t, const double y[], double dydt[], void* params) {
    auto& ctx = *static_cast<RhsContext*>(params);
    const PackedSystem& s = *ctx.sys;
    const int n = s.size();
    const auto* c = reinterpret_cast<const std::complex<double>*>(y);
    auto* dc = reinterpret_cast<std::complex<double>*>(dydt);
    const double a = (*ctx.a_of_t)(t);

    if (ctx.interaction_picture) {
        const double dt = t - ctx.t0;
        for (int i = 0; i < n; ++i) {
            const double ph = -s.energies[static_cast<size_t>(i)] * dt;
            ctx.phase[static_cast<size_t>(i)] = {std::cos(ph), std::sin(ph)};
        }
        for (int i = 0; i < n; ++i) {
            ctx.w[static_cast<size_t>(i)] = ctx.phase[static_cast<size_t>(i)] * c[i];
            ctx.z[static_cast<size_t>(i)] = 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            ctx.w[static_cast<size_t>(i)] = c[i];
            ctx.z[static_cast<size_t>(i)] = 0.0;
        }
    }

    // z += D w (block-sparse, reverse blocks via antisymmetry)
    for (const auto& cpl : s.couplings) {
        const int of = s.offsets[static_cast<size_t>(cpl.from)];
        const int ot = s.offsets[static_cast<size_t>(cpl.to)];
        const int nf = cpl.d.cols(), nt = cpl.d.rows();
        for (int i = 0; i < nt; ++i) {
            const double* row = cpl.d.row(i);
            std::complex<double> acc = 0.0;
            for (int j = 0; j < nf; ++j) acc += row[j] * ctx.w[static_cast<size_t>(of + j)];
            ctx.z[static_cast<size_t>(ot + i)] += acc;
        }
        for (int j = 0; j < nf; ++j) {
            std::complex<double> acc = 0.0;
            for (int i = 0; i < nt; ++i) acc += cpl.d(i, j) * ctx.w[static_cast<size_t>(ot + i)];
            ctx.z[static_cast<size_t>(of + j)] -= acc;  // -D^T block
        }
    }

    if (ctx.interaction_picture) {
        for (int i = 0; i < n; ++i)
            dc[i] = a * std::conj(ctx.phase[static_cast<size_t>(i)]) * ctx.z[static_cast<size_t>(i)];
    } else {
        const std::complex<double> mi(0.0, -1.0);
        for (int i = 0; i < n; ++i)
            dc[i] = mi * s.energies[static_cast<size_t>(i)] * c[i] + a * ctx.z[static_cast<size_t>(i)];
    }
    return GSL_SUCCESS;
}

} // namespace detail

// Integrate the packed system from t0 to t1 with driving amplitude a_of_t.
// Deterministic for fixed inputs and tolerances.
inline PropagationResult propagate_system(const PackedSystem& sys,
                                          const std::function<double(double)>& a_of_t, double t0,
                                          double t1, const PropagationOptions& opts,
                                          const std::vector<std::complex<double>>* initial = nullptr) {
    opts.validate();
    const auto wall0 = std::chrono::steady_clock::now();
    const int n = sys.size();
    if (n == 0) throw ConfigError("empty system");
    if (initial && static_cast<int>(initial->size()) != n)
        throw ConfigError("initial coefficient vector does not match the packed system");

    detail::RhsContext ctx;
    ctx.sys = &sys;
    ctx.a_of_t = &a_of_t;
    ctx.interaction_picture = opts.interaction_picture;
    ctx.t0 = t0;
    ctx.w.resize(static_cast<size_t>(n));
    ctx.z.resize(static_cast<size_t>(n));
    ctx.phase.resize(static_cast<size_t>(n));

    std::vector<std::complex<double>> y(static_cast<size_t>(n), 0.0);
    if (initial) y = *initial;
    else y[static_cast<size_t>(sys.ground_index)] = 1.0;

    gsl_odeiv2_system gsys{detail::rhs, nullptr, 2 * static_cast<size_t>(n), &ctx};
    const double span = t1 - t0;
    gsl_odeiv2_driver* drv = gsl_odeiv2_driver_alloc_y_new(&gsys, gsl_odeiv2_step_msadams,
                                                           span / 1e4, opts.atol, opts.rtol);
    if (!drv) throw NumericError("failed to allocate the multistep integrator");

    PropagationResult res;
    res.energies = sys.energies;
    res.block_offsets = sys.offsets;
    res.block_labels = sys.labels;
    res.ionisation_threshold = sys.ionisation_threshold;
    res.ground_index = sys.ground_index;

    // norm blow-up should abort mid-run, so integrate in segments even when
    // no checkpoints were requested
    const int n_stops = opts.checkpoint_samples > 0 ? opts.checkpoint_samples : 8;
    std::vector<double> stops;
    for (int j = 1; j <= n_stops; ++j) stops.push_back(t0 + span * j / n_stops);
    stops.back() = t1;

    double t = t0;
    auto* yd = reinterpret_cast<double*>(y.data());
    const double norm_abort = 100.0 * opts.rtol;
    for (double target : stops) {
        const int status = gsl_odeiv2_driver_apply(drv, &t, target, yd);
        if (status != GSL_SUCCESS) {
            const double h_now = drv->h;
            gsl_odeiv2_driver_free(drv);
            if (status == GSL_ENOPROG || std::abs(h_now) < 1e-14 * std::abs(span))
                throw NumericError("step-size underflow (stiffness) at t=" + std::to_string(t));
            throw NumericError("integrator failure at t=" + std::to_string(t) + " (status " +
                               std::to_string(status) + ")");
        }
        double norm = 0;
        for (const auto& c : y) norm += std::norm(c);
        if (std::abs(1.0 - norm) > norm_abort) {
            gsl_odeiv2_driver_free(drv);
            throw NumericError("norm drift " + std::to_string(std::abs(1.0 - norm)) +
                               " exceeds 100x tolerance at t=" + std::to_string(t));
        }
        if (opts.checkpoint_samples > 0)
            res.checkpoints.push_back(
                {t, std::norm(y[static_cast<size_t>(sys.ground_index)]), norm});
    }

    res.steps_accepted = static_cast<long>(drv->e->count);
    res.steps_rejected = static_cast<long>(drv->e->failed_steps);
    gsl_odeiv2_driver_free(drv);

    if (opts.interaction_picture) {
        // back to the raw picture: C = exp(-iE(t1-t0)) C~
        for (int i = 0; i < n; ++i) {
            const double ph = -sys.energies[static_cast<size_t>(i)] * (t1 - t0);
            y[static_cast<size_t>(i)] *= std::complex<double>(std::cos(ph), std::sin(ph));
        }
    }
    res.coeffs = std::move(y);
    res.norm_drift = std::abs(1.0 - res.norm_sq());
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return res;
}

// Propagate through a laser pulse over its full window.
inline PropagationResult propagate(const SpectralBasis& basis, const DipoleCouplingSet& couplings,
                                   const PulseSpec& pulse, const PropagationOptions& opts) {
    pulse.validate();
    const PackedSystem sys = pack_system(basis, couplings, opts);
    const double tp = pulse.duration();
    const std::function<double(double)> a = [&pulse](double t) {
        return vector_potential(pulse, t);
    };
    return propagate_system(sys, a, -0.5 * tp, 0.5 * tp, opts);
}

} // namespace specbox

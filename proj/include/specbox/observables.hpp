#pragma once

// Yield extraction, rate conversion, N-photon thresholds, unit conversions,
// frequency scans and the bandwidth convolution model.

#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "specbox/constants.hpp"
#include "specbox/errors.hpp"
#include "specbox/propagator.hpp"
#include "specbox/pulse.hpp"

namespace specbox {

struct YieldRecord {
    double omega_ev = 0.0;
    double lambda_nm = 0.0;
    double p_gs = 0.0;
    double y_exc = 0.0;
    double y_ion = 0.0;
    std::string orientation = "isotropic";
    int cycles = 0;
    double intensity_wcm2 = 0.0;
    std::string preset_id;
    bool factor_two = false;  // doubles reported yields at write-out only
    std::string status = "ok";
    double norm_drift = 0.0;
};

// Partition of the final norm into ground / bound-excited / ionised weight.
// Populations are taken from the raw coefficients; the partition identity
// P_gs + Y_exc + Y_ion = |C|^2 holds by construction.
inline YieldRecord yields(const PropagationResult& r) {
    YieldRecord y;
    y.p_gs = std::norm(r.coeffs[static_cast<size_t>(r.ground_index)]);
    double ion = 0.0, total = 0.0;
    for (size_t i = 0; i < r.coeffs.size(); ++i) {
        const double w = std::norm(r.coeffs[i]);
        total += w;
        if (r.energies[i] > r.ionisation_threshold) ion += w;
    }
    y.y_ion = ion;
    y.y_exc = total - y.p_gs - ion;
    y.norm_drift = r.norm_drift;
    return y;
}

inline YieldRecord yields(const PropagationResult& r, const SpectralBasis& basis) {
    if (r.block_offsets.size() != basis.blocks.size() + 1)
        throw ConfigError("propagation result does not match this basis");
    if (basis.ionisation_threshold != r.ionisation_threshold)
        throw ConfigError("propagation result does not match this basis (threshold)");
    return yields(r);
}

// R = -ln(1 - Y) / Tp
inline double rate_from_yield(double y, double tp) {
    if (!(y >= 0.0 && y < 1.0)) throw ConfigError("rate_from_yield needs 0 <= Y < 1");
    return -std::log1p(-y) / tp;
}

// omega_N = Ip / N, in eV
inline std::vector<double> photon_thresholds(double ip_au, int n_max) {
    if (!(ip_au > 0)) throw ConfigError("photon_thresholds: Ip must be positive");
    std::vector<double> out;
    for (int n = 1; n <= n_max; ++n) out.push_back(constants::au_to_ev(ip_au) / n);
    return out;
}

struct UnitTriple {
    double omega_ev;
    double omega_au;
    double lambda_nm;
};

inline UnitTriple units_from_ev(double ev) {
    if (!(ev > 0)) throw ConfigError("convert_units: non-positive input");
    const double au = constants::ev_to_au(ev);
    return {ev, au, constants::lambda_nm_factor / au};
}

inline UnitTriple units_from_nm(double nm) {
    if (!(nm > 0)) throw ConfigError("convert_units: non-positive input");
    const double au = constants::lambda_nm_factor / nm;
    return {constants::au_to_ev(au), au, nm};
}

// |F_w0(w)|^2 evaluated on a carrier grid; each grid point uses its own
// pulse window Tp(w) = 2 pi Nc / w, matching a fixed-cycle-count scan.
inline std::vector<double> convolution_model(double omega0_au, int cycles, double intensity_wcm2,
                                             const std::vector<double>& grid_au) {
    if (grid_au.empty() || !(omega0_au >= grid_au.front() && omega0_au <= grid_au.back()))
        throw ConfigError("convolution model: omega0 outside grid span");
    std::vector<double> out;
    out.reserve(grid_au.size());
    for (double w : grid_au) {
        PulseSpec p{w, cycles, intensity_wcm2};
        const double f = fourier_component(p, omega0_au);
        out.push_back(f * f);
    }
    return out;
}

struct ScanRequest {
    std::vector<double> omegas_ev;  // monotone grid
    std::vector<Orientation> orientations;
    int cycles = 10;
    double intensity_wcm2 = 1e13;
    PropagationOptions prop;
    std::string preset_id;
    bool factor_two = false;
};

// One record per (frequency, orientation), emitted in grid-major order
// independent of execution order.  Point failures yield an error-status
// record; the scan continues.
inline std::vector<YieldRecord> scan(const SpectralBasis& basis,
                                     const std::vector<const DipoleCouplingSet*>& couplings,
                                     const ScanRequest& req, int threads = 1) {
    for (size_t i = 1; i < req.omegas_ev.size(); ++i)
        if (!(req.omegas_ev[i] > req.omegas_ev[i - 1]))
            throw ConfigError("scan grid must be strictly increasing");
    if (couplings.size() != req.orientations.size())
        throw ConfigError("scan: one coupling set per orientation required");

    struct Job { size_t ig, io; };
    std::vector<Job> jobs;
    for (size_t ig = 0; ig < req.omegas_ev.size(); ++ig)
        for (size_t io = 0; io < req.orientations.size(); ++io) jobs.push_back({ig, io});
    std::vector<YieldRecord> out(jobs.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const auto& job = jobs[j];
            YieldRecord rec;
            rec.omega_ev = req.omegas_ev[job.ig];
            rec.lambda_nm = units_from_ev(rec.omega_ev).lambda_nm;
            rec.orientation = to_string(req.orientations[job.io]);
            rec.cycles = req.cycles;
            rec.intensity_wcm2 = req.intensity_wcm2;
            rec.preset_id = req.preset_id;
            rec.factor_two = req.factor_two;
            try {
                PulseSpec pulse{constants::ev_to_au(rec.omega_ev), req.cycles,
                                req.intensity_wcm2};
                auto res = propagate(basis, *couplings[job.io], pulse, req.prop);
                const YieldRecord y = yields(res, basis);
                rec.p_gs = y.p_gs;
                rec.y_exc = y.y_exc;
                rec.y_ion = y.y_ion;
                rec.norm_drift = y.norm_drift;
            } catch (const std::exception& e) {
                rec.status = std::string("error: ") + e.what();
            }
            out[j] = std::move(rec);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

} // namespace specbox

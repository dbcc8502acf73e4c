#pragma once

// Glue between configuration and the physics layers: build (or load from
// cache) the eigenbasis and dipole sets a config asks for, and run single
// propagations or frequency scans from it.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "specbox/cache.hpp"
#include "specbox/config.hpp"
#include "specbox/model_atom.hpp"
#include "specbox/observables.hpp"
#include "specbox/propagator.hpp"
#include "specbox/two_center.hpp"

namespace specbox {

inline std::string cache_directory() {
    if (const char* env = std::getenv("SPECBOX_CACHE_DIR")) return env;
    return "specbox_cache";
}

inline std::string cache_path_for(const RunConfig& c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_fingerprint(c)));
    return (std::filesystem::path(cache_directory()) / ("basis_" + std::string(buf) + ".bin"))
        .string();
}

inline std::vector<SymmetryBlock> sectors_for(const RunConfig& c) {
    std::vector<SymmetryBlock> sectors = {{0, Parity::gerade}};
    const auto wanted = c.orientations();
    auto has = [&](Orientation o) {
        for (auto w : wanted)
            if (w == o) return true;
        return false;
    };
    if (has(Orientation::parallel)) sectors.push_back({0, Parity::ungerade});
    if (has(Orientation::perpendicular))
        for (int l = 1; l <= c.tc.lambda_max; ++l)
            sectors.push_back({l, l % 2 ? Parity::ungerade : Parity::gerade});
    return sectors;
}

inline CachedBasis build_system(const RunConfig& cfg) {
    CachedBasis cb;
    if (cfg.is_atom()) {
        ModelAtomSpec spec = cfg.atom;
        if (cfg.has_target_ip) spec.alpha = calibrate_alpha(cfg.target_ip, spec);
        AtomicEigenBasis ab = solve_atom(spec);
        cb.couplings.push_back(atomic_dipole_set(ab));
        cb.basis = std::move(ab.basis);
    } else {
        MolecularEigenBasis mb = build_molecular_basis(cfg.tc, sectors_for(cfg));
        for (auto o : cfg.orientations()) cb.couplings.push_back(molecular_dipole_set(mb, o));
        cb.basis = std::move(mb.basis);
    }
    return cb;
}

// Cache round trip keyed by the config fingerprint.
inline CachedBasis load_or_build(const RunConfig& cfg, bool force_rebuild = false,
                                 bool* was_cached = nullptr) {
    const std::string path = cache_path_for(cfg);
    const std::uint64_t fp = config_fingerprint(cfg);
    if (!force_rebuild) {
        if (auto cached = read_cache(path, fp)) {
            if (was_cached) *was_cached = true;
            return std::move(*cached);
        }
    }
    if (was_cached) *was_cached = false;
    CachedBasis cb = build_system(cfg);
    std::filesystem::create_directories(cache_directory());
    write_cache(path, fp, cb);
    return cb;
}

inline const DipoleCouplingSet& coupling_for(const CachedBasis& cb, Orientation o) {
    for (const auto& set : cb.couplings)
        if (set.orientation == o) return set;
    throw ConfigError("no coupling set for orientation " + to_string(o));
}

// Single-frequency propagation -> one yield record (+ checkpoint stream).
inline YieldRecord run_propagate(const RunConfig& cfg, const CachedBasis& cb,
                                 std::vector<Checkpoint>* checkpoints = nullptr) {
    if (!cfg.has_omega) throw ConfigError("propagate needs pulse.omega_ev");
    const auto orients = cfg.orientations();
    if (orients.size() != 1)
        throw ConfigError("propagate needs a single orientation (parallel or perpendicular)");
    PulseSpec pulse{constants::ev_to_au(cfg.omega_ev), cfg.cycles, cfg.intensity_wcm2};
    auto res = propagate(cb.basis, coupling_for(cb, orients[0]), pulse, cfg.prop);
    YieldRecord rec = yields(res, cb.basis);
    rec.omega_ev = cfg.omega_ev;
    rec.lambda_nm = units_from_ev(cfg.omega_ev).lambda_nm;
    rec.orientation = to_string(orients[0]);
    rec.cycles = cfg.cycles;
    rec.intensity_wcm2 = cfg.intensity_wcm2;
    rec.preset_id = cfg.preset_id;
    rec.factor_two = cfg.factor_two;
    if (checkpoints) *checkpoints = res.checkpoints;
    return rec;
}

inline std::vector<YieldRecord> run_scan(const RunConfig& cfg, const CachedBasis& cb,
                                         int threads = 1) {
    if (!cfg.has_grid) throw ConfigError("scan needs pulse.grid_ev");
    ScanRequest req;
    for (int i = 0; i < cfg.grid_points; ++i)
        req.omegas_ev.push_back(cfg.grid_from_ev + (cfg.grid_to_ev - cfg.grid_from_ev) * i /
                                                       (cfg.grid_points - 1));
    req.orientations = cfg.orientations();
    req.cycles = cfg.cycles;
    req.intensity_wcm2 = cfg.intensity_wcm2;
    req.prop = cfg.prop;
    req.prop.checkpoint_samples = 0;
    req.preset_id = cfg.preset_id;
    req.factor_two = cfg.factor_two;
    std::vector<const DipoleCouplingSet*> sets;
    for (auto o : req.orientations) sets.push_back(&coupling_for(cb, o));
    return scan(cb.basis, sets, req, threads);
}

} // namespace specbox

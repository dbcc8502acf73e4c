#pragma once

// Run configuration: JSON with fixed sections (system, basis, pulse,
// propagation, output).  Unknown keys are rejected, every field has a
// documented default (docs/config.md), and named presets pin the shipped
// basis sizes.  The fingerprint of the canonicalized system+basis+orientation
// sections keys the basis cache.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include "specbox/constants.hpp"
#include "specbox/errors.hpp"
#include "specbox/model_atom.hpp"
#include "specbox/propagator.hpp"
#include "specbox/two_center.hpp"

namespace specbox {

using nlohmann::json;

struct RunConfig {
    std::string system_kind;  // "model_atom" | "two_center"

    ModelAtomSpec atom;
    bool has_target_ip = false;
    double target_ip = 0.0;

    TwoCenterSpec tc;

    int cycles = 10;
    double intensity_wcm2 = 1e13;
    bool has_omega = false;
    double omega_ev = 0.0;
    bool has_grid = false;
    double grid_from_ev = 0.0, grid_to_ev = 0.0;
    int grid_points = 0;

    PropagationOptions prop;
    std::string orientation = "auto";

    std::string out_path = "out.csv";
    std::string checkpoint_path;
    bool factor_two = false;

    std::string preset_id = "custom";
    json canonical;  // system + basis + orientation, as applied

    bool is_atom() const { return system_kind == "model_atom"; }

    std::vector<Orientation> orientations() const {
        if (is_atom()) return {Orientation::isotropic};
        if (orientation == "parallel") return {Orientation::parallel};
        if (orientation == "perpendicular") return {Orientation::perpendicular};
        return {Orientation::parallel, Orientation::perpendicular};  // both
    }
};

namespace cfg_detail {

inline void reject_unknown(const json& j, const std::string& section,
                           const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, T dflt) {
    if (!j.contains(key)) return dflt;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value type for key '" + key + "'");
    }
}

} // namespace cfg_detail

// Shipped basis presets.
inline void apply_preset(RunConfig& c, const std::string& name) {
    c.preset_id = name;
    if (name == "atom_default") {
        c.system_kind = "model_atom";
        c.atom.r_max = 350.0; c.atom.n_splines = 350; c.atom.order = 15; c.atom.l_max = 3;
    } else if (name == "atom_fast") {
        c.system_kind = "model_atom";
        c.atom.r_max = 120.0; c.atom.n_splines = 140; c.atom.order = 8; c.atom.l_max = 2;
    } else if (name == "h2p_default") {
        c.system_kind = "two_center";
        c.tc.box_radius = 120.0; c.tc.n_xi = 120; c.tc.k_xi = 10;
        c.tc.n_eta = 24; c.tc.k_eta = 8; c.tc.lambda_max = 3;
    } else if (name == "h2p_check") {
        c.system_kind = "two_center";
        c.tc.box_radius = 120.0; c.tc.n_xi = 120; c.tc.k_xi = 10;
        c.tc.n_eta = 24; c.tc.k_eta = 8; c.tc.lambda_max = 5;
    } else if (name == "h2p_small") {
        c.system_kind = "two_center";
        c.tc.box_radius = 35.0; c.tc.n_xi = 40; c.tc.k_xi = 8;
        c.tc.n_eta = 12; c.tc.k_eta = 6; c.tc.lambda_max = 3;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
}

inline RunConfig parse_config(const json& root, const std::string& cli_preset = {}) try {
    using cfg_detail::get_or;
    using cfg_detail::reject_unknown;
    if (!root.is_object()) throw ConfigError("config root must be an object");
    reject_unknown(root, "(root)", {"system", "basis", "pulse", "propagation", "output"});
    for (const char* sec : {"system", "basis", "pulse", "propagation", "output"})
        if (root.contains(sec) && !root.at(sec).is_object())
            throw ConfigError("section '" + std::string(sec) + "' must be an object");

    RunConfig c;
    const json sys = root.value("system", json::object());
    const json bas = root.value("basis", json::object());
    const json pul = root.value("pulse", json::object());
    const json pro = root.value("propagation", json::object());
    const json out = root.value("output", json::object());

    reject_unknown(sys, "system",
                   {"kind", "alpha", "target_ip_au", "l_max", "R", "lambda_max",
                    "include_repulsion", "eta_node_limit"});
    reject_unknown(bas, "basis",
                   {"preset", "r_max", "n_splines", "order", "box_radius", "n_xi", "k_xi",
                    "n_eta", "k_eta", "quad_points"});
    reject_unknown(pul, "pulse", {"cycles", "intensity_wcm2", "omega_ev", "grid_ev"});
    reject_unknown(pro, "propagation",
                   {"rtol", "atol", "e_cut_ev", "interaction_picture", "orientation"});
    reject_unknown(out, "output",
                   {"path", "checkpoint_samples", "checkpoint_path", "factor_two"});

    if (!sys.contains("kind")) throw ConfigError("system.kind is required");
    c.system_kind = sys.at("kind").get<std::string>();
    if (c.system_kind != "model_atom" && c.system_kind != "two_center")
        throw ConfigError("system.kind must be 'model_atom' or 'two_center'");

    std::string preset = get_or<std::string>(bas, "preset", "");
    if (!cli_preset.empty()) preset = cli_preset;
    if (preset.empty()) preset = c.is_atom() ? "atom_default" : "h2p_default";
    apply_preset(c, preset);
    if ((c.is_atom() && c.system_kind != "model_atom") ||
        (!c.is_atom() && c.system_kind != "two_center"))
        throw ConfigError("preset '" + preset + "' does not match system.kind");

    if (c.is_atom()) {
        c.atom.alpha = get_or<double>(sys, "alpha", 0.0);
        if (sys.contains("target_ip_au")) {
            c.has_target_ip = true;
            c.target_ip = sys.at("target_ip_au").get<double>();
        }
        c.atom.l_max = get_or<int>(sys, "l_max", c.atom.l_max);
        c.atom.r_max = get_or<double>(bas, "r_max", c.atom.r_max);
        c.atom.n_splines = get_or<int>(bas, "n_splines", c.atom.n_splines);
        c.atom.order = get_or<int>(bas, "order", c.atom.order);
        c.atom.quad_points = get_or<int>(bas, "quad_points", 0);
    } else {
        c.tc.R = get_or<double>(sys, "R", 2.0);
        c.tc.lambda_max = get_or<int>(sys, "lambda_max", c.tc.lambda_max);
        c.tc.include_repulsion = get_or<bool>(sys, "include_repulsion", true);
        c.tc.eta_node_limit = get_or<int>(sys, "eta_node_limit", -1);
        c.tc.box_radius = get_or<double>(bas, "box_radius", c.tc.box_radius);
        c.tc.n_xi = get_or<int>(bas, "n_xi", c.tc.n_xi);
        c.tc.k_xi = get_or<int>(bas, "k_xi", c.tc.k_xi);
        c.tc.n_eta = get_or<int>(bas, "n_eta", c.tc.n_eta);
        c.tc.k_eta = get_or<int>(bas, "k_eta", c.tc.k_eta);
    }

    c.cycles = get_or<int>(pul, "cycles", 10);
    c.intensity_wcm2 = get_or<double>(pul, "intensity_wcm2", 1e13);
    if (pul.contains("omega_ev")) {
        c.has_omega = true;
        c.omega_ev = pul.at("omega_ev").get<double>();
    }
    if (pul.contains("grid_ev")) {
        const json g = pul.at("grid_ev");
        reject_unknown(g, "pulse.grid_ev", {"from", "to", "points"});
        c.has_grid = true;
        c.grid_from_ev = g.at("from").get<double>();
        c.grid_to_ev = g.at("to").get<double>();
        c.grid_points = g.at("points").get<int>();
        if (c.grid_points < 2 || !(c.grid_to_ev > c.grid_from_ev))
            throw ConfigError("pulse.grid_ev must have points >= 2 and to > from");
    }

    c.prop.rtol = get_or<double>(pro, "rtol", 1e-9);
    c.prop.atol = get_or<double>(pro, "atol", 1e-12);
    c.prop.e_cut = constants::ev_to_au(get_or<double>(pro, "e_cut_ev", 300.0));
    c.prop.interaction_picture = get_or<bool>(pro, "interaction_picture", true);
    c.orientation = get_or<std::string>(pro, "orientation", c.is_atom() ? "isotropic" : "both");
    if (c.is_atom() && c.orientation != "isotropic")
        throw ConfigError("model atom runs are isotropic; drop propagation.orientation");
    if (!c.is_atom() && c.orientation != "parallel" && c.orientation != "perpendicular" &&
        c.orientation != "both")
        throw ConfigError("propagation.orientation must be parallel, perpendicular or both");

    c.out_path = get_or<std::string>(out, "path", "out.csv");
    c.prop.checkpoint_samples = get_or<int>(out, "checkpoint_samples", 0);
    c.checkpoint_path = get_or<std::string>(out, "checkpoint_path", "");
    c.factor_two = get_or<bool>(out, "factor_two", false);

    // canonical view keyed by the cache
    json canon;
    canon["kind"] = c.system_kind;
    if (c.is_atom()) {
        canon["alpha"] = c.atom.alpha;
        canon["target_ip"] = c.has_target_ip ? json(c.target_ip) : json();
        canon["l_max"] = c.atom.l_max;
        canon["r_max"] = c.atom.r_max;
        canon["n"] = c.atom.n_splines;
        canon["k"] = c.atom.order;
        canon["quad"] = c.atom.quad_points;
    } else {
        canon["R"] = c.tc.R;
        canon["lambda_max"] = c.tc.lambda_max;
        canon["repulsion"] = c.tc.include_repulsion;
        canon["eta_node_limit"] = c.tc.eta_node_limit;
        canon["box"] = c.tc.box_radius;
        canon["n_xi"] = c.tc.n_xi;
        canon["k_xi"] = c.tc.k_xi;
        canon["n_eta"] = c.tc.n_eta;
        canon["k_eta"] = c.tc.k_eta;
    }
    canon["orientation"] = c.is_atom() ? "isotropic" : c.orientation;
    c.canonical = std::move(canon);
    return c;
} catch (const json::exception& e) {
    throw ConfigError(std::string("config value error: ") + e.what());
}

inline RunConfig load_config_file(const std::string& path, const std::string& cli_preset = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return parse_config(root, cli_preset);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t config_fingerprint(const RunConfig& c) { return fnv1a64(c.canonical.dump()); }

} // namespace specbox

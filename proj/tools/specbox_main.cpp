// specbox command-line interface.
//
// Subcommands: basis, propagate, scan, analyze.  Exit codes: 0 success,
// 1 configuration error, 2 numerical failure, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "specbox/constants.hpp"
#include "specbox/csv.hpp"
#include "specbox/driver.hpp"

namespace {

using namespace specbox;

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string output;
    int threads = 1;
    bool force_rebuild = false;
};

RunConfig load(const CommonArgs& a) {
    RunConfig cfg = load_config_file(a.config_path, a.preset);
    if (!a.output.empty()) cfg.out_path = a.output;
    return cfg;
}

int cmd_basis(const CommonArgs& a) {
    RunConfig cfg = load(a);
    bool was_cached = false;
    CachedBasis cb = load_or_build(cfg, a.force_rebuild, &was_cached);
    std::printf("%s basis: fingerprint %016llx, %d states in %zu blocks (%s)\n",
                cfg.system_kind.c_str(),
                static_cast<unsigned long long>(config_fingerprint(cfg)),
                cb.basis.total_states(), cb.basis.blocks.size(),
                was_cached ? "cache hit" : "built");
    for (const auto& b : cb.basis.blocks)
        std::printf("  block %-10s %5d states, E0 = %.8f\n", b.label.str().c_str(),
                    b.num_states(), b.energies.empty() ? 0.0 : b.energies[0]);
    return 0;
}

int cmd_propagate(const CommonArgs& a) {
    RunConfig cfg = load(a);
    CachedBasis cb = load_or_build(cfg, a.force_rebuild);
    std::vector<Checkpoint> cps;
    YieldRecord rec = run_propagate(cfg, cb, &cps);
    write_yield_csv(cfg.out_path, {rec});
    if (!cfg.checkpoint_path.empty() && cfg.prop.checkpoint_samples > 0)
        write_checkpoint_csv(cfg.checkpoint_path, cps);
    std::printf("wrote %s (P_gs=%.6g Y_exc=%.6g Y_ion=%.6g, norm drift %.2e)\n",
                cfg.out_path.c_str(), rec.p_gs, rec.y_exc, rec.y_ion, rec.norm_drift);
    return 0;
}

int cmd_scan(const CommonArgs& a) {
    RunConfig cfg = load(a);
    CachedBasis cb = load_or_build(cfg, a.force_rebuild);
    auto recs = run_scan(cfg, cb, a.threads);
    write_yield_csv(cfg.out_path, recs);
    int failed = 0;
    for (const auto& r : recs)
        if (r.status != "ok") ++failed;
    std::printf("wrote %s: %zu records (%d failed)\n", cfg.out_path.c_str(), recs.size(), failed);
    return 0;
}

int analyze_ip_curve(double a_min, double a_max, int points, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "alpha,ip_numeric_au,ip_approx_au\n";
    ModelAtomSpec spec;
    spec.r_max = 200.0;
    spec.n_splines = 400;
    spec.order = 12;
    for (int i = 0; i < points; ++i) {
        const double alpha = a_min + (a_max - a_min) * i / (points - 1);
        spec.alpha = alpha;
        out << format_g10(alpha) << ',' << format_g10(computed_ip(spec)) << ','
            << format_g10(ip_approx(alpha)) << '\n';
    }
    return 0;
}

int analyze_fourier(int cycles, double intensity, double from_ev, double to_ev, int points,
                    double omega0_ev, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "omega_eV,F_au,F_sq_au\n";
    for (int i = 0; i < points; ++i) {
        const double w_ev = from_ev + (to_ev - from_ev) * i / (points - 1);
        PulseSpec p{constants::ev_to_au(w_ev), cycles, intensity};
        const double f = fourier_component(p, constants::ev_to_au(omega0_ev));
        out << format_g10(w_ev) << ',' << format_g10(f) << ',' << format_g10(f * f) << '\n';
    }
    return 0;
}

int analyze_thresholds(double ip_au, int n_max, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "N,omega_eV,lambda_nm\n";
    const auto om = photon_thresholds(ip_au, n_max);
    for (int n = 1; n <= n_max; ++n) {
        const auto u = units_from_ev(om[static_cast<size_t>(n - 1)]);
        out << n << ',' << format_g10(u.omega_ev) << ',' << format_g10(u.lambda_nm) << '\n';
    }
    return 0;
}

int analyze_ratio(const std::string& a_path, const std::string& b_path,
                  const std::string& out_path) {
    const auto a = read_yield_csv(a_path);
    const auto b = read_yield_csv(b_path);
    if (a.size() != b.size()) throw ConfigError("ratio: scans have different lengths");
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    out << "omega_eV,yion_ratio\n";
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].omega_ev != b[i].omega_ev)
            throw ConfigError("ratio: frequency grids do not match");
        if (a[i].status != "ok" || b[i].status != "ok") continue;
        out << format_g10(a[i].omega_ev) << ',' << format_g10(a[i].y_ion / b[i].y_ion) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-basis strong-field ionisation toolkit"};
    app.require_subcommand(1);
    CommonArgs args;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", args.config_path, "JSON run configuration");
        if (needs_config) opt->required();
        sub->add_option("--preset", args.preset, "named basis preset override");
        sub->add_option("--threads", args.threads, "worker threads for scans");
        sub->add_option("--output", args.output, "output path override");
        sub->add_flag("--force-rebuild", args.force_rebuild, "ignore any cached basis");
    };

    auto* basis = app.add_subcommand("basis", "build and cache the field-free eigenbasis");
    add_common(basis, true);
    auto* prop = app.add_subcommand("propagate", "single pulse propagation -> yield CSV");
    add_common(prop, true);
    auto* scan = app.add_subcommand("scan", "frequency scan -> multi-row yield CSV");
    add_common(scan, true);

    auto* analyze = app.add_subcommand("analyze", "closed-form / post-processing utilities");
    analyze->require_subcommand(1);

    double a_min = -0.3, a_max = 0.5;
    int a_points = 20;
    std::string an_out = "analysis.csv";
    auto* ipc = analyze->add_subcommand("ip-curve", "numeric vs approximate Ip(alpha)");
    ipc->add_option("--alpha-min", a_min);
    ipc->add_option("--alpha-max", a_max);
    ipc->add_option("--points", a_points);
    ipc->add_option("--output", an_out);

    double f_from = 10.0, f_to = 16.0, f_omega0 = 12.4;
    int f_points = 200, f_cycles = 30;
    double f_intensity = 5e12;
    auto* fou = analyze->add_subcommand("fourier", "pulse Fourier component on a carrier grid");
    fou->add_option("--omega0-ev", f_omega0)->required();
    fou->add_option("--from-ev", f_from);
    fou->add_option("--to-ev", f_to);
    fou->add_option("--points", f_points);
    fou->add_option("--cycles", f_cycles);
    fou->add_option("--intensity-wcm2", f_intensity);
    fou->add_option("--output", an_out);

    double th_ip = 0.5;
    int th_nmax = 5;
    auto* thr = analyze->add_subcommand("thresholds", "N-photon thresholds for a given Ip");
    thr->add_option("--ip-au", th_ip)->required();
    thr->add_option("--nmax", th_nmax);
    thr->add_option("--output", an_out);

    std::string ra, rb;
    auto* rat = analyze->add_subcommand("ratio", "row-wise Y_ion ratio of two scan CSVs");
    rat->add_option("--a", ra)->required();
    rat->add_option("--b", rb)->required();
    rat->add_option("--output", an_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (basis->parsed()) return cmd_basis(args);
        if (prop->parsed()) return cmd_propagate(args);
        if (scan->parsed()) return cmd_scan(args);
        if (ipc->parsed()) return analyze_ip_curve(a_min, a_max, a_points, an_out);
        if (fou->parsed())
            return analyze_fourier(f_cycles, f_intensity, f_from, f_to, f_points, f_omega0,
                                   an_out);
        if (thr->parsed()) return analyze_thresholds(th_ip, th_nmax, an_out);
        if (rat->parsed()) return analyze_ratio(ra, rb, an_out);
    } catch (const specbox::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const specbox::NumericError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const specbox::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

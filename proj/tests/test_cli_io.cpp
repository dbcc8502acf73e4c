#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "specbox/cache.hpp"
#include "specbox/config.hpp"
#include "specbox/csv.hpp"
#include "specbox/driver.hpp"

using namespace specbox;
namespace fs = std::filesystem;

namespace {

const std::string fixtures = SPECBOX_FIXTURES_DIR;
const std::string golden_dir = SPECBOX_GOLDEN_DIR;
const std::string cli = SPECBOX_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("specbox_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, const fs::path& cache_dir) {
    const std::string cmd = "SPECBOX_CACHE_DIR='" + cache_dir.string() + "' '" + cli + "' " +
                            args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WEXITSTATUS(st);
}

RunConfig tiny_config() {
    return load_config_file(fixtures + "/atom_tiny_propagate.json");
}

} // namespace

TEST_CASE("config validation rejects every negative fixture by key", "[cli_io]") {
    struct Case { const char* file; const char* needle; };
    const Case cases[] = {
        {"bad_root_key.json", "extras"},
        {"bad_system_key.json", "alpa"},
        {"bad_kind.json", "model_atom"},
        {"bad_pulse_key.json", "freq_ev"},
        {"bad_prop_key.json", "tolerance"},
        {"bad_output_key.json", "format"},
        {"bad_grid.json", "grid_ev"},
        {"bad_grid_key.json", "step"},
        {"bad_orientation.json", "orientation"},
        {"bad_type.json", "alpha"},
        {"bad_preset.json", "mega"},
        {"bad_section_type.json", "pulse"},
    };
    for (const auto& c : cases) {
        INFO(c.file);
        try {
            load_config_file(fixtures + "/" + c.file);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            REQUIRE(std::string(e.what()).find(c.needle) != std::string::npos);
        }
    }
}

TEST_CASE("config defaults and presets", "[cli_io]") {
    RunConfig c = parse_config(json{{"system", {{"kind", "model_atom"}}}});
    REQUIRE(c.preset_id == "atom_default");
    REQUIRE(c.atom.n_splines == 350);
    REQUIRE(c.atom.order == 15);
    REQUIRE(c.atom.r_max == 350.0);
    REQUIRE(c.prop.rtol == 1e-9);
    REQUIRE_THAT(c.prop.e_cut, Catch::Matchers::WithinAbs(constants::ev_to_au(300.0), 1e-12));
    REQUIRE(c.prop.interaction_picture);

    RunConfig f = parse_config(json{{"system", {{"kind", "model_atom"}}}}, "atom_fast");
    REQUIRE(f.atom.n_splines == 140);
    REQUIRE(f.atom.order == 8);
    REQUIRE(f.atom.r_max == 120.0);

    RunConfig h = parse_config(json{{"system", {{"kind", "two_center"}, {"R", 1.4}}}});
    REQUIRE(h.preset_id == "h2p_default");
    REQUIRE(h.tc.n_xi == 120);
    REQUIRE(h.tc.lambda_max == 3);
    RunConfig chk = parse_config(json{{"system", {{"kind", "two_center"}}}}, "h2p_check");
    REQUIRE(chk.tc.lambda_max == 5);

    // fingerprint keys on the canonical system+basis sections
    RunConfig h2 = h;
    REQUIRE(config_fingerprint(h) == config_fingerprint(h2));
    RunConfig hbox = parse_config(
        json{{"system", {{"kind", "two_center"}, {"R", 1.4}}}, {"basis", {{"box_radius", 90.0}}}});
    REQUIRE(config_fingerprint(h) != config_fingerprint(hbox));
}

TEST_CASE("basis cache round trip is bit-exact and self-validating", "[cli_io]") {
    TempDir tmp;
    setenv("SPECBOX_CACHE_DIR", tmp.path.c_str(), 1);
    RunConfig cfg = tiny_config();

    bool was_cached = true;
    CachedBasis built = load_or_build(cfg, false, &was_cached);
    REQUIRE_FALSE(was_cached);
    const fs::path cache_file = cache_path_for(cfg);
    REQUIRE(fs::exists(cache_file));
    const std::string bytes1 = slurp(cache_file);

    CachedBasis loaded = load_or_build(cfg, false, &was_cached);
    REQUIRE(was_cached);
    REQUIRE(loaded.basis.total_states() == built.basis.total_states());
    REQUIRE(loaded.couplings.size() == built.couplings.size());
    // rewriting the loaded container reproduces the file byte for byte
    write_cache(cache_file.string(), config_fingerprint(cfg), loaded);
    REQUIRE(slurp(cache_file) == bytes1);

    // truncation invalidates and triggers a rebuild
    {
        std::ofstream out(cache_file, std::ios::binary | std::ios::trunc);
        out.write(bytes1.data(), static_cast<std::streamsize>(bytes1.size() / 2));
    }
    REQUIRE_FALSE(read_cache(cache_file.string(), config_fingerprint(cfg)).has_value());
    load_or_build(cfg, false, &was_cached);
    REQUIRE_FALSE(was_cached);
    REQUIRE(slurp(cache_file) == bytes1);

    // a different box means a different fingerprint, so the old cache is dead
    RunConfig other = cfg;
    other.atom.r_max = 80.0;
    other.canonical["r_max"] = 80.0;
    REQUIRE_FALSE(read_cache(cache_file.string(), config_fingerprint(other)).has_value());
    unsetenv("SPECBOX_CACHE_DIR");
}

TEST_CASE("yield CSV round trip at 10 significant digits", "[cli_io]") {
    TempDir tmp;
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<YieldRecord> recs;
    for (int i = 0; i < 10; ++i) {
        YieldRecord r;
        r.omega_ev = 5.0 + 20.0 * u(rng);
        r.lambda_nm = units_from_ev(r.omega_ev).lambda_nm;
        r.p_gs = u(rng);
        r.y_exc = u(rng) * 1e-3;
        r.y_ion = u(rng) * 1e-6;
        r.orientation = i % 2 ? "parallel" : "perpendicular";
        r.cycles = 10 + i;
        r.intensity_wcm2 = 1e12 * (1 + i);
        r.preset_id = "h2p_small";
        recs.push_back(std::move(r));
    }
    const fs::path f1 = tmp.path / "a.csv", f2 = tmp.path / "b.csv";
    write_yield_csv(f1.string(), recs);
    auto parsed = read_yield_csv(f1.string());
    REQUIRE(parsed.size() == recs.size());
    write_yield_csv(f2.string(), parsed);
    REQUIRE(slurp(f1) == slurp(f2));
}

TEST_CASE("factor-two reporting convention doubles only the yields", "[cli_io]") {
    YieldRecord r;
    r.omega_ev = 10.0;
    r.lambda_nm = 123.98;
    r.p_gs = 0.9;
    r.y_exc = 0.06;
    r.y_ion = 0.04;
    r.cycles = 10;
    r.intensity_wcm2 = 1e13;
    r.preset_id = "p";
    r.factor_two = true;
    auto fields = split_csv_line(yield_csv_row(r));
    REQUIRE(fields[2] == format_g10(0.9));   // P_gs untouched
    REQUIRE(fields[3] == format_g10(0.12));  // yields doubled
    REQUIRE(fields[4] == format_g10(0.08));
}

TEST_CASE("propagate subcommand is deterministic", "[cli_io]") {
    TempDir tmp;
    const fs::path out1 = tmp.path / "r1.csv", out2 = tmp.path / "r2.csv";
    const std::string cfg = fixtures + "/atom_tiny_propagate.json";
    REQUIRE(run_cli("propagate --config '" + cfg + "' --output '" + out1.string() + "'",
                    tmp.path / "cache") == 0);
    REQUIRE(run_cli("propagate --config '" + cfg + "' --output '" + out2.string() + "'",
                    tmp.path / "cache") == 0);
    const std::string b1 = slurp(out1);
    REQUIRE(!b1.empty());
    REQUIRE(b1 == slurp(out2));
    auto recs = read_yield_csv(out1.string());
    REQUIRE(recs.size() == 1);
    REQUIRE(recs[0].status == "ok");
    REQUIRE(recs[0].p_gs > 0.9);
}

TEST_CASE("basis subcommand builds then hits the cache", "[cli_io]") {
    TempDir tmp;
    const std::string cfg = fixtures + "/atom_tiny_propagate.json";
    REQUIRE(run_cli("basis --config '" + cfg + "'", tmp.path / "cache") == 0);
    auto count_files = [&]() {
        int n = 0;
        for (auto& e : fs::directory_iterator(tmp.path / "cache")) { (void)e; ++n; }
        return n;
    };
    REQUIRE(count_files() == 1);
    REQUIRE(run_cli("basis --config '" + cfg + "'", tmp.path / "cache") == 0);
    REQUIRE(count_files() == 1);
    // --force-rebuild bypasses the lookup but rewrites the same file
    REQUIRE(run_cli("basis --config '" + cfg + "' --force-rebuild", tmp.path / "cache") == 0);
    REQUIRE(count_files() == 1);
}

TEST_CASE("zero-intensity pulse leaves the atom untouched", "[cli_io]") {
    TempDir tmp;
    const fs::path out = tmp.path / "quiet.csv";
    REQUIRE(run_cli("propagate --config '" + fixtures + "/atom_tiny_zero_intensity.json'" +
                        " --output '" + out.string() + "'",
                    tmp.path / "cache") == 0);
    auto recs = read_yield_csv(out.string());
    REQUIRE(recs.size() == 1);
    REQUIRE(recs[0].y_ion == 0.0);
    REQUIRE(recs[0].y_exc == 0.0);
    REQUIRE(recs[0].p_gs == 1.0);
}

TEST_CASE("scan subcommand is thread-count independent", "[cli_io]") {
    TempDir tmp;
    const std::string cfg = fixtures + "/h2p_small_scan.json";
    const fs::path out1 = tmp.path / "t1.csv", out4 = tmp.path / "t4.csv";
    REQUIRE(run_cli("scan --config '" + cfg + "' --threads 1 --output '" + out1.string() + "'",
                    tmp.path / "cache") == 0);
    REQUIRE(run_cli("scan --config '" + cfg + "' --threads 4 --output '" + out4.string() + "'",
                    tmp.path / "cache") == 0);
    const std::string b1 = slurp(out1);
    REQUIRE(b1 == slurp(out4));
    auto recs = read_yield_csv(out1.string());
    REQUIRE(recs.size() == 6);  // 3 grid points x 2 orientations
    for (const auto& r : recs) REQUIRE(r.status == "ok");
}

TEST_CASE("checkpoint stream records (t, P_gs, norm) triples", "[cli_io]") {
    TempDir tmp;
    const fs::path cfg_path = tmp.path / "cp.json";
    const fs::path cp_path = tmp.path / "checkpoints.csv";
    {
        json root;
        root["system"] = {{"kind", "model_atom"}, {"alpha", 0.12194}, {"l_max", 1}};
        root["basis"] = {{"r_max", 60.0}, {"n_splines", 70}, {"order", 8}};
        root["pulse"] = {{"cycles", 4}, {"intensity_wcm2", 1e12}, {"omega_ev", 12.0}};
        root["output"] = {{"checkpoint_samples", 8}, {"checkpoint_path", cp_path.string()}};
        std::ofstream out(cfg_path);
        out << root.dump(2);
    }
    const fs::path out = tmp.path / "row.csv";
    REQUIRE(run_cli("propagate --config '" + cfg_path.string() + "' --output '" + out.string() +
                        "'",
                    tmp.path / "cache") == 0);
    std::ifstream in(cp_path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "t,P_gs,norm");
    int rows = 0;
    double last_pgs = 0, last_norm = 0;
    while (std::getline(in, line)) {
        auto f = split_csv_line(line);
        REQUIRE(f.size() == 3);
        last_pgs = std::stod(f[1]);
        last_norm = std::stod(f[2]);
        ++rows;
    }
    REQUIRE(rows == 8);
    REQUIRE(last_pgs > 0.0);
    REQUIRE(std::abs(last_norm - 1.0) < 1e-8);
}

TEST_CASE("exit codes distinguish config and I/O failures", "[cli_io]") {
    TempDir tmp;
    REQUIRE(run_cli("propagate --config '" + fixtures + "/bad_system_key.json'",
                    tmp.path / "cache") == 1);
    REQUIRE(run_cli("propagate --config '" + (tmp.path / "missing.json").string() + "'",
                    tmp.path / "cache") == 3);
}

TEST_CASE("ip-curve analysis tracks the closed form in the working range", "[cli_io]") {
    TempDir tmp;
    const fs::path out = tmp.path / "ip.csv";
    REQUIRE(run_cli("analyze ip-curve --alpha-min -0.05 --alpha-max 0.22 --points 4 --output '" +
                        out.string() + "'",
                    tmp.path / "cache") == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "alpha,ip_numeric_au,ip_approx_au");
    int rows = 0;
    double worst = 0;
    while (std::getline(in, line)) {
        auto f = split_csv_line(line);
        REQUIRE(f.size() == 3);
        worst = std::max(worst, std::abs(std::stod(f[1]) - std::stod(f[2])));
        ++rows;
    }
    REQUIRE(rows == 4);
    REQUIRE(worst <= 5e-4);
}

TEST_CASE("analyze subcommands emit plot-ready CSV", "[cli_io]") {
    TempDir tmp;
    const fs::path thr = tmp.path / "thr.csv";
    REQUIRE(run_cli("analyze thresholds --ip-au 0.590367 --nmax 5 --output '" + thr.string() + "'",
                    tmp.path / "cache") == 0);
    std::ifstream in(thr);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    REQUIRE(header == "N,omega_eV,lambda_nm");
    REQUIRE(first.substr(0, 10) == "1,16.06470");

    const fs::path fo = tmp.path / "fourier.csv";
    REQUIRE(run_cli("analyze fourier --omega0-ev 12.4 --from-ev 11 --to-ev 14 --points 31" +
                        std::string(" --output '") + fo.string() + "'",
                    tmp.path / "cache") == 0);
    REQUIRE(slurp(fo).substr(0, 21) == "omega_eV,F_au,F_sq_au");

    // ratio of two scans; mismatched grids are rejected
    std::vector<YieldRecord> a(2), b(2);
    for (int i = 0; i < 2; ++i) {
        a[static_cast<size_t>(i)].omega_ev = 10.0 + i;
        a[static_cast<size_t>(i)].y_ion = 2e-4;
        b[static_cast<size_t>(i)].omega_ev = 10.0 + i;
        b[static_cast<size_t>(i)].y_ion = 1e-4;
    }
    const fs::path fa = tmp.path / "a.csv", fb = tmp.path / "b.csv", fr = tmp.path / "r.csv";
    write_yield_csv(fa.string(), a);
    write_yield_csv(fb.string(), b);
    REQUIRE(run_cli("analyze ratio --a '" + fa.string() + "' --b '" + fb.string() +
                        "' --output '" + fr.string() + "'",
                    tmp.path / "cache") == 0);
    auto lines = slurp(fr);
    REQUIRE(lines.find("10,2") != std::string::npos);
    b[1].omega_ev = 12.5;
    write_yield_csv(fb.string(), b);
    REQUIRE(run_cli("analyze ratio --a '" + fa.string() + "' --b '" + fb.string() +
                        "' --output '" + fr.string() + "'",
                    tmp.path / "cache") == 1);
}

TEST_CASE("golden two-center parallel propagation", "[cli_io]") {
    // regression pinned to the first verified build of this machine
    TempDir tmp;
    const fs::path out = tmp.path / "h2p.csv";
    REQUIRE(run_cli("propagate --config '" + fixtures + "/h2p_parallel_golden.json'" +
                        " --output '" + out.string() + "'",
                    tmp.path / "cache") == 0);
    auto recs = read_yield_csv(out.string());
    REQUIRE(recs.size() == 1);
    REQUIRE(recs[0].status == "ok");
    REQUIRE(recs[0].y_ion > 0.0);
    REQUIRE(recs[0].y_exc > 0.0);
    REQUIRE(recs[0].p_gs < 1.0);

    // golden path carries the config hash: a config change invalidates it
    RunConfig cfg = load_config_file(fixtures + "/h2p_parallel_golden.json");
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(config_fingerprint(cfg)));
    const fs::path golden =
        fs::path(golden_dir) / ("h2p_parallel_" + std::string(fp) + ".csv");
    if (!fs::exists(golden)) {
        fs::create_directories(golden.parent_path());
        fs::copy_file(out, golden);
        WARN("golden file created; rerun to compare");
    } else {
        REQUIRE(slurp(out) == slurp(golden));
    }
}

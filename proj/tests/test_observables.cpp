#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "specbox/csv.hpp"
#include "specbox/model_atom.hpp"
#include "specbox/observables.hpp"

using namespace specbox;
using Catch::Matchers::WithinAbs;

namespace {

// agreement to 4 significant figures: within half a unit in the 4th
// significant digit of the printed value
bool same_4sig(double a, double b) {
    const double ulp4 = std::pow(10.0, std::floor(std::log10(std::abs(b))) - 3.0);
    return std::abs(a - b) <= 0.5 * ulp4;
}

ModelAtomSpec tiny_atom() {
    ModelAtomSpec s;
    s.alpha = 0.12194;
    s.r_max = 60.0;
    s.n_splines = 70;
    s.order = 8;
    s.l_max = 1;
    return s;
}

} // namespace

TEST_CASE("frequency-wavelength conversion table", "[observables]") {
    // (omega eV, lambda nm) resonance pairs; both directions at 4
    // significant figures
    const std::pair<double, double> pairs[] = {
        {6.3982, 193.778},  {3.1991, 387.556},  {7.2640, 170.682},  {3.6320, 341.364},
        {12.4623, 99.486},  {4.1541, 298.458},  {14.4975, 85.520},  {12.8712, 96.326},
        {4.2904, 288.978},  {14.6187, 84.811},  {7.2808, 170.286},  {7.6089, 162.943},
        {16.0645, 77.178},  {5.6121, 220.922},  {2.8060, 441.844},  {6.3739, 194.515},
        {3.1870, 389.030},  {10.4229, 118.953}, {3.4743, 356.859},  {12.6616, 97.920},
        {11.2078, 110.622}, {3.7359, 331.866},  {12.8966, 96.136},  {6.4119, 193.364},
        {6.7372, 184.026},  {14.3171, 86.597}};
    for (const auto& [ev, nm] : pairs) {
        REQUIRE(same_4sig(units_from_ev(ev).lambda_nm, nm));
        REQUIRE(same_4sig(units_from_nm(nm).omega_ev, ev));
    }
    // exact eV <-> hartree definition
    REQUIRE_THAT(units_from_ev(27.211386).omega_au, WithinAbs(1.0, 1e-12));
    REQUIRE_THROWS_AS(units_from_ev(-1.0), ConfigError);
    REQUIRE_THROWS_AS(units_from_nm(0.0), ConfigError);
}

TEST_CASE("N-photon thresholds", "[observables]") {
    auto om = photon_thresholds(0.590367, 5);
    REQUIRE(om.size() == 5);
    REQUIRE(same_4sig(om[0], 16.0645));
    REQUIRE_THAT(om[1], WithinAbs(om[0] / 2.0, 1e-12));
    REQUIRE_THAT(om[4], WithinAbs(om[0] / 5.0, 1e-12));
    // vertical threshold computed from the tabulated levels
    auto om2 = photon_thresholds(-0.602634 - (-1.128787), 1);
    REQUIRE(same_4sig(om2[0], 14.3171));
    REQUIRE_THROWS_AS(photon_thresholds(0.0, 3), ConfigError);
}

TEST_CASE("yield-to-rate conversion", "[observables]") {
    REQUIRE(rate_from_yield(0.0, 5.0) == 0.0);
    REQUIRE_THAT(rate_from_yield(1.0 - std::exp(-1.0), 1.0), WithinAbs(1.0, 1e-14));
    const double y = 1e-8, tp = 100.0;
    REQUIRE_THAT(rate_from_yield(y, tp), WithinAbs(y / tp, y * y / tp));  // relative y/2 expansion error
    REQUIRE_THROWS_AS(rate_from_yield(1.0, 1.0), ConfigError);
    REQUIRE_THROWS_AS(rate_from_yield(-0.1, 1.0), ConfigError);
}

TEST_CASE("population partition", "[observables]") {
    auto ab = solve_atom(tiny_atom());
    auto dip = atomic_dipole_set(ab);
    PropagationOptions opts;

    // no field: everything stays in the ground state
    auto sys = pack_system(ab.basis, dip, opts);
    auto quiet = propagate_system(sys, [](double) { return 0.0; }, 0.0, 10.0, opts);
    auto y0 = yields(quiet, ab.basis);
    REQUIRE(y0.p_gs == 1.0);
    REQUIRE(y0.y_ion == 0.0);
    REQUIRE(y0.y_exc == 0.0);

    // all weight parked on one continuum state
    PropagationResult fake = quiet;
    for (auto& c : fake.coeffs) c = 0.0;
    int cont = -1;
    for (size_t i = 0; i < fake.energies.size(); ++i)
        if (fake.energies[i] > 0.0) { cont = static_cast<int>(i); break; }
    REQUIRE(cont >= 0);
    fake.coeffs[static_cast<size_t>(cont)] = 1.0;
    auto y1 = yields(fake);
    REQUIRE(y1.y_ion == 1.0);
    REQUIRE(y1.p_gs == 0.0);

    // partition identity after a real pulse
    auto res = propagate(ab.basis, dip, PulseSpec{0.5, 4, 5e13}, opts);
    auto y2 = yields(res, ab.basis);
    REQUIRE_THAT(y2.p_gs + y2.y_exc + y2.y_ion, WithinAbs(res.norm_sq(), 1e-10));

    // mismatched basis is rejected
    SpectralBasis other = ab.basis;
    other.blocks.pop_back();
    REQUIRE_THROWS_AS(yields(res, other), ConfigError);
}

TEST_CASE("bandwidth convolution model", "[observables]") {
    const double w0 = 0.46;
    const int nc = 30;
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(0.40 + 0.12 * i / 400.0);
    auto model = convolution_model(w0, nc, 5e12, grid);
    REQUIRE(model.size() == grid.size());

    // peak exactly at the resonance
    size_t imax = 0;
    for (size_t i = 0; i < model.size(); ++i)
        if (model[i] > model[imax]) imax = i;
    REQUIRE_THAT(grid[imax], WithinAbs(w0, grid[1] - grid[0]));

    // first zeros at (w - w0) Tp(w) = +-4 pi (the m = +-2 kernel zeros)
    auto kernel_zero = [&](int m) {
        // solve (w - w0) * 2 pi nc / w = 2 pi m for w
        return w0 / (1.0 - static_cast<double>(m) / nc);
    };
    for (int m : {-2, 2, 3}) {
        const double wz = kernel_zero(m);
        PulseSpec p{wz, nc, 5e12};
        REQUIRE_THAT(fourier_component(p, w0) / p.peak_field(), WithinAbs(0.0, 1e-12));
    }

    // side-lobe spacing halves when the cycle count doubles (up to the
    // O(m/Nc) distortion of the carrier-grid mapping)
    auto spacing = [&](int cycles) {
        return w0 / (1.0 - 3.0 / cycles) - w0 / (1.0 - 2.0 / cycles);
    };
    REQUIRE_THAT(spacing(60) / spacing(120), WithinAbs(2.0, 0.1));

    REQUIRE_THROWS_AS(convolution_model(0.30, nc, 5e12, grid), ConfigError);
}

TEST_CASE("frequency scan emits grid-ordered deterministic records", "[observables]") {
    auto ab = solve_atom(tiny_atom());
    auto dip = atomic_dipole_set(ab);
    ScanRequest req;
    req.omegas_ev = {10.0, 13.0, 16.5};
    req.orientations = {Orientation::isotropic};
    req.cycles = 4;
    req.intensity_wcm2 = 1e12;
    req.preset_id = "tiny";

    auto recs1 = scan(ab.basis, {&dip}, req, 1);
    REQUIRE(recs1.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        REQUIRE(recs1[i].omega_ev == req.omegas_ev[i]);
        REQUIRE(recs1[i].status == "ok");
        REQUIRE_THAT(recs1[i].p_gs + recs1[i].y_exc + recs1[i].y_ion, WithinAbs(1.0, 1e-8));
    }

    // parallel execution gives byte-identical rows
    auto recs4 = scan(ab.basis, {&dip}, req, 4);
    REQUIRE(recs4.size() == recs1.size());
    for (size_t i = 0; i < recs1.size(); ++i)
        REQUIRE(yield_csv_row(recs1[i]) == yield_csv_row(recs4[i]));

    // two orientations interleave grid-major
    ScanRequest both = req;
    both.orientations = {Orientation::isotropic, Orientation::isotropic};
    auto recs6 = scan(ab.basis, {&dip, &dip}, both, 2);
    REQUIRE(recs6.size() == 6);
    REQUIRE(recs6[0].omega_ev == 10.0);
    REQUIRE(recs6[1].omega_ev == 10.0);
    REQUIRE(recs6[2].omega_ev == 13.0);

    // a failing point is reported in place, the rest of the scan continues
    DipoleCouplingSet broken;  // sized for a different basis
    broken.orientation = Orientation::parallel;
    broken.blocks.push_back(CouplingBlock{0, 1, DenseMatrix(1, 1), 1.0});
    ScanRequest mix = req;
    mix.orientations = {Orientation::isotropic, Orientation::parallel};
    auto mixed = scan(ab.basis, {&dip, &broken}, mix, 1);
    REQUIRE(mixed.size() == 6);
    for (size_t i = 0; i < 6; ++i) {
        if (mixed[i].orientation == "parallel") {
            REQUIRE(mixed[i].status.substr(0, 6) == "error:");
        } else {
            REQUIRE(mixed[i].status == "ok");
        }
    }

    // grids must be strictly increasing
    ScanRequest bad = req;
    bad.omegas_ev = {10.0, 10.0};
    REQUIRE_THROWS_AS(scan(ab.basis, {&dip}, bad, 1), ConfigError);
}

#pragma once

// Physical constants and unit conversions (atomic units internally).
// This header is the single source of truth for every conversion factor
// used in the library, the CLI and the tests.

namespace specbox::constants {

inline constexpr double pi = 3.14159265358979323846;

// 1 hartree in eV
inline constexpr double hartree_ev = 27.211386;

// atomic unit of intensity in W/cm^2  (peak field F0 = sqrt(I / this))
inline constexpr double intensity_au_wcm2 = 3.50944758e16;

// speed of light in atomic units
inline constexpr double c_au = 137.035999;

// Bohr radius in nm
inline constexpr double bohr_nm = 0.0529177;

// photon wavelength [nm] for angular frequency [a.u.]
inline constexpr double lambda_nm_factor = 2.0 * pi * c_au * bohr_nm;

inline constexpr double ev_to_au(double ev) { return ev / hartree_ev; }
inline constexpr double au_to_ev(double au) { return au * hartree_ev; }

} // namespace specbox::constants

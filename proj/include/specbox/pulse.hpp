#pragma once

// cos^2-envelope laser pulse, zero carrier-envelope phase, defined on the
// symmetric window [-Tp/2, +Tp/2].  The envelope shapes the *field*; the
// vector potential follows from the exact antiderivative, so A vanishes at
// both window edges for any integer cycle count >= 2.

#include <cmath>

#include "specbox/constants.hpp"
#include "specbox/errors.hpp"

namespace specbox {

struct PulseSpec {
    double omega = 0.0;           // carrier angular frequency, a.u.
    int cycles = 0;               // N_c >= 2
    double intensity_wcm2 = 0.0;  // peak intensity

    void validate() const {
        if (!(omega > 0)) throw ConfigError("pulse: carrier frequency must be positive");
        if (cycles < 2) throw ConfigError("pulse: need at least 2 cycles (zero net impulse)");
        if (intensity_wcm2 < 0) throw ConfigError("pulse: negative intensity");
    }

    double duration() const { return 2.0 * constants::pi * cycles / omega; }
    double peak_field() const { return std::sqrt(intensity_wcm2 / constants::intensity_au_wcm2); }
    double envelope_omega() const { return omega / cycles; }  // 2*pi/Tp
};

inline void check_window(const PulseSpec& p, double t) {
    if (std::abs(t) > 0.5 * p.duration() * (1.0 + 1e-12))
        throw ConfigError("time outside pulse window");
}

// F(t) = F0 cos^2(pi t / Tp) cos(w t)
inline double field(const PulseSpec& p, double t) {
    p.validate();
    check_window(p, t);
    const double env = std::cos(constants::pi * t / p.duration());
    return p.peak_field() * env * env * std::cos(p.omega * t);
}

// A(t) = -int_{-Tp/2}^{t} F dt', from the three-sinusoid expansion of
// cos^2 * cos.  Odd in t; zero at both window edges.
inline double vector_potential(const PulseSpec& p, double t) {
    p.validate();
    check_window(p, t);
    const double f0 = p.peak_field();
    const double w = p.omega, we = p.envelope_omega();
    const double g = 0.5 * f0 * std::sin(w * t) / w +
                     0.25 * f0 * (std::sin((w + we) * t) / (w + we) +
                                  std::sin((w - we) * t) / (w - we));
    return -g;  // g is odd and vanishes at +-Tp/2 for integer cycles
}

// (2/Tp) * int cos(W t) cos(w0 t) dt over [-Tp/2, Tp/2]
inline double cos_cos_window(double cap_w, double w0, double tp) {
    auto term = [tp](double u) {
        if (std::abs(u) < 1e-14) return 0.5 * tp;
        return std::sin(0.5 * u * tp) / u;
    };
    return (2.0 / tp) * (term(cap_w - w0) + term(cap_w + w0));
}

// Fourier component of the pulse field at probe frequency w0 with the
// window and normalization tied to this pulse's own duration.
inline double fourier_component_windowed(double f0, double tp, double omega_carrier, double w0) {
    const double we = 2.0 * constants::pi / tp;
    return 0.5 * f0 * cos_cos_window(omega_carrier, w0, tp) +
           0.25 * f0 * (cos_cos_window(omega_carrier + we, w0, tp) +
                        cos_cos_window(omega_carrier - we, w0, tp));
}

inline double fourier_component(const PulseSpec& p, double w0) {
    p.validate();
    if (!(w0 > 0)) throw ConfigError("fourier component: probe frequency must be positive");
    return fourier_component_windowed(p.peak_field(), p.duration(), p.omega, w0);
}

} // namespace specbox

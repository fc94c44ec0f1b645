#pragma once

#include <Eigen/Dense>

#include "psas/field.hpp"
#include "psas/types.hpp"

namespace psas {

using State2 = Eigen::Vector2cd;  ///< coefficients on the bare basis (|g>, |e>)

/// Bare two-level system with complex excited-state damping
/// gamma_e = gamma_re - i*gamma_im (broadening and level shift; the decay
/// channel feeds states other than |g>), and explicit initial material phases.
struct SystemConfig {
    double omega_g = 0.0;
    double omega_e = 0.0;
    double gamma_re = 0.0;  ///< gamma'_e >= 0
    double gamma_im = 0.0;  ///< gamma''_e, any sign
    double phi_g = 0.0;
    double phi_e = 0.0;

    void validate() const;  // throws ConfigError
    Complex gamma() const { return Complex(gamma_re, -gamma_im); }
};

/// Single definition point of the zero-field detuning dw = w_e - w_g - w.
inline double detuning(const SystemConfig& system, double carrier) {
    return system.omega_e - system.omega_g - carrier;
}

template <Drivable F>
double detuning(const SystemConfig& system, const F& field) {
    return detuning(system, carrier_frequency(field));
}

/// Slowly varying amplitudes plus the analytically book-kept bare phases
/// Phi_g(t) = phi_g + w_g t, Phi_e(t) = phi_e + w_e t.
struct BareState {
    Complex g_amp{};
    Complex e_amp{};
    double t = 0.0;
    double phase_g = 0.0;
    double phase_e = 0.0;
};

/// Full (lab-frame) coefficients including the bare phase factors.
inline State2 lab_coefficients(const BareState& s) {
    return {s.g_amp * std::exp(-kI * s.phase_g), s.e_amp * std::exp(-kI * s.phase_e)};
}

enum class InitialKind { Ground, Excited };

struct StateSpec {
    enum class Kind { Ground, Excited, Superposition } kind = Kind::Ground;
    Complex g{};
    Complex e{};

    static StateSpec ground() { return {Kind::Ground, {}, {}}; }
    static StateSpec excited() { return {Kind::Excited, {}, {}}; }
    static StateSpec superposition(Complex g0, Complex e0) {
        return {Kind::Superposition, g0, e0};
    }
};

/// t = 0 state with phase accumulators seeded from the configured material
/// phases. Superposition amplitudes must be normalized to 1 within 1e-12.
BareState initial_state(const SystemConfig& system, const StateSpec& spec);

}  // namespace psas

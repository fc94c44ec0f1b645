#pragma once

#include <concepts>
#include <string>

#include "psas/types.hpp"

namespace psas {

// Classical driving field E = (1/2) E0(t) [exp(iX) + exp(-iX)] with total
// optical phase X(t) = w*t + phi(t). The Rabi envelope W(t) = mu*E0(t)/hbar is
// specified directly as a frequency-valued envelope (hbar = 1 throughout).

enum class EnvelopeKind { Constant, Gaussian, Sech, SmoothRamp };
enum class PhaseKind { Constant, LinearChirp, Sinusoidal };

std::string to_string(EnvelopeKind kind);
std::string to_string(PhaseKind kind);
EnvelopeKind envelope_kind_from_string(const std::string& name);
PhaseKind phase_kind_from_string(const std::string& name);

struct FieldConfig {
    double carrier = 0.0;  ///< w, angular carrier frequency
    EnvelopeKind envelope_kind = EnvelopeKind::Constant;
    double peak_rabi = 0.0;  ///< W0 >= 0
    double center = 0.0;     ///< t0 of the envelope
    double width = 1.0;      ///< tau_p > 0 (unused by the constant envelope)
    PhaseKind phase_kind = PhaseKind::Constant;
    double phase_offset = 0.0;  ///< phi0, radians
    double chirp = 0.0;         ///< beta; phi = phi0 + beta t^2/2 for linear-chirp
    double mod_depth = 0.0;     ///< sinusoidal modulation depth, radians
    double mod_rate = 0.0;      ///< sinusoidal modulation rate, angular frequency
    double floor = 1e-9;        ///< eps_W in (0,1): relative floor for W^-1 dW/dt
    int n_max = 3;              ///< largest derivative order served

    void validate() const;  // throws ConfigError
};

/// Pointwise field data. All derivative entries are analytic closed forms; the
/// log-derivative is never computed by division so it stays finite wherever
/// the analytic form is finite. `log_d_defined` is false where
/// rabi < floor * peak_rabi; the numeric value is still the closed form.
struct FieldSample {
    double t = 0.0;
    double rabi = 0.0;         ///< W(t)
    double d_rabi = 0.0;       ///< dW/dt
    double log_d_rabi = 0.0;   ///< W^-1 dW/dt, closed form
    bool log_d_defined = true;
    double phase = 0.0;        ///< phi(t)
    double d_phase = 0.0;      ///< dphi/dt
    double dd_phase = 0.0;     ///< d^2 phi/dt^2
    double d_log_d_rabi = 0.0; ///< d/dt (W^-1 dW/dt), closed form
    double total_phase = 0.0;  ///< X(t) = carrier*t + phi(t)
};

FieldSample eval_field(const FieldConfig& config, double t);

inline double carrier_frequency(const FieldConfig& config) { return config.carrier; }

/// Characteristic time scale used to size finite-difference steps.
inline double fd_time_scale(const FieldConfig& config) { return config.width; }

/// Anything the propagator and the dressed-state machinery can drive the
/// two-level system with: a pointwise sample plus a carrier frequency.
template <class F>
concept Drivable = requires(const F& f, double t) {
    { eval_field(f, t) } -> std::same_as<FieldSample>;
    { carrier_frequency(f) } -> std::convertible_to<double>;
};

struct DerivativeEstimate {
    Complex value{};
    double error = 0.0;  ///< estimated absolute error (0 for closed forms)
};

/// n-th time derivative of the nonadiabaticity function
/// D(t) = dphi/dt - i W^-1 dW/dt. Orders 0 and 1 are closed forms; higher
/// orders use central differences of the order-1 closed form with one
/// Richardson level. Throws UndefinedRegionError if the envelope dips below
/// the relative floor anywhere on the evaluation stencil.
DerivativeEstimate nonadiabatic_derivative(const FieldConfig& config, int n, double t);

/// Same derivative but without the envelope-floor check. Used by diagnostics
/// that handle below-floor points themselves.
DerivativeEstimate nonadiabatic_derivative_unchecked(const FieldConfig& config, int n, double t);

/// D0 and D1 straight from a sample, for field types other than FieldConfig.
inline Complex nonadiabaticity(const FieldSample& s) {
    return Complex(s.d_phase, -s.log_d_rabi);
}
inline Complex nonadiabaticity_rate(const FieldSample& s) {
    return Complex(s.dd_phase, -s.d_log_d_rabi);
}

}  // namespace psas

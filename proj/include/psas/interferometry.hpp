#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psas/field.hpp"
#include "psas/propagator.hpp"
#include "psas/system.hpp"

namespace psas {

// Two-pulse wave-packet interferometry. Wave packets are finite
// superpositions of stationary levels; the phase a packet acquires between
// creation and revisit is read off the autocorrelation
// <Psi(t1)|Psi(t1+tau)> = Sum |c_n|^2 exp(-i w_n tau).

struct WavepacketLevel {
    double omega = 0.0;
    Complex amp{};
};

struct Wavepacket {
    std::vector<WavepacketLevel> levels;
    double created_at = 0.0;
    double initial_phase = 0.0;  ///< phi_1

    void validate() const;  // normalization within 1e-12
};

struct AcquiredPhase {
    double phase = 0.0;    ///< unwrapped material phase; w_1 tau for one level
    double modulus = 0.0;  ///< |autocorrelation|
    bool defined = true;   ///< false when the modulus is below 1e-12
};

AcquiredPhase acquired_phase(const Wavepacket& wp, double tau);
std::vector<AcquiredPhase> acquired_phase_series(const Wavepacket& wp,
                                                 std::span<const double> tau_grid);

/// A1^2 + A2^2 + 2 A1 A2 cos(phi1 - phi2 - Phi)
double superpose(double a1, double phi1, double big_phi, double a2, double phi2);

struct SecondPulse {
    enum class Policy { Fixed, Locked } policy = Policy::Fixed;
    double amplitude = 1.0;
    double phi2 = 0.0;              ///< fixed policy: the created packet's phase
    double locked_frequency = 0.0;  ///< locked policy: phi2 = phi1 + w_L tau
};

struct InterferogramPoint {
    double value = 0.0;       ///< scan coordinate
    double population = 0.0;  ///< analytic interference population
    double a1_sq = 0.0;
    double a2_sq = 0.0;
    double cross = 0.0;
    std::optional<double> propagated;  ///< exact two-pulse population, if computed
    bool phase_defined = true;
};

struct Interferogram {
    std::string scan_variable;  ///< "delay", "locked_frequency" or "phase_offset"
    std::string model;          ///< "analytic" or "propagated"
    std::vector<InterferogramPoint> points;
    bool lifetime_ok = true;    ///< gamma'_e * tau_max stayed well below 1
    double lifetime_product = 0.0;
};

Interferogram fringe_scan(const Wavepacket& wp, const SecondPulse& second,
                          std::span<const double> tau_grid);
Interferogram locked_frequency_scan(const Wavepacket& wp, const SecondPulse& second,
                                    double tau, std::span<const double> omega_grid);
Interferogram phase_offset_scan(const Wavepacket& wp, const SecondPulse& second, double tau,
                                std::span<const double> phi2_grid);

/// Two identical non-overlapping pulses on one carrier; the second is delayed
/// and may carry a different constant phase offset. Sampling switches pulses
/// at the midpoint between centers.
struct PulsePair {
    FieldConfig first;
    double second_center = 0.0;
    double second_phase = 0.0;
};

FieldSample eval_field(const PulsePair& pair, double t);
inline double carrier_frequency(const PulsePair& pair) { return pair.first.carrier; }
inline double fd_time_scale(const PulsePair& pair) { return pair.first.width; }

/// Int W dt over the pulse support.
double pulse_area(const FieldConfig& pulse);

struct RamseyConfig {
    FieldConfig pulse;        ///< shape of both pulses; `center` is the first center
    double phi2_offset = 0.0; ///< constant phase offset of the second pulse
    double settle = 0.0;      ///< margin after the second pulse (0: 6 widths)
    double tol = 1e-10;
};

/// For each delay, runs the exact two-pulse propagation from the ground state
/// and records the final excited population next to the first-order analytic
/// prediction (A1 = A2 = area/2, Phi = dw * tau in the rotating frame).
Interferogram ramsey_crosscheck(const SystemConfig& system, const RamseyConfig& config,
                                std::span<const double> tau_grid);

}  // namespace psas

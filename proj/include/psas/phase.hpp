#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psas/dressed.hpp"
#include "psas/propagator.hpp"
#include "psas/quadrature.hpp"
#include "psas/system.hpp"

namespace psas {

struct PhaseRecord {
    double t = 0.0;
    double total = 0.0;               ///< arg <Psi(0)|Psi(t)>, unwrapped
    double dynamical = 0.0;           ///< -Int <Psi|H|Psi> dt (hbar = 1)
    double geometric_residual = 0.0;  ///< total - dynamical
};

/// Unwrapped total phase along the trajectory, taken against the first sample
/// with the full lab-frame states (bare phase factors included). Throws
/// UndefinedPhaseError when the overlap modulus drops below 1e-12.
std::vector<double> total_phase(const Trajectory& traj);

/// Dynamical phase with the hermitian part of the rotating-wave Hamiltonian:
/// diagonal (w_g, w_e), off-diagonal -(W/2) exp(+-iX); damping excluded.
template <Drivable F>
std::vector<double> dynamical_phase(const Trajectory& traj, const SystemConfig& system,
                                    const F& field) {
    if (traj.states.empty()) throw ConfigError("dynamical_phase: empty trajectory");
    const double delta_phi0 = system.phi_e - system.phi_g;
    const double dw = detuning(system, field);
    std::vector<double> expectation(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const BareState& s = traj.states[i];
        const FieldSample fs = eval_field(field, s.t);
        const double dphase = delta_phi0 + dw * s.t - fs.phase;
        expectation[i] = system.omega_g * std::norm(s.g_amp) +
                         system.omega_e * std::norm(s.e_amp) -
                         fs.rabi * std::real(std::conj(s.g_amp) * s.e_amp *
                                             std::exp(-kI * dphase));
    }
    std::vector<double> phi = cumulative_integral(traj.times, expectation);
    for (double& v : phi) v = -v;
    return phi;
}

template <Drivable F>
std::vector<PhaseRecord> phase_records(const Trajectory& traj, const SystemConfig& system,
                                       const F& field) {
    const std::vector<double> tot = total_phase(traj);
    const std::vector<double> dyn = dynamical_phase(traj, system, field);
    std::vector<PhaseRecord> out(tot.size());
    for (std::size_t i = 0; i < tot.size(); ++i)
        out[i] = {traj.times[i], tot[i], dyn[i], tot[i] - dyn[i]};
    return out;
}

/// Gauge-invariant discrete loop phase -arg Prod <Psi(s_i)|Psi(s_{i+1})>,
/// closing overlap included, reported in (-pi, pi]. The loop must close
/// (endpoints parallel within 1e-6) and successive overlaps must keep
/// modulus above half the norm product.
double geometric_phase(std::span<const Eigen::VectorXcd> loop);

struct MptReport {
    InitialKind ic = InitialKind::Ground;
    std::string surviving_phase;  ///< which of {phi_g, phi_e} appears everywhere
    std::string vanished_phase;
    double max_deviation = 0.0;
    bool bit_invariant = true;  ///< vanishing-phase sweep left all exponents bit-identical
};

/// Sweeps the designated-vanishing initial phase (expect exact invariance of
/// all four components) and the surviving one by the same offsets (expect the
/// global factor exp(-i delta)). Violations are data, not errors.
template <Drivable F>
MptReport mpt_check(const SystemConfig& system, const F& field, std::span<const double> grid,
                    InitialKind ic, std::span<const double> sweep,
                    const DressedOptions& opt = {}) {
    MptReport report;
    report.ic = ic;
    report.surviving_phase = ic == InitialKind::Ground ? "phi_g" : "phi_e";
    report.vanished_phase = ic == InitialKind::Ground ? "phi_e" : "phi_g";

    const PsasComponents base = psas_components(system, field, grid, ic, opt);
    auto components_of = [](const PsasComponents& c, int which) -> const std::vector<Complex>& {
        switch (which) {
            case 0: return c.g_real;
            case 1: return c.g_virtual;
            case 2: return c.e_real;
            default: return c.e_virtual;
        }
    };

    for (double value : sweep) {
        SystemConfig swept = system;
        (ic == InitialKind::Ground ? swept.phi_e : swept.phi_g) = value;
        const PsasComponents varied = psas_components(swept, field, grid, ic, opt);
        for (int c = 0; c < 4; ++c) {
            const auto& a = components_of(base, c);
            const auto& b = components_of(varied, c);
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] != b[i]) report.bit_invariant = false;
                report.max_deviation =
                    std::max(report.max_deviation, std::abs(std::exp(b[i]) - std::exp(a[i])));
            }
        }
    }

    for (double delta : sweep) {
        SystemConfig swept = system;
        (ic == InitialKind::Ground ? swept.phi_g : swept.phi_e) += delta;
        const PsasComponents varied = psas_components(swept, field, grid, ic, opt);
        const Complex factor = std::exp(-kI * delta);
        for (int c = 0; c < 4; ++c) {
            const auto& a = components_of(base, c);
            const auto& b = components_of(varied, c);
            for (std::size_t i = 0; i < a.size(); ++i)
                report.max_deviation = std::max(
                    report.max_deviation, std::abs(std::exp(b[i]) - factor * std::exp(a[i])));
        }
    }
    return report;
}

}  // namespace psas

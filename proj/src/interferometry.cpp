#include "psas/interferometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psas/quadrature.hpp"

namespace psas {

void Wavepacket::validate() const {
    if (levels.empty()) throw ConfigError("wavepacket: needs at least one level");
    double norm = 0.0;
    for (const WavepacketLevel& l : levels) norm += std::norm(l.amp);
    if (std::abs(norm - 1.0) > 1e-12)
        throw ConfigError("wavepacket: level amplitudes not normalized");
}

namespace {

Complex autocorrelation(const Wavepacket& wp, double tau) {
    Complex c{};
    for (const WavepacketLevel& l : wp.levels) c += std::norm(l.amp) * std::exp(-kI * l.omega * tau);
    return c;
}

double max_level_frequency(const Wavepacket& wp) {
    double m = 0.0;
    for (const WavepacketLevel& l : wp.levels) m = std::max(m, std::abs(l.omega));
    return m;
}

// Marches arg of the autocorrelation continuously from tau = 0 through the
// sorted targets; the step keeps each phase increment well under pi.
std::vector<AcquiredPhase> march_phase(const Wavepacket& wp, std::span<const double> targets) {
    std::vector<AcquiredPhase> out;
    out.reserve(targets.size());
    const double step = std::numbers::pi / (8.0 * std::max(1.0, max_level_frequency(wp)));
    double tau = 0.0;
    Complex c_prev = autocorrelation(wp, 0.0);
    double theta = std::arg(c_prev);  // = 0 for a normalized packet
    for (double target : targets) {
        if (target < tau) throw ConfigError("acquired_phase: tau grid must be ascending, >= 0");
        while (tau < target) {
            const double next = std::min(tau + step, target);
            const Complex c_next = autocorrelation(wp, next);
            theta += std::arg(c_next * std::conj(c_prev));
            c_prev = c_next;
            tau = next;
        }
        const double modulus = std::abs(c_prev);
        out.push_back({-theta, modulus, modulus >= 1e-12});
    }
    return out;
}

}  // namespace

AcquiredPhase acquired_phase(const Wavepacket& wp, double tau) {
    wp.validate();
    if (tau < 0.0) throw ConfigError("acquired_phase: tau must be >= 0");
    const double t[1] = {tau};
    return march_phase(wp, t).front();
}

std::vector<AcquiredPhase> acquired_phase_series(const Wavepacket& wp,
                                                 std::span<const double> tau_grid) {
    wp.validate();
    if (!tau_grid.empty() && tau_grid.front() < 0.0)
        throw ConfigError("acquired_phase: tau must be >= 0");
    return march_phase(wp, tau_grid);
}

double superpose(double a1, double phi1, double big_phi, double a2, double phi2) {
    if (a1 < 0.0 || a2 < 0.0) throw ConfigError("superpose: amplitudes must be >= 0");
    return a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * std::cos(phi1 - phi2 - big_phi);
}

namespace {

InterferogramPoint interference_point(double value, double a1, double phi1, double acquired,
                                      double a2, double phi2, bool defined) {
    InterferogramPoint p;
    p.value = value;
    // the acquired material phase advances the first packet: the interference
    // argument is phi1 + Phi - phi2, i.e. superpose with -Phi
    p.population = superpose(a1, phi1, -acquired, a2, phi2);
    p.a1_sq = a1 * a1;
    p.a2_sq = a2 * a2;
    p.cross = p.population - p.a1_sq - p.a2_sq;
    p.phase_defined = defined;
    return p;
}

double second_phase(const SecondPulse& second, double phi1, double tau) {
    return second.policy == SecondPulse::Policy::Locked
               ? phi1 + second.locked_frequency * tau
               : second.phi2;
}

}  // namespace

Interferogram fringe_scan(const Wavepacket& wp, const SecondPulse& second,
                          std::span<const double> tau_grid) {
    const std::vector<AcquiredPhase> acquired = acquired_phase_series(wp, tau_grid);
    Interferogram gram;
    gram.scan_variable = "delay";
    gram.model = "analytic";
    gram.points.reserve(tau_grid.size());
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const double tau = tau_grid[i];
        gram.points.push_back(interference_point(
            tau, acquired[i].modulus, wp.initial_phase, acquired[i].phase, second.amplitude,
            second_phase(second, wp.initial_phase, tau), acquired[i].defined));
    }
    return gram;
}

Interferogram locked_frequency_scan(const Wavepacket& wp, const SecondPulse& second,
                                    double tau, std::span<const double> omega_grid) {
    const AcquiredPhase acquired = acquired_phase(wp, tau);
    Interferogram gram;
    gram.scan_variable = "locked_frequency";
    gram.model = "analytic";
    gram.points.reserve(omega_grid.size());
    for (double omega_l : omega_grid) {
        SecondPulse locked = second;
        locked.policy = SecondPulse::Policy::Locked;
        locked.locked_frequency = omega_l;
        gram.points.push_back(interference_point(
            omega_l, acquired.modulus, wp.initial_phase, acquired.phase, second.amplitude,
            second_phase(locked, wp.initial_phase, tau), acquired.defined));
    }
    return gram;
}

Interferogram phase_offset_scan(const Wavepacket& wp, const SecondPulse& second, double tau,
                                std::span<const double> phi2_grid) {
    const AcquiredPhase acquired = acquired_phase(wp, tau);
    Interferogram gram;
    gram.scan_variable = "phase_offset";
    gram.model = "analytic";
    gram.points.reserve(phi2_grid.size());
    for (double phi2 : phi2_grid) {
        gram.points.push_back(interference_point(phi2, acquired.modulus, wp.initial_phase,
                                                 acquired.phase, second.amplitude, phi2,
                                                 acquired.defined));
    }
    return gram;
}

FieldSample eval_field(const PulsePair& pair, double t) {
    const double midpoint = 0.5 * (pair.first.center + pair.second_center);
    if (t < midpoint) return eval_field(pair.first, t);
    FieldConfig second = pair.first;
    second.center = pair.second_center;
    second.phase_offset = pair.second_phase;
    return eval_field(second, t);
}

double pulse_area(const FieldConfig& pulse) {
    pulse.validate();
    const auto rabi = [&](double t) { return Complex(eval_field(pulse, t).rabi, 0.0); };
    return adaptive_simpson(rabi, pulse.center - 10.0 * pulse.width,
                            pulse.center + 10.0 * pulse.width, 1e-14)
        .real();
}

Interferogram ramsey_crosscheck(const SystemConfig& system, const RamseyConfig& config,
                                std::span<const double> tau_grid) {
    system.validate();
    config.pulse.validate();
    if (config.pulse.envelope_kind != EnvelopeKind::Gaussian &&
        config.pulse.envelope_kind != EnvelopeKind::Sech)
        throw ConfigError("ramsey_crosscheck: pulses must be gaussian or sech");
    if (config.pulse.phase_kind != PhaseKind::Constant)
        throw ConfigError("ramsey_crosscheck: pulses must carry a constant phase");
    if (tau_grid.empty()) throw ConfigError("ramsey_crosscheck: empty tau grid");
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        if (!(tau_grid[i] > tau_grid[i - 1]))
            throw ConfigError("ramsey_crosscheck: tau grid must be strictly increasing");

    const double width = config.pulse.width;
    if (tau_grid.front() <= 4.0 * width)
        throw ConfigError("ramsey_crosscheck: overlapping pulses (delay must exceed 4 widths)");
    if (config.pulse.center < 6.0 * width)
        throw ConfigError("ramsey_crosscheck: first pulse center must be >= 6 widths");

    const double area = pulse_area(config.pulse);
    if (area > 0.2)
        throw ConfigError("ramsey_crosscheck: pulse area " + std::to_string(area) +
                          " outside the perturbative regime (<= 0.2)");

    const double settle = config.settle > 0.0 ? config.settle : 6.0 * width;
    const double dw = detuning(system, config.pulse.carrier);
    const double amp = 0.5 * area;
    const double phi1 = config.pulse.phase_offset;
    const double phi2 = phi1 + config.phi2_offset;

    Interferogram gram;
    gram.scan_variable = "delay";
    gram.model = "propagation";
    gram.lifetime_product = system.gamma_re * tau_grid.back();
    gram.lifetime_ok = gram.lifetime_product < 0.1;
    gram.points.reserve(tau_grid.size());

    const BareState ground = initial_state(system, StateSpec::ground());
    for (double tau : tau_grid) {
        const PulsePair pair{config.pulse, config.pulse.center + tau, phi2};
        const double t_end = config.pulse.center + tau + settle;
        const double sample[1] = {t_end};
        const Trajectory traj =
            propagate(system, pair, ground, {0.0, t_end}, config.tol, sample);
        InterferogramPoint p = interference_point(tau, amp, phi1, dw * tau, amp, phi2, true);
        p.propagated = std::norm(traj.states.back().e_amp);
        gram.points.push_back(p);
    }
    return gram;
}

}  // namespace psas

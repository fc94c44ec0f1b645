#pragma once

#include <span>
#include <utility>
#include <vector>

#include "psas/dressed.hpp"
#include "psas/field.hpp"
#include "psas/ode.hpp"
#include "psas/system.hpp"

namespace psas {

// Exact propagation of the slowly varying amplitude pair
//   dg/dt = (i/2) W(t) exp[-i dX(t)] e(t)
//   de/dt = -(1/2) gamma_e e(t) + (i/2) W(t) exp[+i dX(t)] g(t)
// with dX(t) = (phi_e - phi_g) + dw t - phi(t). The rapidly oscillating bare
// phases stay analytic bookkeeping; three quasi-energy quadratures
// (Int dtw', Int w_G, Int w'_E, accumulated from the start of the span) ride
// along in the same error-controlled state.

struct Trajectory {
    std::vector<double> times;
    std::vector<BareState> states;
    std::vector<Complex> int_dtw;
    std::vector<Complex> int_omega_G;
    std::vector<Complex> int_omega_E_eff;
    double tol = 0.0;  ///< relative tolerance the integrator was run at
};

struct PopulationSample {
    double t = 0.0;
    double pop_g = 0.0;
    double pop_e = 0.0;
    double norm = 0.0;
};

std::vector<PopulationSample> bare_populations(const Trajectory& traj);

namespace prop_detail {

using State5 = Eigen::Matrix<Complex, 5, 1>;

inline std::vector<double> default_grid(double t0, double t1, std::size_t n = 2000) {
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = t0 + (t1 - t0) * double(i) / double(n - 1);
    grid.back() = t1;
    return grid;
}

inline void check_span_tol(std::pair<double, double> span, double tol) {
    if (!(span.second > span.first)) throw ConfigError("propagate: t1 must exceed t0");
    if (!(tol >= 1e-13 && tol <= 1e-4))
        throw ConfigError("propagate: tol must lie in [1e-13, 1e-4]");
}

/// Quasi-energy integrands with a branch seed carried across evaluations.
template <Drivable F>
struct QuadratureRates {
    const SystemConfig& system;
    const F& field;
    double bare_detuning;
    mutable std::optional<Complex> seed;

    void rates(const FieldSample& s, Complex& dtw, Complex& omega_G, Complex& omega_E_eff) const {
        dtw = complex_detuning(system, field, s);
        const Complex w =
            resolve_branch(off_resonance_radicand(dtw, s.rabi, -nonadiabaticity_rate(s)), seed);
        seed = w;
        const Complex lm = 0.5 * (dtw - w);
        omega_G = system.omega_g + lm;
        omega_E_eff = system.omega_e - lm + (dtw - bare_detuning);
    }
};

template <Drivable F, class Rhs>
Trajectory run(const SystemConfig& system, const F& field, std::pair<double, double> span,
               double tol, std::span<const double> grid_in, Rhs&& rhs, const State5& y0,
               bool second_order) {
    std::vector<double> grid;
    if (grid_in.empty()) {
        grid = default_grid(span.first, span.second);
    } else {
        grid.assign(grid_in.begin(), grid_in.end());
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw ConfigError("propagate: output grid must be strictly increasing");
        if (grid.front() < span.first || grid.back() > span.second)
            throw ConfigError("propagate: output grid must lie within the integration span");
    }

    Trajectory traj;
    traj.tol = tol;
    traj.times = grid;
    traj.states.resize(grid.size());
    traj.int_dtw.resize(grid.size());
    traj.int_omega_G.resize(grid.size());
    traj.int_omega_E_eff.resize(grid.size());

    const double delta_phi0 = system.phi_e - system.phi_g;
    const double dw = detuning(system, field);

    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = 1e-3 * tol;

    integrate_dopri5(
        rhs, y0, span.first, span.second, grid,
        [&](std::size_t idx, double t, const State5& y) {
            BareState s;
            s.t = t;
            s.phase_g = system.phi_g + system.omega_g * t;
            s.phase_e = system.phi_e + system.omega_e * t;
            if (second_order) {
                const FieldSample fs = eval_field(field, t);
                if (fs.rabi <= 0.0) throw UndefinedRegionError(t, t);
                const double dphase = delta_phi0 + dw * t - fs.phase;
                s.g_amp = y[0];
                s.e_amp = -2.0 * kI * y[1] * std::exp(kI * dphase) / fs.rabi;
            } else {
                s.g_amp = y[0];
                s.e_amp = y[1];
            }
            traj.states[idx] = s;
            traj.int_dtw[idx] = y[2];
            traj.int_omega_G[idx] = y[3];
            traj.int_omega_E_eff[idx] = y[4];
        },
        opt);
    return traj;
}

}  // namespace prop_detail

/// Integrates the amplitude pair from `initial` over `span` at relative
/// tolerance `tol` (in [1e-13, 1e-4]), sampling dense output on `grid`
/// (default: 2000 uniform points).
template <Drivable F>
Trajectory propagate(const SystemConfig& system, const F& field, const BareState& initial,
                     std::pair<double, double> span, double tol,
                     std::span<const double> grid = {}) {
    prop_detail::check_span_tol(span, tol);
    system.validate();

    const double delta_phi0 = system.phi_e - system.phi_g;
    const double dw = detuning(system, field);
    const Complex gamma = system.gamma();

    prop_detail::QuadratureRates<F> quad{system, field, dw, {}};
    auto rhs = [&](double t, const prop_detail::State5& y) {
        const FieldSample s = eval_field(field, t);
        const double dphase = delta_phi0 + dw * t - s.phase;
        const Complex coupling = 0.5 * kI * s.rabi;
        prop_detail::State5 dy;
        dy[0] = coupling * std::exp(-kI * dphase) * y[1];
        dy[1] = -0.5 * gamma * y[1] + coupling * std::exp(kI * dphase) * y[0];
        Complex dtw, omega_G, omega_E_eff;
        quad.rates(s, dtw, omega_G, omega_E_eff);
        dy[2] = dtw;
        dy[3] = omega_G;
        dy[4] = omega_E_eff;
        return dy;
    };

    prop_detail::State5 y0;
    y0 << initial.g_amp, initial.e_amp, Complex{}, Complex{}, Complex{};
    return prop_detail::run(system, field, span, tol, grid, rhs, y0, false);
}

/// Propagates the second-order form d2g/dt2 + i dtw'(t) dg/dt + (W^2/4) g = 0
/// from a ground start and reconstructs e(t) from dg/dt. Requires the
/// envelope to stay above the relative floor on the whole span.
template <Drivable F>
Trajectory propagate_second_order(const SystemConfig& system, const F& field,
                                  const BareState& initial, std::pair<double, double> span,
                                  double tol, std::span<const double> grid = {}) {
    prop_detail::check_span_tol(span, tol);
    system.validate();
    if (std::abs(initial.e_amp) != 0.0 || std::abs(std::abs(initial.g_amp) - 1.0) > 1e-12)
        throw ConfigError("propagate_second_order: initial state must be the bare ground state");

    const double dw = detuning(system, field);

    prop_detail::QuadratureRates<F> quad{system, field, dw, {}};
    auto rhs = [&](double t, const prop_detail::State5& y) {
        const FieldSample s = eval_field(field, t);
        if (!s.log_d_defined) throw UndefinedRegionError(t, t);
        prop_detail::State5 dy;
        Complex dtw, omega_G, omega_E_eff;
        quad.rates(s, dtw, omega_G, omega_E_eff);
        dy[0] = y[1];
        dy[1] = -kI * dtw * y[1] - 0.25 * s.rabi * s.rabi * y[0];
        dy[2] = dtw;
        dy[3] = omega_G;
        dy[4] = omega_E_eff;
        return dy;
    };

    prop_detail::State5 y0;
    y0 << initial.g_amp, Complex{}, Complex{}, Complex{}, Complex{};
    return prop_detail::run(system, field, span, tol, grid, rhs, y0, true);
}

}  // namespace psas

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "psas/adiabaticity.hpp"
#include "psas/field.hpp"
#include "psas/system.hpp"

namespace psas {

// Analytic dressed-state bundle for the driven, damped two-level system:
// complex detuning dtw' = dw - dphi/dt - g''/2 - i(g'/2 - W^-1 dW/dt),
// off-resonance Rabi frequency W' = [dtw'^2 + W^2 - 2i d(dtw')/dt]^(1/2)
// (branch-tracked), quasi-energies L± = (dtw' ± W')/2, corrected weights
// L~± = L± - (i/2) W'^-1 dW'/dt, and the complex COS/SIN weight factors.

struct DressedOptions {
    double fd_step = 0.0;              ///< step for dW'/dt; 0 selects 1e-3 x field width
    int sign_at_zero_detuning = +1;    ///< sgn(dw) convention at exact resonance
    double quadrature_tol = 1e-10;     ///< absolute target per phase exponent
    double adiabaticity_threshold = 0.1;
    int adiabaticity_n_max = 2;
};

struct WeightFactors {
    Complex lambda_plus{};
    Complex lambda_minus{};
    Complex lambda_tilde_plus{};
    Complex lambda_tilde_minus{};
    Complex cos_w{};
    Complex sin_w{};
};

/// Quasi-energies and weights from the complex detuning, the branch-resolved
/// W' and its time derivative. COS^2 + SIN^2 == 1 by construction; throws
/// DegeneratePointError when |W'| < 1e-12.
WeightFactors weight_factors(Complex dtw, Complex big_omega, Complex d_big_omega,
                             double detuning_sign);

/// dtw'^2 + W^2 - 2i d(dtw')/dt
inline Complex off_resonance_radicand(Complex dtw, double rabi, Complex d_dtw) {
    return dtw * dtw + rabi * rabi - 2.0 * kI * d_dtw;
}

/// Square root with branch selection: with a seed, the sign closest to it;
/// without, the principal root normalized to Re >= 0 (ties: Im >= 0).
Complex resolve_branch(Complex radicand, std::optional<Complex> seed);

/// Continuous W'(t) along a grid of radicands. The first point uses the
/// seed-free rule; each later point takes the sign closest to its predecessor
/// and reports BranchAmbiguityError when both signs jump by more than half of
/// the previous magnitude.
std::vector<Complex> branch_track(std::span<const Complex> radicand);
std::vector<Complex> branch_track(std::span<const Complex> dtw_sq,
                                  std::span<const double> rabi_sq,
                                  std::span<const Complex> d_dtw);

struct DressedQuantities {
    double t = 0.0;
    Complex dtw{};          ///< complex detuning dtw'
    Complex d_dtw{};        ///< d(dtw')/dt
    Complex big_omega{};    ///< W', branch-tracked
    Complex lambda_plus{};
    Complex lambda_minus{};
    Complex lambda_tilde_plus{};
    Complex lambda_tilde_minus{};
    Complex cos_w{};
    Complex sin_w{};
    Complex omega_G{};      ///< w_g + L-
    Complex omega_E{};      ///< w_e - L-
    Complex omega_E_eff{};  ///< w_E - dphi/dt - g''/2 - i(g'/2 - W^-1 dW/dt)
};

template <class F>
double dressed_fd_step(const F& field, const DressedOptions& opt) {
    if (opt.fd_step > 0.0) return opt.fd_step;
    if constexpr (requires { fd_time_scale(field); }) return 1e-3 * fd_time_scale(field);
    return 1e-3;
}

template <Drivable F>
Complex complex_detuning(const SystemConfig& system, const F& field, const FieldSample& s) {
    return detuning(system, field) - s.d_phase - 0.5 * system.gamma_im -
           kI * (0.5 * system.gamma_re - s.log_d_rabi);
}

template <Drivable F>
double detuning_sign(const SystemConfig& system, const F& field, const DressedOptions& opt) {
    const double dw = detuning(system, field);
    if (dw > 0.0) return 1.0;
    if (dw < 0.0) return -1.0;
    return double(opt.sign_at_zero_detuning);
}

/// Full dressed bundle at one instant. dW'/dt comes from a central difference
/// over branch-matched evaluations at t +/- h.
template <Drivable F>
DressedQuantities dressed_quantities(const SystemConfig& system, const F& field, double t,
                                     std::optional<Complex> branch_seed = {},
                                     const DressedOptions& opt = {}) {
    const FieldSample s = eval_field(field, t);
    if (!s.log_d_defined) throw UndefinedRegionError(t, t);

    DressedQuantities q;
    q.t = t;
    q.dtw = complex_detuning(system, field, s);
    q.d_dtw = -nonadiabaticity_rate(s);
    q.big_omega = resolve_branch(off_resonance_radicand(q.dtw, s.rabi, q.d_dtw), branch_seed);

    const double h = dressed_fd_step(field, opt);
    Complex neighbors[2];
    int side = 0;
    for (double ts : {t - h, t + h}) {
        const FieldSample sn = eval_field(field, ts);
        if (!sn.log_d_defined) throw UndefinedRegionError(t - h, t + h);
        const Complex dtw_n = complex_detuning(system, field, sn);
        const Complex rad = off_resonance_radicand(dtw_n, sn.rabi, -nonadiabaticity_rate(sn));
        neighbors[side++] = resolve_branch(rad, q.big_omega);
    }
    const Complex d_big_omega = (neighbors[1] - neighbors[0]) / (2.0 * h);

    const WeightFactors w =
        weight_factors(q.dtw, q.big_omega, d_big_omega, detuning_sign(system, field, opt));
    q.lambda_plus = w.lambda_plus;
    q.lambda_minus = w.lambda_minus;
    q.lambda_tilde_plus = w.lambda_tilde_plus;
    q.lambda_tilde_minus = w.lambda_tilde_minus;
    q.cos_w = w.cos_w;
    q.sin_w = w.sin_w;
    q.omega_G = system.omega_g + w.lambda_minus;
    q.omega_E = system.omega_e - w.lambda_minus;
    q.omega_E_eff = q.omega_E + (q.dtw - detuning(system, field));
    return q;
}

/// Dressed bundle along a grid with the branch seeded from point to point.
template <Drivable F>
std::vector<DressedQuantities> dressed_series(const SystemConfig& system, const F& field,
                                              std::span<const double> grid,
                                              const DressedOptions& opt = {}) {
    std::vector<DressedQuantities> out;
    out.reserve(grid.size());
    std::optional<Complex> seed;
    for (double t : grid) {
        out.push_back(dressed_quantities(system, field, t, seed, opt));
        seed = out.back().big_omega;
    }
    return out;
}

/// The four adiabatic-state components in the bare basis, stored as complex
/// phase exponents X(t); the component coefficient is exp(X).
///   G_r on |g>: X = -i (phi_ref + Int_0^t w_G)
///   G_v on |e>: X = -i (phi_ref + phi(t) + Int_0^t (w_G + w))
///   E_r on |e>: X = -i (phi_ref + phi(t) + Int_0^t w'_E)
///   E_v on |g>: X = -i (phi_ref + Int_0^t (w'_E - w))
/// phi_ref is phi_g for ground initial conditions; for excited initial
/// conditions the same structure carries phi_e instead.
struct PsasComponents {
    std::vector<double> times;
    std::vector<Complex> g_real;
    std::vector<Complex> g_virtual;
    std::vector<Complex> e_real;
    std::vector<Complex> e_virtual;
    InitialKind ic = InitialKind::Ground;
    /// advisory: max generalized-adiabaticity ratio on the grid (NaN when the
    /// driving field type has no ratio table)
    double max_adiabaticity_ratio = std::numeric_limits<double>::quiet_NaN();
    bool adiabaticity_ok = true;
};

namespace dressed_detail {

template <Drivable F>
struct QuasiEnergyIntegrand {
    const SystemConfig& system;
    const F& field;
    double bare_detuning;

    struct Node {
        Complex omega_G{};
        Complex omega_E_eff{};
        Complex w{};  ///< resolved branch at this node
    };

    Node operator()(double t, Complex seed) const {
        const FieldSample s = eval_field(field, t);
        if (!s.log_d_defined) throw UndefinedRegionError(t, t);
        const Complex dtw = complex_detuning(system, field, s);
        const Complex w =
            resolve_branch(off_resonance_radicand(dtw, s.rabi, -nonadiabaticity_rate(s)), seed);
        const Complex lm = 0.5 * (dtw - w);
        Node node;
        node.omega_G = system.omega_g + lm;
        node.omega_E_eff = system.omega_e - lm + (dtw - bare_detuning);
        node.w = w;
        return node;
    }
};

template <class Eval, class Node>
std::array<Complex, 2> pair_simpson(const Eval& eval, double a, double b, const Node& na,
                                    const Node& nb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const Node nm = eval(m, na.w);
    auto simpson = [](double lo, double hi, const Node& f0, const Node& f1, const Node& f2) {
        const double w = (hi - lo) / 6.0;
        return std::array<Complex, 2>{w * (f0.omega_G + 4.0 * f1.omega_G + f2.omega_G),
                                      w * (f0.omega_E_eff + 4.0 * f1.omega_E_eff + f2.omega_E_eff)};
    };
    const auto whole = simpson(a, b, na, nm, nb);
    const Node nlm = eval(0.5 * (a + m), na.w);
    const Node nrm = eval(0.5 * (m + b), nm.w);
    const auto left = simpson(a, m, na, nlm, nm);
    const auto right = simpson(m, b, nm, nrm, nb);
    const Complex dG = left[0] + right[0] - whole[0];
    const Complex dE = left[1] + right[1] - whole[1];
    if (depth <= 0 || std::max(std::abs(dG), std::abs(dE)) <= 15.0 * tol)
        return {left[0] + right[0] + dG / 15.0, left[1] + right[1] + dE / 15.0};
    const auto il = pair_simpson(eval, a, m, na, nm, 0.5 * tol, depth - 1);
    const auto ir = pair_simpson(eval, m, b, nm, nb, 0.5 * tol, depth - 1);
    return {il[0] + ir[0], il[1] + ir[1]};
}

}  // namespace dressed_detail

/// Builds the four components on the grid. The phase integrals start at t = 0
/// regardless of where the grid starts. Adiabaticity violations on the grid
/// are recorded as a warning in the result, not raised.
template <Drivable F>
PsasComponents psas_components(const SystemConfig& system, const F& field,
                               std::span<const double> grid, InitialKind ic,
                               const DressedOptions& opt = {}) {
    if (grid.empty()) throw ConfigError("psas_components: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ConfigError("psas_components: grid must be strictly increasing");

    PsasComponents out;
    out.times.assign(grid.begin(), grid.end());
    out.ic = ic;

    const double phi_ref = ic == InitialKind::Ground ? system.phi_g : system.phi_e;
    const double w0 = carrier_frequency(field);

    dressed_detail::QuasiEnergyIntegrand<F> integrand{system, field, detuning(system, field)};
    using Node = typename dressed_detail::QuasiEnergyIntegrand<F>::Node;

    const double total_len = std::abs(grid.front()) + (grid.back() - grid.front());
    auto interval_tol = [&](double len) {
        return total_len > 0.0 ? opt.quadrature_tol * std::abs(len) / total_len
                               : opt.quadrature_tol;
    };

    // branch anchored at the integration origin t = 0
    const FieldSample s0 = eval_field(field, 0.0);
    if (!s0.log_d_defined) throw UndefinedRegionError(0.0, 0.0);
    const Complex dtw0 = complex_detuning(system, field, s0);
    const Complex w_origin = resolve_branch(
        off_resonance_radicand(dtw0, s0.rabi, -nonadiabaticity_rate(s0)), std::nullopt);

    Complex int_G{};
    Complex int_E{};
    Node cursor = integrand(0.0, w_origin);
    double cursor_t = 0.0;
    if (grid.front() != 0.0) {
        const Node at_start = integrand(grid.front(), cursor.w);
        const auto seg = dressed_detail::pair_simpson(integrand, 0.0, grid.front(), cursor,
                                                      at_start, interval_tol(grid.front()), 30);
        int_G += seg[0];
        int_E += seg[1];
        cursor = at_start;
        cursor_t = grid.front();
    }

    out.g_real.reserve(grid.size());
    out.g_virtual.reserve(grid.size());
    out.e_real.reserve(grid.size());
    out.e_virtual.reserve(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t != cursor_t) {
            const Node at_t = integrand(t, cursor.w);
            const auto seg = dressed_detail::pair_simpson(integrand, cursor_t, t, cursor, at_t,
                                                          interval_tol(t - cursor_t), 30);
            int_G += seg[0];
            int_E += seg[1];
            cursor = at_t;
            cursor_t = t;
        }
        const FieldSample s = eval_field(field, t);
        out.g_real.push_back(-kI * (phi_ref + int_G));
        out.g_virtual.push_back(-kI * (phi_ref + s.phase + int_G + w0 * t));
        out.e_real.push_back(-kI * (phi_ref + s.phase + int_E));
        out.e_virtual.push_back(-kI * (phi_ref + int_E - w0 * t));
    }

    if constexpr (std::same_as<F, FieldConfig>) {
        const AdiabaticityReport report = adiabaticity_report(
            system, field, grid, opt.adiabaticity_n_max, opt.adiabaticity_threshold);
        out.max_adiabaticity_ratio = report.max_ratio;
        out.adiabaticity_ok = report.pass;
    }
    return out;
}

/// Assembled adiabatic states per time: |G> = SIN G_v + COS G_r and
/// |E> = COS E_r - SIN E_v, each as coefficients on (|g>, |e>).
struct AdiabaticStates {
    std::vector<double> times;
    std::vector<State2> ground;
    std::vector<State2> excited;
};

AdiabaticStates assemble_psas(const PsasComponents& components,
                              std::span<const DressedQuantities> quantities);

}  // namespace psas

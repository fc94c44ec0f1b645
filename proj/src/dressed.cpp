#include "psas/dressed.hpp"

namespace psas {

WeightFactors weight_factors(Complex dtw, Complex big_omega, Complex d_big_omega,
                             double detuning_sign) {
    if (std::abs(big_omega) < 1e-12)
        throw DegeneratePointError("weight_factors: off-resonance Rabi frequency vanished");
    WeightFactors w;
    w.lambda_plus = 0.5 * (dtw + big_omega);
    w.lambda_minus = 0.5 * (dtw - big_omega);
    const Complex correction = 0.5 * kI * d_big_omega / big_omega;
    w.lambda_tilde_plus = w.lambda_plus - correction;
    w.lambda_tilde_minus = w.lambda_minus - correction;
    w.cos_w = std::sqrt(w.lambda_tilde_plus / big_omega);
    w.sin_w = detuning_sign * std::sqrt(-w.lambda_tilde_minus / big_omega);
    return w;
}

Complex resolve_branch(Complex radicand, std::optional<Complex> seed) {
    Complex w = std::sqrt(radicand);  // principal: Re >= 0
    if (seed) {
        if (std::abs(-w - *seed) < std::abs(w - *seed)) w = -w;
    } else if (w.real() < 0.0 || (w.real() == 0.0 && w.imag() < 0.0)) {
        w = -w;
    }
    return w;
}

std::vector<Complex> branch_track(std::span<const Complex> radicand) {
    std::vector<Complex> out;
    out.reserve(radicand.size());
    if (radicand.empty()) return out;
    Complex prev = resolve_branch(radicand[0], std::nullopt);
    out.push_back(prev);
    for (std::size_t i = 1; i < radicand.size(); ++i) {
        const Complex p = std::sqrt(radicand[i]);
        const double jump_pos = std::abs(p - prev);
        const double jump_neg = std::abs(-p - prev);
        const Complex next = jump_pos <= jump_neg ? p : -p;
        if (std::min(jump_pos, jump_neg) > 0.5 * std::abs(prev))
            throw BranchAmbiguityError(
                "branch_track: both square-root branches jump by more than 50% at index " +
                std::to_string(i) + "; use a finer grid");
        out.push_back(next);
        prev = next;
    }
    return out;
}

std::vector<Complex> branch_track(std::span<const Complex> dtw_sq,
                                  std::span<const double> rabi_sq,
                                  std::span<const Complex> d_dtw) {
    if (dtw_sq.size() != rabi_sq.size() || dtw_sq.size() != d_dtw.size())
        throw ConfigError("branch_track: input series sizes differ");
    std::vector<Complex> radicand(dtw_sq.size());
    for (std::size_t i = 0; i < radicand.size(); ++i)
        radicand[i] = dtw_sq[i] + rabi_sq[i] - 2.0 * kI * d_dtw[i];
    return branch_track(radicand);
}

AdiabaticStates assemble_psas(const PsasComponents& components,
                              std::span<const DressedQuantities> quantities) {
    if (components.times.size() != quantities.size())
        throw ConfigError("assemble_psas: component and quantity grids differ in size");
    for (std::size_t i = 0; i < quantities.size(); ++i)
        if (components.times[i] != quantities[i].t)
            throw ConfigError("assemble_psas: component and quantity grids are misaligned");

    AdiabaticStates states;
    states.times = components.times;
    states.ground.reserve(quantities.size());
    states.excited.reserve(quantities.size());
    for (std::size_t i = 0; i < quantities.size(); ++i) {
        const Complex cw = quantities[i].cos_w;
        const Complex sw = quantities[i].sin_w;
        states.ground.emplace_back(cw * std::exp(components.g_real[i]),
                                   sw * std::exp(components.g_virtual[i]));
        states.excited.emplace_back(-sw * std::exp(components.e_virtual[i]),
                                    cw * std::exp(components.e_real[i]));
    }
    return states;
}

}  // namespace psas

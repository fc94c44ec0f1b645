#include "psas/phase.hpp"

#include <cmath>
#include <numbers>

namespace psas {

std::vector<double> total_phase(const Trajectory& traj) {
    if (traj.states.empty()) throw ConfigError("total_phase: empty trajectory");
    const State2 ref = lab_coefficients(traj.states.front());
    std::vector<double> out(traj.states.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const State2 now = lab_coefficients(traj.states[i]);
        const Complex overlap = ref.dot(now);  // conjugates the reference
        if (std::abs(overlap) < 1e-12)
            throw UndefinedPhaseError("total_phase: orthogonal passage at t = " +
                                      std::to_string(traj.times[i]));
        const double raw = std::arg(overlap);
        const double unwrapped =
            raw + 2.0 * std::numbers::pi *
                      std::round((prev - raw) / (2.0 * std::numbers::pi));
        if (i > 0 && std::abs(unwrapped - prev) > 0.99 * std::numbers::pi)
            throw ConfigError("total_phase: phase step near pi at t = " +
                              std::to_string(traj.times[i]) +
                              "; the sampling grid is too coarse to unwrap");
        out[i] = unwrapped;
        prev = unwrapped;
    }
    return out;
}

double geometric_phase(std::span<const Eigen::VectorXcd> loop) {
    if (loop.size() < 2) throw ConfigError("geometric_phase: need at least two loop points");
    const double n_first = loop.front().norm();
    const double n_last = loop.back().norm();
    const Complex closing_check = loop.front().dot(loop.back());
    if (std::abs(closing_check) < (1.0 - 1e-6) * n_first * n_last)
        throw ConfigError("geometric_phase: open loop (endpoints not parallel within 1e-6)");

    Complex product = 1.0;
    auto absorb = [&](const Complex& overlap, double norms) {
        if (std::abs(overlap) <= 0.5 * norms)
            throw ConfigError("geometric_phase: successive overlap below 0.5; refine the loop");
        product *= overlap / std::abs(overlap);
    };
    for (std::size_t i = 0; i + 1 < loop.size(); ++i)
        absorb(loop[i].dot(loop[i + 1]), loop[i].norm() * loop[i + 1].norm());
    absorb(loop.back().dot(loop.front()), n_last * n_first);

    double phase = -std::arg(product);
    if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
    return phase;
}

}  // namespace psas

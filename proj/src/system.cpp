#include "psas/system.hpp"

#include <cmath>

namespace psas {

void SystemConfig::validate() const {
    if (!(omega_e > omega_g)) throw ConfigError("system: omega_e must exceed omega_g");
    if (!(gamma_re >= 0.0)) throw ConfigError("system: gamma_re must be >= 0");
    if (!std::isfinite(phi_g) || !std::isfinite(phi_e))
        throw ConfigError("system: initial phases must be finite");
}

BareState initial_state(const SystemConfig& system, const StateSpec& spec) {
    BareState state;
    state.t = 0.0;
    state.phase_g = system.phi_g;
    state.phase_e = system.phi_e;
    switch (spec.kind) {
        case StateSpec::Kind::Ground:
            state.g_amp = 1.0;
            state.e_amp = 0.0;
            break;
        case StateSpec::Kind::Excited:
            state.g_amp = 0.0;
            state.e_amp = 1.0;
            break;
        case StateSpec::Kind::Superposition: {
            const double norm = std::norm(spec.g) + std::norm(spec.e);
            if (std::abs(norm - 1.0) > 1e-12)
                throw ConfigError("initial_state: superposition amplitudes not normalized");
            state.g_amp = spec.g;
            state.e_amp = spec.e;
            break;
        }
    }
    return state;
}

}  // namespace psas

#include "psas/propagator.hpp"

namespace psas {

std::vector<PopulationSample> bare_populations(const Trajectory& traj) {
    std::vector<PopulationSample> out;
    out.reserve(traj.states.size());
    for (const BareState& s : traj.states) {
        const double pg = std::norm(s.g_amp);
        const double pe = std::norm(s.e_amp);
        out.push_back({s.t, pg, pe, pg + pe});
    }
    return out;
}

}  // namespace psas

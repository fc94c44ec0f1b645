#pragma once

#include <span>
#include <vector>

#include "psas/field.hpp"
#include "psas/system.hpp"

namespace psas {

struct RatioEntry {
    int n = 0;
    int k = 0;
    double t = 0.0;
    double ratio = 0.0;    ///< +inf where the envelope is below floor and k > 0
    bool violated = false; ///< floor violation sentinel (ratio forced to +inf)
};

/// Margin table for the generalized adiabatic hierarchy
///   |d^n/dt^n (dphi/dt - i W^-1 dW/dt)|  <<  |dw - i gamma_e/2|^(n+1-k) |W|^k,
/// n in [0, n_max], k in [0, n+1].
struct AdiabaticityReport {
    std::vector<double> grid;
    int n_max = 2;
    double threshold = 0.1;
    std::vector<RatioEntry> ratios;  ///< ordered by (n, k, t)
    double max_ratio = 0.0;
    int worst_n = 0;
    int worst_k = 0;
    double worst_t = 0.0;
    bool pass = true;
};

AdiabaticityReport adiabaticity_report(const SystemConfig& system, const FieldConfig& field,
                                       std::span<const double> grid, int n_max = 2,
                                       double threshold = 0.1);

}  // namespace psas

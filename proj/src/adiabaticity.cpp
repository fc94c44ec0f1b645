#include "psas/adiabaticity.hpp"

#include <cmath>
#include <limits>

namespace psas {

AdiabaticityReport adiabaticity_report(const SystemConfig& system, const FieldConfig& field,
                                       std::span<const double> grid, int n_max,
                                       double threshold) {
    if (grid.empty()) throw ConfigError("adiabaticity_report: empty grid");
    if (n_max > field.n_max)
        throw ConfigError("adiabaticity_report: n_max exceeds the field's n_max");
    if (!(threshold > 0.0)) throw ConfigError("adiabaticity_report: threshold must be > 0");

    AdiabaticityReport report;
    report.grid.assign(grid.begin(), grid.end());
    report.n_max = n_max;
    report.threshold = threshold;

    // |dw - i gamma_e/2| with the full complex damping gamma_e = g' - i g''
    const double dw = detuning(system, field.carrier);
    const double det_mag = std::abs(Complex(dw - 0.5 * system.gamma_im, -0.5 * system.gamma_re));
    const double inf = std::numeric_limits<double>::infinity();

    report.max_ratio = -1.0;
    for (int n = 0; n <= n_max; ++n) {
        for (int k = 0; k <= n + 1; ++k) {
            for (double t : grid) {
                const FieldSample s = eval_field(field, t);
                RatioEntry entry{n, k, t, 0.0, false};
                if (!s.log_d_defined && k > 0) {
                    entry.ratio = inf;
                    entry.violated = true;
                } else {
                    const double num =
                        std::abs(nonadiabatic_derivative_unchecked(field, n, t).value);
                    const double den =
                        std::pow(det_mag, n + 1 - k) * std::pow(std::abs(s.rabi), k);
                    entry.ratio = num / den;
                }
                if (entry.ratio > report.max_ratio) {
                    report.max_ratio = entry.ratio;
                    report.worst_n = n;
                    report.worst_k = k;
                    report.worst_t = t;
                }
                report.ratios.push_back(entry);
            }
        }
    }
    report.pass = report.max_ratio < threshold;
    return report;
}

}  // namespace psas

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "psas/types.hpp"

namespace psas {

/// Adaptive Simpson integration of a complex-valued integrand on [a, b] to an
/// absolute tolerance. a > b is allowed (the sign flips).
Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b,
                         double abs_tol, int max_depth = 30);

/// Cumulative integral on a monotone grid through local quadratics: the
/// segment [t_i, t_{i+1}] is integrated from the parabola through the three
/// nearest samples. result[0] == 0.
std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f);
std::vector<Complex> cumulative_integral(std::span<const double> t, std::span<const Complex> f);

}  // namespace psas

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace psas {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Bad configuration or invalid input. CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base class for numerical failures. CLI maps these to exit status 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantity that needs the envelope log-derivative was requested where the
/// envelope is below the configured relative floor.
class UndefinedRegionError : public NumericError {
public:
    UndefinedRegionError(double lo, double hi)
        : NumericError("envelope below relative floor on [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]; log-derivative undefined there"),
          interval_lo(lo), interval_hi(hi) {}
    double interval_lo;
    double interval_hi;
};

/// The off-resonance Rabi frequency vanished; weight denominators are singular.
class DegeneratePointError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Neither square-root branch continues the tracked series; the grid is too coarse.
class BranchAmbiguityError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The integrator could not reach the requested tolerance within the step budget.
class IntegrationError : public NumericError {
public:
    IntegrationError(const std::string& what, double reached)
        : NumericError(what + " (integration stopped at t = " + std::to_string(reached) + ")"),
          t_reached(reached) {}
    double t_reached;
};

/// State overlap vanished; the phase of an (almost) orthogonal passage is undefined.
class UndefinedPhaseError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace psas

#include "psas/field.hpp"

#include <cmath>
#include <vector>

namespace psas {

std::string to_string(EnvelopeKind kind) {
    switch (kind) {
        case EnvelopeKind::Constant: return "constant";
        case EnvelopeKind::Gaussian: return "gaussian";
        case EnvelopeKind::Sech: return "sech";
        case EnvelopeKind::SmoothRamp: return "smooth-ramp";
    }
    throw ConfigError("unsupported envelope kind");
}

std::string to_string(PhaseKind kind) {
    switch (kind) {
        case PhaseKind::Constant: return "constant";
        case PhaseKind::LinearChirp: return "linear-chirp";
        case PhaseKind::Sinusoidal: return "sinusoidal";
    }
    throw ConfigError("unsupported phase kind");
}

EnvelopeKind envelope_kind_from_string(const std::string& name) {
    if (name == "constant") return EnvelopeKind::Constant;
    if (name == "gaussian") return EnvelopeKind::Gaussian;
    if (name == "sech") return EnvelopeKind::Sech;
    if (name == "smooth-ramp") return EnvelopeKind::SmoothRamp;
    throw ConfigError("unsupported envelope kind '" + name + "'");
}

PhaseKind phase_kind_from_string(const std::string& name) {
    if (name == "constant") return PhaseKind::Constant;
    if (name == "linear-chirp") return PhaseKind::LinearChirp;
    if (name == "sinusoidal") return PhaseKind::Sinusoidal;
    throw ConfigError("unsupported phase kind '" + name + "'");
}

void FieldConfig::validate() const {
    if (!(peak_rabi >= 0.0)) throw ConfigError("field: peak_rabi must be >= 0");
    if (!(width > 0.0)) throw ConfigError("field: width must be > 0");
    if (!(floor > 0.0 && floor < 1.0)) throw ConfigError("field: floor must lie in (0, 1)");
    if (n_max < 0) throw ConfigError("field: n_max must be >= 0");
    if (!std::isfinite(carrier)) throw ConfigError("field: carrier must be finite");
}

FieldSample eval_field(const FieldConfig& config, double t) {
    if (!std::isfinite(t)) throw ConfigError("eval_field: t must be finite");
    FieldSample s;
    s.t = t;

    const double x = (t - config.center) / config.width;
    switch (config.envelope_kind) {
        case EnvelopeKind::Constant:
            s.rabi = config.peak_rabi;
            s.log_d_rabi = 0.0;
            s.d_log_d_rabi = 0.0;
            break;
        case EnvelopeKind::Gaussian:
            s.rabi = config.peak_rabi * std::exp(-x * x);
            s.log_d_rabi = -2.0 * x / config.width;
            s.d_log_d_rabi = -2.0 / (config.width * config.width);
            break;
        case EnvelopeKind::Sech: {
            s.rabi = config.peak_rabi / std::cosh(x);
            const double th = std::tanh(x);
            s.log_d_rabi = -th / config.width;
            const double sech = 1.0 / std::cosh(x);
            s.d_log_d_rabi = -sech * sech / (config.width * config.width);
            break;
        }
        case EnvelopeKind::SmoothRamp: {
            // W0 (1 + tanh x)/2: C-infinity turn-on from 0 to the peak.
            const double th = std::tanh(x);
            s.rabi = 0.5 * config.peak_rabi * (1.0 + th);
            s.log_d_rabi = (1.0 - th) / config.width;
            const double sech = 1.0 / std::cosh(x);
            s.d_log_d_rabi = -sech * sech / (config.width * config.width);
            break;
        }
    }
    // d_rabi as the product keeps log_d_rabi * rabi == d_rabi exact.
    s.d_rabi = s.log_d_rabi * s.rabi;
    s.log_d_defined = s.rabi >= config.floor * config.peak_rabi;

    switch (config.phase_kind) {
        case PhaseKind::Constant:
            s.phase = config.phase_offset;
            s.d_phase = 0.0;
            s.dd_phase = 0.0;
            break;
        case PhaseKind::LinearChirp:
            s.phase = config.phase_offset + 0.5 * config.chirp * t * t;
            s.d_phase = config.chirp * t;
            s.dd_phase = config.chirp;
            break;
        case PhaseKind::Sinusoidal:
            s.phase = config.phase_offset + config.mod_depth * std::sin(config.mod_rate * t);
            s.d_phase = config.mod_depth * config.mod_rate * std::cos(config.mod_rate * t);
            s.dd_phase = -config.mod_depth * config.mod_rate * config.mod_rate *
                         std::sin(config.mod_rate * t);
            break;
    }
    s.total_phase = config.carrier * t + s.phase;
    return s;
}

namespace {

Complex closed_form_d(const FieldConfig& config, int n, double t) {
    const FieldSample s = eval_field(config, t);
    return n == 0 ? nonadiabaticity(s) : nonadiabaticity_rate(s);
}

// Central-difference stencil for the m-th derivative of f, nodes at
// t + (m/2 - j) h, j = 0..m, weights (-1)^j binom(m, j).
Complex central_difference(const FieldConfig& config, int m, double t, double h,
                           std::vector<double>* nodes) {
    Complex acc{};
    double binom = 1.0;
    double sign = 1.0;
    for (int j = 0; j <= m; ++j) {
        const double node = t + (0.5 * m - j) * h;
        if (nodes) nodes->push_back(node);
        acc += sign * binom * closed_form_d(config, 1, node);
        binom *= double(m - j) / double(j + 1);
        sign = -sign;
    }
    return acc / std::pow(h, m);
}

DerivativeEstimate derivative_impl(const FieldConfig& config, int n, double t, bool check_floor) {
    if (n < 0 || n > config.n_max)
        throw ConfigError("nonadiabatic_derivative: order " + std::to_string(n) +
                          " outside [0, n_max=" + std::to_string(config.n_max) + "]");

    auto floor_guard = [&](const std::vector<double>& nodes) {
        if (!check_floor) return;
        double lo = t, hi = t;
        bool bad = false;
        for (double node : nodes) {
            if (!eval_field(config, node).log_d_defined) {
                bad = true;
                lo = std::min(lo, node);
                hi = std::max(hi, node);
            }
        }
        if (bad) throw UndefinedRegionError(lo, hi);
    };

    if (n <= 1) {
        floor_guard({t});
        return {closed_form_d(config, n, t), 0.0};
    }

    // m-th finite difference of the order-1 closed form, m = n - 1, with one
    // Richardson level: R = (4 D(h/2) - D(h)) / 3.
    const int m = n - 1;
    const double h = config.width * 1e-3;
    std::vector<double> nodes{t};
    const Complex coarse = central_difference(config, m, t, h, &nodes);
    const Complex fine = central_difference(config, m, t, 0.5 * h, &nodes);
    floor_guard(nodes);
    const Complex value = (4.0 * fine - coarse) / 3.0;
    return {value, std::abs(value - fine)};
}

}  // namespace

DerivativeEstimate nonadiabatic_derivative(const FieldConfig& config, int n, double t) {
    return derivative_impl(config, n, t, true);
}

DerivativeEstimate nonadiabatic_derivative_unchecked(const FieldConfig& config, int n, double t) {
    return derivative_impl(config, n, t, false);
}

}  // namespace psas

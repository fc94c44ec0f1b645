#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "psas/types.hpp"

// Adaptive embedded Dormand-Prince 5(4) with PI step-size control and the
// method's 4th-order continuous extension for dense output. Coefficients and
// the controller follow Hairer, Norsett & Wanner, "Solving ODEs I", DOPRI5.

namespace psas {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 10'000'000;
    double initial_step = 0.0;  ///< 0 selects the step automatically
};

namespace ode_detail {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

// y5 - y4 error weights
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// dense-output weights
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

template <class State>
double scaled_rms(const State& err, const State& y0, const State& y1, double atol, double rtol) {
    const auto scale =
        (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
    return std::sqrt((err.cwiseAbs().array() / scale).square().sum() / double(err.size()));
}

}  // namespace ode_detail

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0), writing states at the
/// requested sample times through on_sample(index, t, y). Sample times must be
/// sorted ascending and lie in [t0, t1]; they are filled from the method's
/// interpolant as the integration passes them.
template <class State, class Rhs, class OnSample>
void integrate_dopri5(Rhs&& rhs, State y, double t0, double t1,
                      std::span<const double> samples, OnSample&& on_sample,
                      const OdeOptions& opt = {}) {
    using namespace ode_detail;
    if (!(t1 > t0)) throw ConfigError("integrate_dopri5: t1 must exceed t0");

    std::size_t next = 0;
    while (next < samples.size() && samples[next] <= t0) {
        on_sample(next, samples[next], y);
        ++next;
    }

    double t = t0;
    State k1 = rhs(t, y);

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic, simplified.
        const double d0 = scaled_rms(y, y, y, opt.atol, opt.rtol);
        const double d1n = scaled_rms(k1, y, y, opt.atol, opt.rtol);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, t1 - t0);
        const State y1 = y + h0 * k1;
        const State f1 = rhs(t + h0, y1);
        const double d2 = scaled_rms(State(f1 - k1), y, y, opt.atol, opt.rtol) / h0;
        double h1 = (std::max(d1n, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1n, d2), 0.2);
        h = std::min({100.0 * h0, h1, t1 - t0});
    }

    constexpr double safe = 0.9, beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 5.0, facc2 = 0.1;  // clamp factors: h/5 .. 10h
    double facold = 1e-4;
    bool rejected = false;
    long steps = 0;

    while (t < t1) {
        if (++steps > opt.max_steps)
            throw IntegrationError("integrate_dopri5: step budget exhausted", t);
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (t + h == t) throw IntegrationError("integrate_dopri5: step size underflow", t);

        const State k2 = rhs(t + c2 * h, State(y + h * (a21 * k1)));
        const State k3 = rhs(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
        const State k4 = rhs(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const State k5 =
            rhs(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const State k6 =
            rhs(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const State ynew =
            y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const State k7 = rhs(t + h, ynew);
        const State errv =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err = scaled_rms(errv, y, ynew, opt.atol, opt.rtol);
        const double fac11 = std::pow(err, expo1);

        if (err <= 1.0) {
            // dense output over (t, t + h]
            if (next < samples.size() && samples[next] <= t + h) {
                const State ydiff = ynew - y;
                const State bspl = h * k1 - ydiff;
                const State rc4 = ydiff - h * k7 - bspl;
                const State rc5 =
                    h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next < samples.size() && samples[next] <= t + h) {
                    const double theta = std::clamp((samples[next] - t) / h, 0.0, 1.0);
                    const State ys =
                        y + theta * (ydiff +
                                     (1.0 - theta) * (bspl + theta * (rc4 + (1.0 - theta) * rc5)));
                    on_sample(next, samples[next], ys);
                    ++next;
                }
            }
            facold = std::max(err, 1e-4);
            t += h;
            y = ynew;
            k1 = k7;
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double hnew = h / fac;
            if (rejected) hnew = std::min(hnew, h);
            rejected = false;
            h = hnew;
            if (last && next >= samples.size()) break;
        } else {
            rejected = true;
            h = h / std::min(facc1, fac11 / safe);
        }
    }

    // fp slack: serve any samples equal to t1 that survived the loop
    while (next < samples.size() && samples[next] <= t1 + 1e-12 * std::max(1.0, std::abs(t1))) {
        on_sample(next, samples[next], y);
        ++next;
    }
    if (next < samples.size())
        throw IntegrationError("integrate_dopri5: sample time beyond integration span", t);
}

}  // namespace psas

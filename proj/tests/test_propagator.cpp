#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "psas/propagator.hpp"

using namespace psas;

namespace {

SystemConfig make_system(double detuning_value, double carrier, double gamma_re = 0.0,
                         double gamma_im = 0.0) {
    SystemConfig s;
    s.omega_g = 0.0;
    s.omega_e = carrier + detuning_value;
    s.gamma_re = gamma_re;
    s.gamma_im = gamma_im;
    return s;
}

FieldConfig constant_drive(double rabi, double carrier) {
    FieldConfig f;
    f.carrier = carrier;
    f.peak_rabi = rabi;
    return f;
}

}  // namespace

TEST_CASE("resonant Rabi flopping matches the closed form") {
    const SystemConfig sys = make_system(0.0, 5.0);
    const FieldConfig field = constant_drive(1.0, 5.0);
    const Trajectory traj = propagate(sys, field, initial_state(sys, StateSpec::ground()),
                                      {0.0, std::numbers::pi}, 1e-10);
    double max_err = 0.0;
    for (const BareState& s : traj.states)
        max_err = std::max(max_err,
                           std::abs(std::norm(s.e_amp) - oracles::rabi_excited_population(0.0, 1.0, s.t)));
    CHECK(max_err < 1e-8);
    CHECK(std::norm(traj.states.back().e_amp) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("off-resonant generalized Rabi oscillation") {
    const SystemConfig sys = make_system(3.0, 5.0);
    const FieldConfig field = constant_drive(4.0, 5.0);
    const Trajectory traj = propagate(sys, field, initial_state(sys, StateSpec::ground()),
                                      {0.0, 4.0}, 1e-10);
    for (const BareState& s : traj.states) {
        const double expected = oracles::rabi_excited_population(3.0, 4.0, s.t);
        CHECK(std::abs(std::norm(s.e_amp) - expected) < 1e-8);
    }
}

TEST_CASE("pi/2 resonant pulse leaves half the population excited") {
    const SystemConfig sys = make_system(0.0, 5.0);
    const FieldConfig field = constant_drive(1.0, 5.0);
    const Trajectory traj = propagate(sys, field, initial_state(sys, StateSpec::ground()),
                                      {0.0, 0.5 * std::numbers::pi}, 1e-10);
    const auto pops = bare_populations(traj);
    CHECK(pops.back().pop_e == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("zero field leaves the rotating-frame amplitudes frozen") {
    SystemConfig sys = make_system(2.0, 3.0);
    sys.omega_g = 1.5;
    sys.omega_e += 1.5;
    const FieldConfig field = constant_drive(0.0, 3.0);
    const Trajectory traj =
        propagate(sys, field, initial_state(sys, StateSpec::ground()), {0.0, 7.0}, 1e-10);
    for (const BareState& s : traj.states) {
        CHECK(s.g_amp == Complex(1.0, 0.0));
        CHECK(std::norm(s.e_amp) == 0.0);
    }
    for (const PopulationSample& p : bare_populations(traj)) {
        CHECK(p.pop_g == 1.0);
        CHECK(p.pop_e == 0.0);
        CHECK(p.norm == 1.0);
    }
    // bare phase bookkeeping is analytic
    const BareState& last = traj.states.back();
    CHECK(last.phase_g - traj.states.front().phase_g ==
          doctest::Approx(sys.omega_g * 7.0).epsilon(1e-15));
}

TEST_CASE("pure decay of the excited state") {
    const SystemConfig sys = make_system(2.0, 3.0, 0.2);
    const FieldConfig field = constant_drive(0.0, 3.0);
    const Trajectory traj =
        propagate(sys, field, initial_state(sys, StateSpec::excited()), {0.0, 10.0}, 1e-10);
    for (const BareState& s : traj.states)
        CHECK(std::abs(std::norm(s.e_amp) - std::exp(-0.2 * s.t)) < 1e-8);
}

TEST_CASE("imaginary damping alone shifts the level but moves no population") {
    const SystemConfig sys = make_system(2.0, 3.0, 0.0, 0.8);
    const FieldConfig field = constant_drive(0.0, 3.0);
    const Trajectory traj =
        propagate(sys, field, initial_state(sys, StateSpec::excited()), {0.0, 10.0}, 1e-12);
    for (const BareState& s : traj.states) CHECK(std::abs(std::norm(s.e_amp) - 1.0) < 1e-10);
}

TEST_CASE("norm behavior over random drive configurations") {
    for (int trial = 0; trial < 12; ++trial) {
        FieldConfig f;
        f.carrier = oracles::uniform(1.0, 8.0);
        f.envelope_kind =
            trial % 3 == 0 ? EnvelopeKind::Constant
                           : (trial % 3 == 1 ? EnvelopeKind::Gaussian : EnvelopeKind::Sech);
        f.peak_rabi = oracles::uniform(0.2, 3.0);
        f.center = oracles::uniform(1.0, 3.0);
        f.width = oracles::uniform(0.8, 2.5);
        f.phase_kind = trial % 2 == 0 ? PhaseKind::Constant : PhaseKind::LinearChirp;
        f.chirp = oracles::uniform(-0.5, 0.5);
        SystemConfig sys = make_system(oracles::uniform(-2.0, 2.0), f.carrier);
        sys.phi_g = oracles::uniform(0.0, 6.0);
        sys.phi_e = oracles::uniform(0.0, 6.0);
        const double tol = 1e-9;

        SUBCASE("") {}
        const bool damped = trial % 4 == 3;
        if (damped) sys.gamma_re = oracles::uniform(0.05, 0.4);

        const Trajectory traj = propagate(
            sys, f, initial_state(sys, StateSpec::superposition(std::sqrt(0.6), std::sqrt(0.4))),
            {0.0, 6.0}, tol);
        double prev_norm = 1.0;
        for (const BareState& s : traj.states) {
            const double norm = std::norm(s.g_amp) + std::norm(s.e_amp);
            if (damped) {
                CHECK(norm <= prev_norm + 100.0 * tol);
            } else {
                CHECK(std::abs(norm - 1.0) <= 100.0 * tol);
            }
            prev_norm = norm;
        }
    }
}

TEST_CASE("second-order form agrees with the first-order system") {
    SUBCASE("constant drive, within ten integrator tolerances") {
        const SystemConfig sys = make_system(3.0, 5.0);
        const FieldConfig field = constant_drive(4.0, 5.0);
        const BareState init = initial_state(sys, StateSpec::ground());
        const Trajectory a = propagate(sys, field, init, {0.0, 3.0}, 1e-10);
        const Trajectory b = propagate_second_order(sys, field, init, {0.0, 3.0}, 1e-10);
        for (std::size_t i = 0; i < a.states.size(); ++i) {
            CHECK(std::abs(std::norm(a.states[i].g_amp) - std::norm(b.states[i].g_amp)) < 1e-9);
            CHECK(std::abs(std::norm(a.states[i].e_amp) - std::norm(b.states[i].e_amp)) < 1e-9);
        }
    }
    SUBCASE("gaussian pulse at large detuning") {
        SystemConfig sys = make_system(10.0, 50.0);
        FieldConfig f;
        f.carrier = 50.0;
        f.envelope_kind = EnvelopeKind::Gaussian;
        f.peak_rabi = 1.0;
        f.center = 4.0;
        f.width = 2.0;
        const BareState init = initial_state(sys, StateSpec::ground());
        const Trajectory a = propagate(sys, f, init, {0.0, 8.0}, 1e-10);
        const Trajectory b = propagate_second_order(sys, f, init, {0.0, 8.0}, 1e-10);
        CHECK(std::abs(std::norm(a.states.back().e_amp) - std::norm(b.states.back().e_amp)) <
              1e-6);
    }
    SUBCASE("damped constant drive") {
        const SystemConfig sys = make_system(3.0, 5.0, 0.15, 0.1);
        const FieldConfig field = constant_drive(4.0, 5.0);
        const BareState init = initial_state(sys, StateSpec::ground());
        const Trajectory a = propagate(sys, field, init, {0.0, 3.0}, 1e-10);
        const Trajectory b = propagate_second_order(sys, field, init, {0.0, 3.0}, 1e-10);
        for (std::size_t i = 0; i < a.states.size(); i += 97) {
            CHECK(std::abs(std::norm(a.states[i].g_amp) - std::norm(b.states[i].g_amp)) < 1e-7);
            CHECK(std::abs(std::norm(a.states[i].e_amp) - std::norm(b.states[i].e_amp)) < 1e-7);
        }
    }
    SUBCASE("excited start is rejected") {
        const SystemConfig sys = make_system(3.0, 5.0);
        const FieldConfig field = constant_drive(4.0, 5.0);
        CHECK_THROWS_AS(propagate_second_order(sys, field,
                                               initial_state(sys, StateSpec::excited()),
                                               {0.0, 1.0}, 1e-10),
                        ConfigError);
    }
}

TEST_CASE("halving the tolerance does not degrade the oracle error") {
    const SystemConfig sys = make_system(3.0, 5.0);
    const FieldConfig field = constant_drive(4.0, 5.0);
    const BareState init = initial_state(sys, StateSpec::ground());
    double tol = 1e-8;
    double prev_err = -1.0;
    for (int halving = 0; halving <= 3; ++halving) {
        const Trajectory traj = propagate(sys, field, init, {0.0, 4.0 * std::numbers::pi}, tol);
        double err = 0.0;
        for (const BareState& s : traj.states)
            err = std::max(err, std::abs(std::norm(s.e_amp) -
                                         oracles::rabi_excited_population(3.0, 4.0, s.t)));
        if (prev_err >= 0.0) CHECK(err <= 2.0 * prev_err);
        prev_err = err;
        tol *= 0.5;
    }
}

TEST_CASE("quasi-energy quadratures ride along the integration") {
    // constant drive: dtw' = dw, w_G = w_g + L- with the 3-4-5 closed form
    SystemConfig sys;
    sys.omega_g = 2.0;
    sys.omega_e = 10.0;
    const FieldConfig field = constant_drive(4.0, 5.0);  // dw = 3
    const Trajectory traj = propagate(sys, field, initial_state(sys, StateSpec::ground()),
                                      {0.0, 2.0}, 1e-10);
    const double t_end = traj.times.back();
    CHECK(std::abs(traj.int_dtw.back() - Complex(3.0 * t_end, 0.0)) < 1e-8);
    // L- = (3 - 5)/2 = -1, so w_G = 1 and w'_E = w_e - L- = 11
    CHECK(std::abs(traj.int_omega_G.back() - Complex(1.0 * t_end, 0.0)) < 1e-8);
    CHECK(std::abs(traj.int_omega_E_eff.back() - Complex(11.0 * t_end, 0.0)) < 1e-8);
}

TEST_CASE("ODE-carried quasi-energy quadratures agree with the quadrature route") {
    // chirped gaussian: both paths integrate w_G and w'_E from 0 with their
    // own branch tracking and error control
    SystemConfig sys;
    sys.omega_g = 1.0;
    sys.omega_e = 9.0;
    sys.gamma_re = 0.08;
    sys.gamma_im = 0.03;
    FieldConfig f;
    f.carrier = 6.0;  // dw = 2
    f.envelope_kind = EnvelopeKind::Gaussian;
    f.peak_rabi = 1.2;
    f.center = 3.0;
    f.width = 2.5;
    f.phase_kind = PhaseKind::LinearChirp;
    f.chirp = 0.15;

    const double t_end = 5.0;
    const Trajectory traj = propagate(sys, f, initial_state(sys, StateSpec::ground()),
                                      {0.0, t_end}, 1e-11);

    std::vector<double> grid{t_end};
    const PsasComponents comps = psas_components(sys, f, grid, InitialKind::Ground);
    // X_Gr = -i (phi_g + I_G)  =>  I_G = i X_Gr - phi_g; same for the E side
    const Complex int_G = kI * comps.g_real.back() - sys.phi_g;
    const Complex int_E = kI * comps.e_real.back() - sys.phi_g -
                          Complex(eval_field(f, t_end).phase, 0.0);
    CHECK(std::abs(traj.int_omega_G.back() - int_G) < 1e-7);
    CHECK(std::abs(traj.int_omega_E_eff.back() - int_E) < 1e-7);
}

TEST_CASE("second-order form under a chirped gaussian") {
    SystemConfig sys;
    sys.omega_g = 0.0;
    sys.omega_e = 60.0;
    FieldConfig f;
    f.carrier = 50.0;  // dw = 10
    f.envelope_kind = EnvelopeKind::Gaussian;
    f.peak_rabi = 1.0;
    f.center = 4.0;
    f.width = 2.0;
    f.phase_kind = PhaseKind::LinearChirp;
    f.chirp = 0.1;
    const BareState init = initial_state(sys, StateSpec::ground());
    const Trajectory a = propagate(sys, f, init, {1.0, 7.0}, 1e-10);
    const Trajectory b = propagate_second_order(sys, f, init, {1.0, 7.0}, 1e-10);
    for (std::size_t i = 0; i < a.states.size(); i += 53) {
        CHECK(std::abs(std::norm(a.states[i].g_amp) - std::norm(b.states[i].g_amp)) < 1e-7);
        CHECK(std::abs(std::norm(a.states[i].e_amp) - std::norm(b.states[i].e_amp)) < 1e-7);
    }
}

TEST_CASE("propagate validates its inputs") {
    const SystemConfig sys = make_system(1.0, 2.0);
    const FieldConfig field = constant_drive(1.0, 2.0);
    const BareState init = initial_state(sys, StateSpec::ground());
    CHECK_THROWS_AS(propagate(sys, field, init, {1.0, 1.0}, 1e-10), ConfigError);
    CHECK_THROWS_AS(propagate(sys, field, init, {0.0, 1.0}, 1e-3), ConfigError);
    CHECK_THROWS_AS(propagate(sys, field, init, {0.0, 1.0}, 1e-14), ConfigError);
}

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "psas/dressed.hpp"
#include "psas/propagator.hpp"

using namespace psas;

namespace {

// static off-resonant 3-4-5 fixture: dw = 3, W = 4, no damping, no chirp
SystemConfig sys345() {
    SystemConfig s;
    s.omega_g = 2.0;
    s.omega_e = 10.0;
    return s;
}

FieldConfig field345() {
    FieldConfig f;
    f.carrier = 5.0;
    f.peak_rabi = 4.0;
    return f;
}

}  // namespace

TEST_CASE("static 3-4-5 closed forms") {
    const DressedQuantities q = dressed_quantities(sys345(), field345(), 1.3);
    CHECK(q.dtw == Complex(3.0, 0.0));
    CHECK(std::abs(q.big_omega - 5.0) < 1e-12);
    CHECK(std::abs(q.lambda_plus - 4.0) < 1e-12);
    CHECK(std::abs(q.lambda_minus - (-1.0)) < 1e-12);
    CHECK(std::abs(q.cos_w - std::sqrt(0.8)) < 1e-12);             // 0.894427...
    CHECK(std::abs(q.sin_w - std::sqrt(0.2)) < 1e-12);             // +0.447214...
    CHECK(std::abs(q.cos_w * q.cos_w + q.sin_w * q.sin_w - 1.0) < 1e-10);
    CHECK(std::abs(q.omega_G - 1.0) < 1e-12);   // w_g + L-
    CHECK(std::abs(q.omega_E - 11.0) < 1e-12);  // w_e - L-
    CHECK(std::abs(q.omega_E_eff - 11.0) < 1e-12);
}

TEST_CASE("exact resonance splits symmetrically") {
    SystemConfig s;
    s.omega_g = 2.0;
    s.omega_e = 10.0;
    FieldConfig f;
    f.carrier = 8.0;  // dw = 0
    f.peak_rabi = 2.0;
    const DressedQuantities q = dressed_quantities(s, f, 0.0);
    CHECK(std::abs(q.lambda_plus - 1.0) < 1e-12);
    CHECK(std::abs(q.lambda_minus + 1.0) < 1e-12);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(q.cos_w - r) < 1e-12);
    CHECK(std::abs(q.sin_w - r) < 1e-12);  // sgn(0) := +1

    DressedOptions opt;
    opt.sign_at_zero_detuning = -1;
    const DressedQuantities qm = dressed_quantities(s, f, 0.0, {}, opt);
    CHECK(std::abs(qm.sin_w + r) < 1e-12);
}

TEST_CASE("weak field population weight against perturbation theory") {
    SystemConfig s;
    s.omega_g = 0.0;
    s.omega_e = 20.0;
    FieldConfig f;
    f.carrier = 10.0;  // dw = 10
    f.peak_rabi = 1.0;
    const DressedQuantities q = dressed_quantities(s, f, 0.0);
    // -L-/W' with W' = sqrt(101), in long double as the independent route
    const long double wr = std::sqrt(101.0L);
    const long double expected = (wr - 10.0L) / (2.0L * wr);
    CHECK(std::abs(std::norm(q.sin_w) - double(expected)) < 1e-12);
    CHECK(std::norm(q.sin_w) == doctest::Approx(0.0024814).epsilon(1e-4));
    // perturbative cross-check W^2/(4 dw^2) = 0.0025
    CHECK(std::norm(q.sin_w) == doctest::Approx(0.0025).epsilon(0.01));
}

TEST_CASE("weight algebra over randomized complex inputs") {
    int accepted = 0;
    while (accepted < 10000) {
        const Complex dtw = oracles::random_complex();
        const double rabi = std::abs(oracles::random_complex());
        const Complex d_dtw = oracles::random_complex();
        const Complex d_big = oracles::random_complex();
        const Complex rad = off_resonance_radicand(dtw, rabi, d_dtw);
        const Complex w = resolve_branch(rad, {});
        const double scale = std::max({std::abs(dtw), rabi, std::abs(w)});
        if (std::abs(w) < 1e-8 * scale) continue;  // spec-declared degenerate neighborhood
        ++accepted;
        const WeightFactors wf = weight_factors(dtw, w, d_big, 1.0);

        // L+ + L- = dtw', L+ - L- = W', both relative to the operand scale
        CHECK(std::abs(wf.lambda_plus + wf.lambda_minus - dtw) <= 1e-12 * scale);
        CHECK(std::abs(wf.lambda_plus - wf.lambda_minus - w) <= 1e-12 * scale);
        // COS^2 + SIN^2 = 1
        const Complex unit = wf.cos_w * wf.cos_w + wf.sin_w * wf.sin_w;
        const double weight_scale =
            std::max(1.0, std::max(std::norm(wf.cos_w), std::norm(wf.sin_w)));
        CHECK(std::abs(unit - 1.0) <= 1e-10 * weight_scale);
    }
}

TEST_CASE("quasi-energy sum rule") {
    for (int i = 0; i < 200; ++i) {
        SystemConfig s;
        s.omega_g = oracles::uniform(-5.0, 5.0);
        s.omega_e = s.omega_g + oracles::uniform(0.5, 10.0);
        s.gamma_re = oracles::uniform(0.0, 0.5);
        s.gamma_im = oracles::uniform(-0.5, 0.5);
        FieldConfig f;
        f.carrier = oracles::uniform(0.1, 10.0);
        f.peak_rabi = oracles::uniform(0.1, 5.0);
        const DressedQuantities q = dressed_quantities(s, f, oracles::uniform(-2.0, 2.0));
        const double scale = std::max(std::abs(q.omega_G), std::abs(q.omega_E));
        CHECK(std::abs(q.omega_G + q.omega_E - (s.omega_g + s.omega_e)) <= 1e-12 * scale);
    }
}

TEST_CASE("monochromatic reduction to the textbook statics") {
    SystemConfig s = sys345();
    FieldConfig f = field345();
    for (double t : {-3.0, 0.0, 1.7, 12.0}) {
        const DressedQuantities q = dressed_quantities(s, f, t);
        CHECK(std::abs(q.dtw - 3.0) <= 1e-12 * 3.0);
        CHECK(q.d_dtw == Complex(0.0, 0.0));
        CHECK(std::abs(q.big_omega - 5.0) <= 1e-12 * 5.0);
        CHECK(std::abs(q.lambda_tilde_plus - q.lambda_plus) <= 1e-12 * std::abs(q.lambda_plus));
        CHECK(std::abs(q.lambda_tilde_minus - q.lambda_minus) <= 1e-12 * std::abs(q.lambda_minus));
    }
}

TEST_CASE("branch tracking") {
    SUBCASE("constant inputs give the constant principal root") {
        std::vector<Complex> dtw_sq(50, Complex(9.0, 0.0));
        std::vector<double> rabi_sq(50, 16.0);
        std::vector<Complex> d_dtw(50, Complex(0.0, 0.0));
        const auto w = branch_track(dtw_sq, rabi_sq, d_dtw);
        for (Complex v : w) CHECK(std::abs(v - 5.0) < 1e-14);
    }
    SUBCASE("zero field, constant positive detuning") {
        std::vector<Complex> dtw_sq(20, Complex(4.0, 0.0));
        std::vector<double> rabi_sq(20, 0.0);
        std::vector<Complex> d_dtw(20, Complex(0.0, 0.0));
        const auto w = branch_track(dtw_sq, rabi_sq, d_dtw);
        for (Complex v : w) CHECK(v == Complex(2.0, 0.0));
    }
    SUBCASE("detuning sweep through zero stays continuous") {
        auto build = [](int n) {
            std::vector<Complex> dtw_sq(n);
            std::vector<double> rabi_sq(n, 16.0);
            std::vector<Complex> d_dtw(n, Complex(0.0, 0.0));
            for (int i = 0; i < n; ++i) {
                const double dtw = 3.0 - 6.0 * double(i) / double(n - 1);
                dtw_sq[i] = Complex(dtw * dtw, 0.0);
            }
            return std::tuple{dtw_sq, rabi_sq, d_dtw};
        };
        auto [dtw_sq, rabi_sq, d_dtw] = build(201);
        const auto w = branch_track(dtw_sq, rabi_sq, d_dtw);
        double min_mag = 1e300;
        double max_jump = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            min_mag = std::min(min_mag, std::abs(w[i]));
            if (i > 0) max_jump = std::max(max_jump, std::abs(w[i] - w[i - 1]));
        }
        CHECK(min_mag == doctest::Approx(4.0).epsilon(1e-12));
        // compare against a 10x denser reference for the continuity bound
        auto [d2, r2, dd2] = build(2001);
        const auto wref = branch_track(d2, r2, dd2);
        double ref_jump = 0.0;
        for (std::size_t i = 1; i < wref.size(); ++i)
            ref_jump = std::max(ref_jump, std::abs(wref[i] - wref[i - 1]));
        CHECK(max_jump < 15.0 * ref_jump);  // continuous: jumps scale with spacing
        CHECK(max_jump < 0.1);
    }
    SUBCASE("genuinely ambiguous series is reported") {
        // radicand flips sign hard between samples: sqrt jumps from 1 to ~i*10
        std::vector<Complex> radicand{Complex(1.0, 0.0), Complex(-100.0, 0.0)};
        CHECK_THROWS_AS(branch_track(radicand), BranchAmbiguityError);
    }
}

TEST_CASE("degenerate off-resonance frequency is refused") {
    CHECK_THROWS_AS(weight_factors(Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), 1.0),
                    DegeneratePointError);
}

TEST_CASE("envelope floor propagates as an undefined region") {
    SystemConfig s = sys345();
    FieldConfig f = field345();
    f.envelope_kind = EnvelopeKind::Gaussian;
    f.center = 0.0;
    f.width = 1.0;
    f.floor = 1e-3;
    CHECK_THROWS_AS(dressed_quantities(s, f, 5.0), UndefinedRegionError);
}

TEST_CASE("zero-intensity limit recovers the bare states") {
    SystemConfig s;
    s.omega_g = 1.0;
    s.omega_e = 11.0;
    s.phi_g = 0.4;
    s.phi_e = 2.2;
    FieldConfig f;
    f.carrier = 5.0;  // dw = 5
    f.peak_rabi = 5e-12;
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);

    const PsasComponents comps = psas_components(s, f, grid, InitialKind::Ground);
    const auto series = dressed_series(s, f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex expected = -kI * (s.phi_g + s.omega_g * grid[i]);
        CHECK(std::abs(comps.g_real[i] - expected) < 1e-9);
        CHECK(std::norm(series[i].sin_w) < 1e-20);
    }

    const AdiabaticStates states = assemble_psas(comps, series);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex expected = std::exp(-kI * (s.phi_g + s.omega_g * grid[i]));
        CHECK(std::abs(states.ground[i][0] - expected) < 1e-9);
        CHECK(std::abs(states.ground[i][1]) < 1e-9);
    }
}

TEST_CASE("material phase tracking at the component level") {
    SystemConfig s;
    s.omega_g = 1.0;
    s.omega_e = 6.8;
    s.gamma_re = 0.1;
    s.gamma_im = 0.05;
    s.phi_g = 0.8;
    s.phi_e = 1.9;
    FieldConfig f;
    f.carrier = 4.8;  // dw = 1
    f.envelope_kind = EnvelopeKind::Gaussian;
    f.peak_rabi = 1.0;
    f.center = 3.0;
    f.width = 2.0;
    f.phase_kind = PhaseKind::LinearChirp;
    f.chirp = 0.05;
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(0.1 * i);

    const PsasComponents base = psas_components(s, f, grid, InitialKind::Ground);

    SUBCASE("the excited-state phase never enters the ground-IC components") {
        for (double phi_e : {0.0, 1.0, 2.0, 3.0}) {
            SystemConfig swept = s;
            swept.phi_e = phi_e;
            const PsasComponents c = psas_components(swept, f, grid, InitialKind::Ground);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                CHECK(c.g_real[i] == base.g_real[i]);
                CHECK(c.g_virtual[i] == base.g_virtual[i]);
                CHECK(c.e_real[i] == base.e_real[i]);
                CHECK(c.e_virtual[i] == base.e_virtual[i]);
            }
        }
    }
    SUBCASE("shifting the ground-state phase factors out globally") {
        const double delta = 0.6;
        SystemConfig swept = s;
        swept.phi_g += delta;
        const PsasComponents c = psas_components(swept, f, grid, InitialKind::Ground);
        const Complex factor = std::exp(-kI * delta);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(std::exp(c.g_real[i]) - factor * std::exp(base.g_real[i])) < 1e-12);
            CHECK(std::abs(std::exp(c.g_virtual[i]) - factor * std::exp(base.g_virtual[i])) <
                  1e-12);
            CHECK(std::abs(std::exp(c.e_real[i]) - factor * std::exp(base.e_real[i])) < 1e-12);
            CHECK(std::abs(std::exp(c.e_virtual[i]) - factor * std::exp(base.e_virtual[i])) <
                  1e-12);
        }
    }
    SUBCASE("excited initial conditions mirror the roles") {
        const PsasComponents exc = psas_components(s, f, grid, InitialKind::Excited);
        SystemConfig swept = s;
        swept.phi_g = 2.9;  // must not matter now
        const PsasComponents c = psas_components(swept, f, grid, InitialKind::Excited);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c.g_real[i] == exc.g_real[i]);
    }
}

TEST_CASE("static off-resonant assembly populates 0.8 / 0.2") {
    std::vector<double> grid{0.0, 0.5, 1.0};
    const auto series = dressed_series(sys345(), field345(), grid);
    const auto comps = psas_components(sys345(), field345(), grid, InitialKind::Ground);
    const AdiabaticStates states = assemble_psas(comps, series);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::norm(states.ground[i][0]) == doctest::Approx(0.8).epsilon(1e-10));
        CHECK(std::norm(states.ground[i][1]) == doctest::Approx(0.2).epsilon(1e-10));
    }
}

TEST_CASE("phase integrals are anchored at t = 0 regardless of the grid start") {
    SystemConfig s;
    s.omega_g = 1.0;
    s.omega_e = 9.0;
    FieldConfig f;
    f.carrier = 6.0;
    f.envelope_kind = EnvelopeKind::Sech;
    f.peak_rabi = 1.5;
    f.center = 2.0;
    f.width = 3.0;
    std::vector<double> from_zero;
    for (int i = 0; i <= 40; ++i) from_zero.push_back(0.05 * i);  // [0, 2]
    std::vector<double> from_one;
    for (int i = 0; i <= 20; ++i) from_one.push_back(1.0 + 0.05 * i);  // [1, 2]

    const PsasComponents a = psas_components(s, f, from_zero, InitialKind::Ground);
    const PsasComponents b = psas_components(s, f, from_one, InitialKind::Ground);
    // t = 2 exponents agree although grid b never saw [0, 1)
    CHECK(std::abs(a.g_real.back() - b.g_real.back()) < 1e-9);
    CHECK(std::abs(a.e_real.back() - b.e_real.back()) < 1e-9);
}

TEST_CASE("grid misalignment is rejected") {
    std::vector<double> grid{0.0, 0.5, 1.0};
    const auto series = dressed_series(sys345(), field345(), grid);
    auto comps = psas_components(sys345(), field345(), grid, InitialKind::Ground);
    comps.times[1] += 1e-9;
    CHECK_THROWS_AS(assemble_psas(comps, series), ConfigError);
}

TEST_CASE("adiabatic gaussian turn-on: the exact state tracks the ground dressed state") {
    // dw = 10 W0, pulse wide against 1/dw; start in the assembled |G(0)>
    SystemConfig s;
    s.omega_g = 0.0;
    s.omega_e = 100.0;
    FieldConfig f;
    f.carrier = 90.0;  // dw = 10
    f.envelope_kind = EnvelopeKind::Gaussian;
    f.peak_rabi = 1.0;
    f.width = 600.0;
    f.center = 900.0;  // window [0, 900] spans x in [-1.5, 0]
    std::vector<double> grid;
    const int n = 600;
    for (int i = 0; i <= n; ++i) grid.push_back(900.0 * double(i) / n);

    const auto series = dressed_series(s, f, grid);
    const auto comps = psas_components(s, f, grid, InitialKind::Ground);
    const AdiabaticStates dressed = assemble_psas(comps, series);

    // exact propagation seeded with |G(0)> expressed as bare amplitudes
    const State2 g0 = dressed.ground.front();
    Complex a = g0[0] * std::exp(kI * s.phi_g);
    Complex b = g0[1] * std::exp(kI * s.phi_e);
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    a /= norm;
    b /= norm;
    const Trajectory traj = propagate(s, f, initial_state(s, StateSpec::superposition(a, b)),
                                      {0.0, 900.0}, 1e-11, grid);

    const AdiabaticityReport report = adiabaticity_report(s, f, grid, 2, 0.1);
    CHECK(report.pass);
    double min_fid = 1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const State2 exact = lab_coefficients(traj.states[i]);
        const Complex overlap = exact.dot(dressed.ground[i]);
        const double fid =
            std::norm(overlap) / (exact.squaredNorm() * dressed.ground[i].squaredNorm());
        min_fid = std::min(min_fid, fid);
    }
    // infidelity bounded by the margin report with a fixture constant of one
    CHECK(1.0 - min_fid <= report.max_ratio * report.max_ratio);
    CHECK(min_fid >= 0.999);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "stochcl/entropy.hpp"
#include "stochcl/experiments.hpp"
#include "stochcl/initial_data.hpp"

using namespace stochcl;

TEST_CASE("S_delta: convex, S(0) = 0, |S'| <= 1, |s| - delta gap outside the window") {
    const EntropyPair e = EntropyPair::s_delta(0.2, FluxFn::burgers_clipped(2.0));
    CHECK(e.S(0.0) == 0.0);
    for (double s = -1.0; s <= 1.0; s += 0.01) {
        CHECK(e.d2S(s) >= 0.0);
        CHECK(std::abs(e.dS(s)) <= 1.0 + 1e-12);
        const double h = 1e-6;
        CHECK(e.dS(s) == doctest::Approx((e.S(s + h) - e.S(s - h)) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
    CHECK(e.S(0.7) == doctest::Approx(0.7 - 0.2 * SdeltaProfile::gap()).epsilon(1e-12));
    CHECK(e.S(-0.7) == doctest::Approx(e.S(0.7)));
}

TEST_CASE("entropy flux: fast form matches quadrature; |Q| <= Lip S Lip f |u - c|") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-3, 3);
    for (const auto& fk : {"burgers:2", "sin:1", "linear:1"}) {
        const FluxFn f = FluxFn::parse(fk);
        const EntropyPair e = EntropyPair::s_delta(0.1, f);
        for (int i = 0; i < 300; ++i) {
            const double u = U(rng), c = U(rng);
            const double q = e.q_flux(u, c);
            CHECK(std::abs(e.q_fast(u, c) - q) <= 5e-9);
            CHECK(std::abs(q) <= e.lip() * f.lip_norm() * std::abs(u - c) + 1e-12);
        }
    }
}

TEST_CASE("entropy flux for linear f is a S(u - c)") {
    const FluxFn f = FluxFn::linear(1.5);
    const EntropyPair e = EntropyPair::s_delta(0.3, f);
    for (double u : {-1.0, 0.1, 0.25, 2.0})
        for (double c : {-0.5, 0.0, 0.2}) CHECK(e.q_flux(u, c) == doctest::Approx(1.5 * e.S(u - c)).epsilon(1e-12));
    const EntropyPair r = EntropyPair::s_R(1.0, 2.0, f);
    CHECK(r.S(0.5) == doctest::Approx(0.25));
    CHECK(r.q_flux(0.5, 0.0) == doctest::Approx(1.5 * r.S(0.5)).epsilon(1e-12));
}

TEST_CASE("entropy keys and test functions") {
    const FluxFn f = FluxFn::burgers_clipped(2.0);
    CHECK(EntropyPair::parse("s_delta:0.05", f).delta() == doctest::Approx(0.05));
    CHECK(EntropyPair::parse("linear", f).S(0.4) == doctest::Approx(0.4));
    CHECK_THROWS(EntropyPair::parse("kruzkov", f));
    const Grid g(256, 10.0);
    CHECK_THROWS(TestFunction::bump(g, 9.5, 1.0, 1.0, 0.5));
    const TestFunction t = TestFunction::bump(g, 0.0, 2.0, 1.0, 0.4);
    CHECK(t.theta(0.0) == doctest::Approx(1.0));
    CHECK(t.theta(0.4) == doctest::Approx(0.0));
    CHECK(t.hi > t.lo);
}

TEST_CASE("deterministic heat flow: no noise terms and residual above -tol") {
    SolverConfig c;
    c.grid = Grid(256, 10.0);
    c.n_steps = 1000;
    c.flux = FluxFn::zero();
    c.sigma = SigmaCoeff::none(4);
    const GridField u0 = make_initial("bump:1:1", c.grid);
    EntropyRunOptions o;
    o.n_mc = 1;
    std::vector<EntropyTrial> trials;
    for (double c0 : {-0.2, 0.3, 0.6})
        trials.push_back({EntropyPair::s_delta(0.05, c.flux), TestFunction::bump(c.grid, 0.3, 2.0, 1.0, 0.2),
                          SmoothRV::constant(c0)});
    const auto res = entropy_residuals(c, u0, trials, o);
    const ToleranceBudget b = entropy_tolerance();
    for (const auto& r : res) {
        CHECK(r.residual.mean >= -b(c.grid.dx(), c.dt, r.residual.se, c.eps));
        CHECK(r.malliavin.mean == 0.0);
    }
}

TEST_CASE("frozen entropy tolerance covers a fresh calibration run") {
    // Linear flux, S(s) = s: the weak form is an identity, so every residual is discretisation error.
    const EntropyCalibration cal = calibrate_entropy_tolerance(256, 7);
    const ToleranceBudget b = entropy_tolerance();
    CHECK(cal.c1 <= b.c1);
    CHECK(cal.c2 <= b.c2);
    CHECK(cal.c3 <= b.c3);
    // The residual shrinks at first order under refinement.
    const EntropyCalibration fine = calibrate_entropy_tolerance(512, 7);
    CHECK(fine.max_residual < 0.6 * cal.max_residual);
}

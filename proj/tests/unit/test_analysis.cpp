#include <cmath>

#include "doctest.h"
#include "stochcl/analysis.hpp"
#include "stochcl/initial_data.hpp"
#include "stochcl/quadrature.hpp"

using namespace stochcl;

namespace {

SolverConfig cfg_of(const std::string& flux, const std::string& sigma, double T, std::size_t n = 256) {
    SolverConfig c;
    c.grid = Grid(n, 10.0);
    c.n_steps = static_cast<std::size_t>(std::llround(T / c.dt));
    c.flux = FluxFn::parse(flux);
    c.sigma = SigmaCoeff::parse(sigma, c.noise);
    c.validate();
    return c;
}

}  // namespace

TEST_CASE("Lax-Friedrichs numerical viscosity and frozen budgets") {
    const SolverConfig c = cfg_of("burgers:2", "none", 0.1);
    CHECK(numerical_viscosity(c) == doctest::Approx(2.0 * c.grid.dx() / 2.0));
    CHECK(numerical_viscosity(c) == doctest::Approx(0.078125));
    const ContractionBudget b = contraction_tolerance();
    CHECK(b(0.1, 1e-3, 0.5, 0.01) == doctest::Approx(0.03));
    CHECK(coupled_delta(0.25, 0.5) == doctest::Approx(0.125));
    const double a = c.weight.c_phi() * 2.0 * c.T();
    CHECK(frac_bv_constant(c) == doctest::Approx(1.0 + a * std::exp(a)));
}

TEST_CASE("BV modulus: zero for constants, matches a direct double integral for smooth data") {
    const Grid g(512, 10.0);
    const Weight w = Weight::exp(1.0);
    const auto phi = w.sample(g);
    CHECK(bv_modulus(std::vector<double>(g.n, 0.3), phi, g.dx(), 0.4) == doctest::Approx(0.0).scale(1.0));
    const std::string key = "sine:0.5:2";
    const auto u = make_initial(key, g).values;
    for (double r : {0.2, 0.8}) {
        const Mollifier J(r);
        double ref = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            auto f = [&](double z) {
                return std::abs(initial_value(key, x + z, 10.0) - initial_value(key, x - z, 10.0)) * J(z);
            };
            ref += phi[i] * g.dx() * adaptive_simpson(f, -r, r, 1e-10).value;
        }
        CHECK(bv_modulus(u, phi, g.dx(), r) == doctest::Approx(ref).epsilon(0.02));
    }
    CHECK_THROWS(bv_modulus(u, phi, g.dx(), g.dx()));
}

TEST_CASE("BV modulus of a step is O(r) and stays O(r) without noise") {
    const SolverConfig c = cfg_of("burgers:2", "none", 0.1);
    const GridField u0 = make_initial("step:1:-2:1", c.grid);
    const auto f = fractional_bv_study(c, u0, {0.2, 0.4, 0.8}, 1, 1);
    for (std::size_t q = 0; q + 1 < 3; ++q) {
        CHECK(f.initial[q + 1].mean / f.initial[q].mean == doctest::Approx(2.0).epsilon(0.15));
        CHECK(f.final[q].mean <= f.C * f.initial[q].mean);
    }
}

TEST_CASE("doubling parameters are validated") {
    const SolverConfig c = cfg_of("burgers:2", "none", 0.1);
    DoublingParams p;
    CHECK_NOTHROW(p.validate(c));
    DoublingParams a = p;
    a.t0_steps = 4;
    CHECK_THROWS(a.validate(c));
    DoublingParams b = p;
    b.r = c.grid.dx();
    CHECK_THROWS(b.validate(c));
    DoublingParams d = p;
    d.t0_steps = c.n_steps;
    CHECK_THROWS(d.validate(c));
    DoublingParams e = p;
    e.delta = 0.0;
    CHECK_THROWS(e.validate(c));
}

TEST_CASE("Kato: deterministic Riemann data satisfy the L1 comparison") {
    const SolverConfig c = cfg_of("burgers:2", "none", 0.1);
    const GridField u0 = make_initial("step:1:-2:1", c.grid), v0 = make_initial("step:0.5:-1:2", c.grid);
    const auto psi = TestFunction::bump(c.grid, 0.0, 4.0, 1.0, 1.0);
    const auto k = kato_check(c, u0, v0, psi, c.n_steps, 1, 1);
    CHECK(k.pass());
    CHECK(k.path_hash_u == k.path_hash_v);
}

TEST_CASE("Kato: on a plateau away from the data the flux term vanishes") {
    const SolverConfig c = cfg_of("burgers:2", "mult_sin:0.5", 0.05);
    const GridField u0 = make_initial("bump:1:0.5", c.grid), v0 = make_initial("bump:0.5:0.5", c.grid);
    const auto psi = TestFunction::plateau(c.grid, 0.0, 8.0, 1.0);
    const auto k = kato_check(c, u0, v0, psi, c.n_steps, 20, 3);
    CHECK(std::abs(k.flux.mean) <= 1e-6);
    CHECK(k.lhs.mean <= k.initial.mean + k.tol);
}

TEST_CASE("contraction: sigma = 0 flat L1 never grows; coupled noisy paths stay within budget") {
    const SolverConfig c = cfg_of("burgers:2", "mult_sin:0.5", 0.1);
    const GridField u0 = make_initial("bump:1:1", c.grid), v0 = make_initial("bump:0.5:1.5", c.grid);
    const auto curve = l1_contraction_curve(c, u0, v0, 20, 1, snapshot_schedule(c.n_steps, 10));
    CHECK(curve.path_hash_u == curve.path_hash_v);
    CHECK(curve.nonincreasing());
    CHECK(curve.t.size() == 11);
}

TEST_CASE("epsilon study shares paths and decreases for Burgers") {
    const SolverConfig c = cfg_of("burgers:2", "mult_sin:0.5", 0.1);
    const GridField u0 = make_initial("bump:1:1", c.grid);
    const auto s = epsilon_convergence_study(c, {0.2, 0.1, 0.05}, u0, 10, 1);
    CHECK(s.consecutive.size() == 2);
    CHECK(s.consecutive[0].mean > s.consecutive[1].mean);
}

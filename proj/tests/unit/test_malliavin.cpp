#include <cmath>
#include <random>

#include "doctest.h"
#include "stochcl/heat_kernel.hpp"
#include "stochcl/initial_data.hpp"
#include "stochcl/malliavin.hpp"

using namespace stochcl;

namespace {

SolverConfig cfg_of(const std::string& flux, const std::string& sigma, std::size_t n, double T) {
    SolverConfig c;
    c.grid = Grid(n, 10.0);
    c.dt = 2e-4;
    c.n_steps = static_cast<std::size_t>(std::llround(T / c.dt));
    c.flux = FluxFn::parse(flux);
    c.sigma = SigmaCoeff::parse(sigma, c.noise);
    c.validate();
    return c;
}

}  // namespace

TEST_CASE("tangent: zero before r, sigma(u(r)) at r") {
    const SolverConfig c = cfg_of("burgers:2", "mult_sin:0.5", 128, 0.02);
    const Stepper st(c);
    const GridField u0 = make_initial("bump:1:1", c.grid);
    const NoisePath p = mc_path(c, 1, 0);
    const Trajectory base = solve_full(st, u0, &p, c.n_steps);
    const TangentField w = solve_tangent(st, base, p, 30, 2, c.n_steps);
    for (double v : w.at_step(10)) CHECK(v == 0.0);
    const auto wr = w.at_step(30);
    const auto& ur = base.at_step(30);
    for (std::size_t i = 0; i < c.grid.n; ++i) CHECK(wr[i] == doctest::Approx(st.sigma_at(i, ur[i], 2)));
}

TEST_CASE("tangent vs finite differences on nonlinear families") {
    for (auto [flux, sigma] : {std::pair{"burgers:2", "mult_sin:0.5"}, {"sin:1", "mod_rational:0.5"}}) {
        const SolverConfig c = cfg_of(flux, sigma, 256, 0.1);
        const Stepper st(c);
        const GridField u0 = make_initial("bump:1:1", c.grid);
        const NoisePath p = mc_path(c, 4, 0);
        const Trajectory base = solve_full(st, u0, &p, c.n_steps);
        for (std::size_t k : {0u, 3u}) {
            const auto w = solve_tangent(st, base, p, 100, k, c.n_steps).at_step(c.n_steps);
            const auto fd = fd_malliavin_oracle(st, u0, p, 100, k, default_fd_step(c, k), c.n_steps, true);
            CHECK(relative_l2_phi(w, fd, st) <= 0.05);
        }
    }
}

TEST_CASE("tangent: additive sigma with linear flux is the deterministic evolution of the profile") {
    const SolverConfig c = cfg_of("linear:1", "mod_one:0.5", 128, 0.05);
    const Stepper st(c);
    const GridField u0 = make_initial("bump:1:1", c.grid);
    const NoisePath p = mc_path(c, 2, 0);
    const Trajectory base = solve_full(st, u0, &p, c.n_steps);
    const std::size_t r = 50, k = 1;
    const auto w = solve_tangent(st, base, p, r, k, c.n_steps).at_step(c.n_steps);
    // Phi(dt) sigma_k, then the noise-free linear scheme for the remaining steps.
    std::vector<double> v(c.grid.n);
    for (std::size_t i = 0; i < c.grid.n; ++i) v[i] = c.sigma(c.grid.x(i), 0.0, k);
    st.heat().apply(v.data(), v.data(), c.eps * c.dt);
    for (std::size_t n = r + 1; n < c.n_steps; ++n) st.step(v, nullptr);
    for (std::size_t i = 0; i < c.grid.n; ++i) CHECK(w[i] == doctest::Approx(v[i]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("tangent: constant data with f = 0 follows the scalar geometric recursion") {
    const SolverConfig c = cfg_of("zero", "mult_sin:0.5", 64, 0.05);
    const Stepper st(c);
    const GridField u0(c.grid, 0.7);
    const NoisePath p = mc_path(c, 8, 0);
    const Trajectory base = solve_full(st, u0, &p, c.n_steps);
    const std::size_t r = 20, k = 2;
    const auto& g = c.sigma.amplitudes();
    // u_{n+1} = u_n + sum_j g_j sin(u_n) dW_{n,j}; w_r = g_k sin(u_r); w_{n+1} = w_n (1 + sum_j g_j cos(u_n) dW_{n,j}).
    double u = 0.7, w = 0.0;
    for (std::size_t n = 0; n < c.n_steps; ++n) {
        if (n == r) w = g[k] * std::sin(u);
        double s = 0.0, ds = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            s += g[j] * std::sin(u) * p(n, j);
            ds += g[j] * std::cos(u) * p(n, j);
        }
        if (n > r) w *= (1.0 + ds);
        u += s;
    }
    CHECK(base.fields.back()[5] == doctest::Approx(u).epsilon(1e-12));
    const auto wt = solve_tangent(st, base, p, r, k, c.n_steps).at_step(c.n_steps);
    for (double v : wt) CHECK(v == doctest::Approx(w).epsilon(1e-10));
    const auto fd = fd_malliavin_oracle(st, u0, p, r, k, default_fd_step(c, k), c.n_steps, true);
    CHECK(fd[3] == doctest::Approx(w).epsilon(1e-5));
}

TEST_CASE("smooth random variables: chain rule and finite differences") {
    const std::size_t N = 10, m = 2;
    std::vector<double> h(N * m);
    for (std::size_t c = 0; c < h.size(); ++c) h[c] = std::cos(0.3 * c);
    const SmoothRV V = SmoothRV::composed([](double w) { return std::tanh(w); },
                                          [](double w) { return 1.0 - std::tanh(w) * std::tanh(w); }, h, N, m);
    const NoisePath p = sample_path(NoiseSpace::uniform(m), 0.1, N, 3, 0);
    const auto e = V.evaluate(p);
    for (std::size_t n : {0u, 4u, 9u})
        for (std::size_t k : {0u, 1u}) {
            const double eta = 1e-6;
            const double fd = (V.evaluate(shift_path(p, n, k, eta)).value - V.evaluate(shift_path(p, n, k, -eta)).value) / (2 * eta);
            CHECK(V.derivative(e, n, k) == doctest::Approx(fd).epsilon(1e-6));
        }
    CHECK(SmoothRV::constant(2.0).evaluate(p).value == 2.0);
    CHECK(V.derivative(e, 12, 0) == 0.0);
}

TEST_CASE("integration by parts: E[V W(h)] = E<DV, h>_H within 3 SE") {
    const std::size_t N = 8, m = 2, n_mc = 100000;
    const NoiseSpace sp = NoiseSpace::uniform(m);
    const double dt = 0.125;
    std::vector<double> g(N * m), h(N * m);
    for (std::size_t c = 0; c < g.size(); ++c) {
        g[c] = 1.0 + 0.1 * c;
        h[c] = std::sin(0.7 * c);
    }
    const SmoothRV V = SmoothRV::composed([](double w) { return std::sin(w); }, [](double w) { return std::cos(w); }, g, N, m);
    const SmoothRV Wh = SmoothRV::linear(h, N, m);
    std::vector<double> diff(n_mc);
    for (std::size_t s = 0; s < n_mc; ++s) {
        const NoisePath p = sample_path(sp, dt, N, 99, s);
        const auto e = V.evaluate(p);
        diff[s] = e.value * Wh.evaluate(p).value - h_inner(V.derivative_field(e), h, dt, sp);
    }
    const Estimate est = estimate(diff);
    CHECK(std::abs(est.mean) <= 3.0 * est.se);
}

TEST_CASE("shifted mollifier weights") {
    for (std::size_t r0 : {1u, 2u, 4u, 8u}) {
        const auto w = shifted_mollifier_weights(r0);
        CHECK(w.size() == 2 * r0 + 1);
        double s = 0.0;
        for (double v : w) {
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(w.front() == 0.0);
        CHECK(w.back() == 0.0);
    }
    CHECK_THROWS(shifted_mollifier_weights(0));
}

TEST_CASE("weak continuity: x-modulated additive noise without flux has a closed form decaying like r0") {
    const SolverConfig c = cfg_of("zero", "mod_one:0.5", 128, 0.02);
    WeakContinuityOptions o;
    o.r_index = 20;
    o.n_mc = 2;
    o.n_bound = 0;
    o.weight = Weight::exp(2.0);
    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> psi(c.grid.n);
        for (std::size_t i = 0; i < c.grid.n; ++i) psi[i] = std::exp(-0.5 * (c.grid.x(i) - 1.0) * (c.grid.x(i) - 1.0));
        o.psi.push_back(psi);
    }
    const GridField u0 = make_initial("bump:1:1", c.grid);
    const auto res = weak_time_continuity_stat(c, u0, o);
    const auto phi = o.weight.sample(c.grid);
    std::vector<double> closed;
    for (std::size_t r0 : o.r0_steps) {
        const auto om = shifted_mollifier_weights(r0);
        double t = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            GridField sk(c.grid);
            for (std::size_t i = 0; i < c.grid.n; ++i) sk[i] = c.sigma(c.grid.x(i), 0.0, k);
            for (std::size_t j = 0; j < om.size(); ++j) {
                KernelParams kp;
                kp.eps = c.eps;
                kp.t = j * c.dt;
                const GridField h = heat_convolve(sk, kp);
                double s = 0.0;
                for (std::size_t i = 0; i < c.grid.n; ++i) s += (h[i] - sk[i]) * o.psi[k][i] * phi[i] * c.grid.dx();
                t += c.noise.mu[k] * om[j] * s;
            }
        }
        closed.push_back(t);
    }
    for (std::size_t q = 0; q < closed.size(); ++q) CHECK(res.stat[q].mean == doctest::Approx(closed[q]).epsilon(1e-8));
    CHECK(closed[0] / closed[1] == doctest::Approx(2.0).epsilon(0.05));
    CHECK(closed[1] / closed[2] == doctest::Approx(2.0).epsilon(0.05));
}

#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "stochcl/flux.hpp"
#include "stochcl/initial_data.hpp"
#include "stochcl/noise.hpp"

using namespace stochcl;

TEST_CASE("noise space invariants") {
    const NoiseSpace s = NoiseSpace::uniform(4);
    CHECK(s.m() == 4);
    CHECK(s.total_mass() == doctest::Approx(1.0));
    for (double m : s.mu) CHECK(m > 0.0);
    CHECK_THROWS(NoiseSpace::uniform(0));
    NoiseSpace bad{{0.5, -0.1}};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("increments have variance dt mu_k within 3 SE") {
    const NoiseSpace s{{0.1, 0.2, 0.3, 0.4}};
    const double dt = 1e-3;
    const std::size_t n = 100000;
    const NoisePath p = sample_path(s, dt, n, 17, 0);
    for (std::size_t k = 0; k < s.m(); ++k) {
        double s2 = 0.0, s4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = p(i, k) * p(i, k);
            s2 += v;
            s4 += v * v;
        }
        const double var = s2 / n, se = std::sqrt((s4 / n - var * var) / n);
        CHECK(std::abs(var - dt * s.mu[k]) <= 3.0 * se);
    }
}

TEST_CASE("distinct streams are uncorrelated within 3 SE") {
    const NoiseSpace s = NoiseSpace::uniform(1);
    const std::size_t n = 100000;
    const NoisePath a = sample_path(s, 1.0, n, 5, 0), b = sample_path(s, 1.0, n, 5, 1);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += a(i, 0) * b(i, 0);
        sxx += a(i, 0) * a(i, 0);
        syy += b(i, 0) * b(i, 0);
    }
    const double rho = sxy / std::sqrt(sxx * syy);
    CHECK(std::abs(rho) <= 3.0 / std::sqrt(double(n)));
}

TEST_CASE("paths are reproducible by (seed, stream) and hashes detect changes") {
    const NoiseSpace s = NoiseSpace::uniform(4);
    const NoisePath a = sample_path(s, 2e-4, 100, 1, 7), b = sample_path(s, 2e-4, 100, 1, 7);
    CHECK(a.increments == b.increments);
    CHECK(a.hash() == b.hash());
    const NoisePath c = shift_path(a, 10, 2, 1e-3);
    CHECK(c.hash() != a.hash());
    CHECK(c(10, 2) == doctest::Approx(a(10, 2) + 1e-3));
    CHECK(c(10, 1) == a(10, 1));
    CHECK(derive_stream_seed(1, 0) != derive_stream_seed(1, 1));
}

TEST_CASE("path files round-trip") {
    const NoisePath a = sample_path(NoiseSpace::uniform(3), 1e-3, 50, 4, 2);
    const std::string f = "test_path_roundtrip.bin";
    write_path(a, f);
    const NoisePath b = read_path(f);
    std::remove(f.c_str());
    CHECK(b.increments == a.increments);
    CHECK(b.hash() == a.hash());
    CHECK(b.dt == a.dt);
}

TEST_CASE("sigma: node profile normalisation and built-in envelopes") {
    const NoiseSpace s = NoiseSpace::uniform(4);
    const auto g = SigmaCoeff::node_profile(0.5, 4);
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) sum += s.mu[k] * g[k] * g[k];
    CHECK(sum == doctest::Approx(0.25).epsilon(1e-14));
    for (const auto& key : {"none", "additive:0.5", "mult_sin:0.5", "mult_rational:0.5", "mod_one:0.5", "mod_sin:0.5",
                            "mod_rational:0.5"}) {
        CAPTURE(key);
        const SigmaCoeff c = SigmaCoeff::parse(key, s);
        CHECK_NOTHROW(c.check_envelopes(10.0));
        // Independent Lipschitz sweep against M(z_k).
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> X(-10, 10), U(-5, 5);
        for (int i = 0; i < 1000; ++i) {
            const std::size_t k = i % 4;
            const double x = X(rng), u = U(rng), v = U(rng);
            CHECK(std::abs(c(x, u, k) - c(x, v, k)) <= c.M()[k] * std::abs(u - v) + 1e-12);
        }
        const double h = 1e-6;
        CHECK(c.du(0.3, 0.7, 1) == doctest::Approx((c(0.3, 0.7 + h, 1) - c(0.3, 0.7 - h, 1)) / (2 * h)).epsilon(1e-6));
    }
    CHECK_THROWS(SigmaCoeff::parse("mult_cos:1", s));
    CHECK(SigmaCoeff::parse("mod_sin:0.5", s).x_dependent());
    CHECK_FALSE(SigmaCoeff::parse("mult_sin:0.5", s).x_dependent());
}

TEST_CASE("HS norm of constant sigma is ||M|| ||phi||_1^{1/2}; G is Lipschitz") {
    const NoiseSpace s = NoiseSpace::uniform(4);
    const Grid grid(256, 10.0);
    const Weight w = Weight::exp(2.0);
    const SigmaCoeff add = SigmaCoeff::parse("additive:0.5", s);
    GridField u(grid);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N(0, 1);
    for (auto& v : u.values) v = N(rng);
    double phi1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) phi1 += w(grid.x(i)) * grid.dx();
    for (std::size_t k = 0; k < 4; ++k) m2 += s.mu[k] * add.amplitudes()[k] * add.amplitudes()[k];
    CHECK(hs_norm_G(add, s, u, w) == doctest::Approx(std::sqrt(m2 * phi1)).epsilon(1e-12));

    const SigmaCoeff mul = SigmaCoeff::parse("mult_sin:0.5", s);
    const auto phi = w.sample(grid);
    for (int t = 0; t < 20; ++t) {
        GridField a(grid), b(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            a[i] = N(rng);
            b[i] = N(rng);
        }
        double d2 = 0.0, mm = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]) * phi[i] * grid.dx();
        for (std::size_t k = 0; k < 4; ++k) mm += s.mu[k] * mul.M()[k] * mul.M()[k];
        CHECK(hs_distance_G(mul, s, a, b, w) <= std::sqrt(mm) * std::sqrt(d2) * (1 + 1e-12));
    }
}

TEST_CASE("flux invariants: f(0) = 0, |f'| <= Lip, derivative consistent") {
    for (const auto& key : {"linear:1", "burgers:2", "sin:1", "zero"}) {
        CAPTURE(key);
        const FluxFn f = FluxFn::parse(key);
        CHECK(f(0.0) == 0.0);
        for (double u = -6.0; u <= 6.0; u += 0.013) {
            CHECK(std::abs(f.derivative(u)) <= f.lip_norm() + 1e-14);
            const double h = 1e-6;
            CHECK(f.derivative(u) == doctest::Approx((f(u + h) - f(u - h)) / (2 * h)).epsilon(1e-5).scale(1.0));
        }
    }
    const FluxFn b = FluxFn::burgers_clipped(2.0);
    CHECK(b(1.5) == doctest::Approx(1.125));
    CHECK(b(3.0) == doctest::Approx(2.0 + 2.0 * 1.0));
    CHECK(flux_lip_distance(FluxFn::linear(1.0), FluxFn::linear(1.5)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS(FluxFn::parse("cubic:1"));
}

TEST_CASE("initial data keys") {
    const Grid g(256, 10.0);
    const GridField b = make_initial("bump:1:1", g);
    CHECK(b[g.origin()] == doctest::Approx(1.0));
    CHECK(make_initial("const:0.2", g)[7] == doctest::Approx(0.2));
    const GridField s = make_initial("step:1:-1:2", g);
    CHECK(s[g.origin()] == 1.0);
    CHECK(s[0] == 0.0);
    CHECK(initial_value("sine:0.5:2", 2.5, 10.0) == doctest::Approx(0.5 * std::sin(M_PI * 2.0 * 2.5 / 10.0)));
    CHECK(make_initial("zero", g)[3] == 0.0);
    CHECK_THROWS(make_initial("triangle:1", g));
}

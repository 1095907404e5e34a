#include <cmath>
#include <random>

#include "doctest.h"
#include "stochcl/quadrature.hpp"
#include "stochcl/weights.hpp"

using namespace stochcl;

TEST_CASE("mollifier: nonnegative, even, unit mass, shifted support in (0, 2r)") {
    for (double r : {0.1, 0.5, 2.0}) {
        const Mollifier J(r), Jp(r, true);
        const auto mass = adaptive_simpson([&](double x) { return J(x); }, -r, r, 1e-12).value;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
        const auto mass_p = adaptive_simpson([&](double x) { return Jp(x); }, 0.0, 2 * r, 1e-12).value;
        CHECK(mass_p == doctest::Approx(1.0).epsilon(1e-8));
        for (double x : {0.0, 0.3 * r, 0.7 * r, 0.99 * r}) {
            CHECK(J(x) >= 0.0);
            CHECK(J(x) == doctest::Approx(J(-x)));
        }
        CHECK(J(1.01 * r) == 0.0);
        CHECK(Jp(-1e-9) == 0.0);
        CHECK(Jp(2 * r + 1e-9) == 0.0);
    }
}

TEST_CASE("weights: |phi'| <= c_phi phi on random points") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> X(-40.0, 40.0);
    for (const auto& key : {"poly:1", "poly:3", "exp:0.5", "exp:2", "moll:exp:2:0.5", "moll:poly:2:0.3"}) {
        const Weight w = Weight::parse(key);
        CAPTURE(key);
        for (int i = 0; i < 1000; ++i) {
            const double x = X(rng);
            CHECK(std::abs(w.derivative(x)) <= w.c_phi() * w(x) * (1.0 + 1e-10));
        }
    }
    CHECK(Weight::poly(3).c_phi() == 6.0);
}

TEST_CASE("weights: derivatives match finite differences") {
    for (const auto& key : {"poly:2", "exp:1.5", "moll:exp:2:0.5"}) {
        const Weight w = Weight::parse(key);
        for (double x : {-3.1, -0.4, 0.0, 0.7, 5.0}) {
            const double h = 1e-5;
            CHECK(w.derivative(x) == doctest::Approx((w(x + h) - w(x - h)) / (2 * h)).epsilon(1e-6));
            CHECK(w.second_derivative(x) ==
                  doctest::Approx((w.derivative(x + h) - w.derivative(x - h)) / (2 * h)).epsilon(1e-5));
        }
    }
}

TEST_CASE("weighted norm of u = 1 with poly:1 recovers pi with the tail") {
    const Grid g(4096, 10.0);
    const GridField one(g, 1.0);
    for (double p : {1.0, 2.0, 3.0}) {
        const auto rep = weighted_lp_norm_report(one, p, Weight::poly(1));
        CHECK(std::pow(rep.value, p) + rep.tail_mass == doctest::Approx(M_PI).epsilon(1e-6));
        CHECK(rep.tail_mass == doctest::Approx(M_PI - 2.0 * std::atan(10.0)).epsilon(1e-8));
    }
}

TEST_CASE("weighted norms are nested: ||u||_p <= ||u||_q ||phi||_1^{1/p - 1/q}") {
    const Grid g(512, 10.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 1.0);
    const Weight w = Weight::exp(1.0);
    const auto phi = w.sample(g);
    double l1 = 0.0;
    for (double v : phi) l1 += v * g.dx();
    for (int t = 0; t < 50; ++t) {
        std::vector<double> u(g.n);
        for (auto& v : u) v = N(rng);
        for (auto [p, q] : {std::pair{1.0, 2.0}, {2.0, 4.0}, {1.5, 3.0}}) {
            const double lhs = weighted_lp_norm(u, p, phi, g.dx());
            const double rhs = weighted_lp_norm(u, q, phi, g.dx()) * std::pow(l1, 1.0 / p - 1.0 / q);
            CHECK(lhs <= rhs * (1 + 1e-12));
        }
    }
}

TEST_CASE("weighted sup norm of a compactly supported field is finite") {
    const Grid g(256, 10.0);
    GridField h(g);
    for (std::size_t i = 0; i < g.n; ++i) h[i] = std::abs(g.x(i)) < 1.0 ? 1.0 - std::abs(g.x(i)) : 0.0;
    CHECK(std::isfinite(weighted_linf_norm(h, Weight::exp(2.0))));
}

TEST_CASE("shift modulus: closed form and the weight-shift inequality") {
    CHECK(modulus_w(2.0, 2.0, 1.0) == doctest::Approx(1.0 + std::exp(1.0)).epsilon(1e-14));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> X(-8.0, 8.0), Z(-2.0, 2.0);
    for (const auto& key : {"poly:2", "exp:2"}) {
        const Weight w = Weight::parse(key);
        for (double p : {1.0, 2.0, 4.0})
            for (int i = 0; i < 500; ++i) {
                const double x = X(rng), z = Z(rng);
                const double a = std::pow(w(x + z), 1.0 / p), b = std::pow(w(x), 1.0 / p);
                CHECK(std::abs(a - b) <= modulus_w(p, w, std::abs(z)) * b * (1 + 1e-12));
            }
    }
}

TEST_CASE("mollified weight: Laplacian bound at grid points") {
    const Weight base = Weight::exp(2.0);
    for (double delta : {0.25, 0.5, 1.0}) {
        const Weight wd = mollify_weight(base, delta);
        const double c = base.c_phi();
        const double bound = c * Mollifier::gradient_l1() / delta * std::pow(1.0 + modulus_w(1.0, c, delta), 2);
        for (double x = -9.0; x <= 9.0; x += 0.05) CHECK(std::abs(wd.second_derivative(x)) <= bound * wd(x) * (1 + 1e-9));
    }
}

TEST_CASE("truncated weight: ratio bounds") {
    const Weight base = Weight::exp(1.0);
    for (double R : {2.0, 5.0}) {
        const Weight wr = truncate_weight(base, R);
        double ratio = 0.0, grad = 0.0;
        for (double x = -3 * R; x <= 3 * R; x += 0.01) {
            ratio = std::max(ratio, wr(x) / base(x));
            grad = std::max(grad, std::abs(wr.derivative(x)) / base(x));
        }
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(grad <= base.c_phi() + cutoff_gradient_sup() / R + 1e-9);
        CHECK_FALSE(wr.positive());
    }
}

TEST_CASE("localized Young inequality with f = J_r and random g") {
    const Grid g(512, 10.0);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N(0.0, 1.0);
    for (double r : {0.2, 0.8}) {
        const Mollifier J(r);
        GridField f(g);
        for (std::size_t j = 0; j < g.n; ++j) f[j] = J((double(j) - double(g.origin())) * g.dx());
        GridField h(g);
        for (std::size_t j = 0; j < g.n; ++j) h[j] = N(rng) * std::exp(-0.05 * g.x(j) * g.x(j));
        for (double p : {1.0, 2.0}) {
            const auto [lhs, rhs] = localized_young_bound(f, h, p, Weight::exp(1.0));
            CHECK(lhs <= rhs * (1 + 1e-9));
        }
    }
}

TEST_CASE("weight keys round-trip and reject junk") {
    CHECK(Weight::parse("exp:2").c_phi() == doctest::Approx(2.0));
    CHECK_THROWS(Weight::parse("exp"));
    CHECK_THROWS(Weight::parse("poly:0"));
    CHECK_THROWS(Weight::parse("gauss:1"));
}

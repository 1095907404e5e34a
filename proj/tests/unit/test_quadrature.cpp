#include <cmath>
#include <random>

#include "doctest.h"
#include "stochcl/heat_kernel.hpp"
#include "stochcl/quadrature.hpp"

using namespace stochcl;

namespace {

// Closed form: z - z^2 = 1/4 - (z - 1/2)^2, so c_d = e^{1/4} \int_{-1/2}^inf (y + 1/2)^d (y + 3/2)^2 e^{-y^2} dy,
// expanded in the Gaussian tail moments M_j = \int_a^inf y^j e^{-y^2} dy with the usual recursion.
double c_d_closed_form(int d) {
    const double a = -0.5;
    std::vector<double> M(d + 3);
    M[0] = 0.5 * std::sqrt(M_PI) * std::erfc(a);
    M[1] = 0.5 * std::exp(-a * a);
    for (int j = 2; j < d + 3; ++j) M[j] = 0.5 * (j - 1) * M[j - 2] + 0.5 * std::pow(a, j - 1) * std::exp(-a * a);
    // Coefficients of (y + 1/2)^d (y + 3/2)^2.
    std::vector<double> c(d + 3, 0.0);
    for (int i = 0; i <= d; ++i) {
        const double bin = std::tgamma(d + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(d - i + 1.0));
        const double ci = bin * std::pow(0.5, d - i);
        c[i] += 2.25 * ci;
        c[i + 1] += 3.0 * ci;
        c[i + 2] += ci;
    }
    double s = 0.0;
    for (int j = 0; j < d + 3; ++j) s += c[j] * M[j];
    return std::exp(0.25) * s;
}

}  // namespace

TEST_CASE("adaptive Simpson integrates smooth functions") {
    const auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));
    const auto g = adaptive_simpson([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-13);
    CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-11));
}

TEST_CASE("Gauss rules are exact on polynomials of their degree") {
    const Rule gl = gauss_legendre(6, 0.0, 2.0);
    // \int_0^2 x^11 = 2^12 / 12
    CHECK(integrate(gl, [](double x) { return std::pow(x, 11); }) == doctest::Approx(4096.0 / 12.0).epsilon(1e-12));
    const Rule lg = gauss_laguerre(8, 2.0);
    // \int_0^inf x^5 e^{-2x} = 5! / 2^6
    CHECK(integrate(lg, [](double x) { return std::pow(x, 5); }) == doctest::Approx(120.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("c_d: both quadrature routes match the Gaussian-moment closed form") {
    for (int d = 0; d <= 4; ++d) {
        CAPTURE(d);
        const double exact = c_d_closed_form(d);
        const auto s = c_d_simpson(d), l = c_d_laguerre(d);
        CHECK(std::abs(s.value - exact) <= 1e-10);
        CHECK(std::abs(l.value - exact) <= 1e-10);
        CHECK(s.error_bound < 1e-9);
        CHECK(l.error_bound < 1e-9);
    }
}

TEST_CASE("kappa assembly for d = 1 uses alpha(1) = 2") {
    CHECK(sphere_factor(1) == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(kappa1(1) == doctest::Approx(c_d_constant(0) * 2.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(kappa2(1) == doctest::Approx(c_d_constant(1) * 2.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK_THROWS(c_d_simpson(-1));
}

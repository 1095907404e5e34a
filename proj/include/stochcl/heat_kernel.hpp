#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "stochcl/grid.hpp"
#include "stochcl/weights.hpp"

namespace stochcl {

struct KernelParams {
    double eps = 0.1;
    double t = 0.0;
    int d = 1;

    double eps_t() const { return eps * t; }
    // C_phi sqrt(4 eps t) <= 1.
    bool in_regime(double c_phi) const;
    // At least 4 grid points per standard deviation sqrt(2 eps t).
    bool resolved(double dx) const;
};

// Spectral heat propagator on the periodic grid. The multiplier exp(-eps t k^2)
// is the Fourier series of the periodized Gaussian, so the convolution is exact
// on the torus for the trigonometric interpolant. Plans are created once per
// grid size and shared; apply() is reentrant.
class HeatPropagator {
public:
    explicit HeatPropagator(const Grid& g);
    ~HeatPropagator();
    HeatPropagator(const HeatPropagator&) = delete;
    HeatPropagator& operator=(const HeatPropagator&) = delete;

    const Grid& grid() const { return grid_; }
    std::size_t modes() const { return grid_.n / 2 + 1; }
    double wavenumber(std::size_t j) const;

    // out = Phi(eps_t) * in (in and out may alias).
    void apply(const double* in, double* out, double eps_t) const;
    // out = Phi(eps_t) * d/dx in.
    void apply_derivative(const double* in, double* out, double eps_t) const;
    // out = IFFT(mult .* FFT(in)) with a precomputed real multiplier.
    void apply_multiplier(const double* in, double* out, const std::vector<double>& mult) const;
    std::vector<double> multiplier(double eps_t) const;

    void forward(const double* in, std::complex<double>* spec) const;
    void inverse(std::complex<double>* spec, double* out) const;

private:
    Grid grid_;
    struct Plans;
    std::shared_ptr<Plans> plans_;
};

GridField heat_convolve(const GridField& u, const KernelParams& params);
// Phi * div(v), with the spectral derivative.
GridField heat_convolve_divergence(const GridField& v, const KernelParams& params);

// c_d = \int_0^inf z^d (1+z)^2 exp(z - z^2) dz.
struct ConstantValue {
    double value = 0.0;
    double error_bound = 0.0;
};
ConstantValue c_d_simpson(int d);
ConstantValue c_d_laguerre(int d);
double c_d_constant(int d);
// d alpha(d) / pi^{d/2} with alpha the unit-ball volume.
double sphere_factor(int d);
double kappa1(int d);
double kappa2(int d);

struct YoungCheck {
    double lhs = 0.0;
    double bound = 0.0;
    bool regime_ok = true;
    bool holds(double rel_tol = 1e-6) const { return !regime_ok || lhs <= bound * (1.0 + rel_tol); }
};
// ||Phi(t) * u||_{p,phi} <= kappa_1 ||u||_{p,phi}.
YoungCheck verify_young_heat(const GridField& u, double p, const Weight& w, const KernelParams& params);
// ||Phi(t) * d_x v||_{p,phi} <= kappa_2 / sqrt(eps t) ||v||_{p,phi}.
YoungCheck verify_young_heat_divergence(const GridField& v, double p, const Weight& w, const KernelParams& params);

}  // namespace stochcl

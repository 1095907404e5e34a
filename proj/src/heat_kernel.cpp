#include "stochcl/heat_kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "stochcl/quadrature.hpp"

namespace stochcl {

bool KernelParams::in_regime(double c_phi) const { return c_phi * std::sqrt(4.0 * eps * t) <= 1.0; }

bool KernelParams::resolved(double dx) const { return std::sqrt(2.0 * eps * t) >= 4.0 * dx; }

struct HeatPropagator::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    ~Plans() {
        std::lock_guard<std::mutex> lk(mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
    // FFTW's planner is not thread safe; execution with new arrays is.
    static std::mutex& mutex() {
        static std::mutex mu;
        return mu;
    }
};

HeatPropagator::HeatPropagator(const Grid& g) : grid_(g) {
    grid_.validate();
    plans_ = std::make_shared<Plans>();
    std::lock_guard<std::mutex> lk(Plans::mutex());
    std::vector<double> re(g.n);
    std::vector<std::complex<double>> sp(g.n / 2 + 1);
    const int n = static_cast<int>(g.n);
    plans_->r2c = fftw_plan_dft_r2c_1d(n, re.data(), reinterpret_cast<fftw_complex*>(sp.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(sp.data()), re.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW planning failed");
}

HeatPropagator::~HeatPropagator() = default;

double HeatPropagator::wavenumber(std::size_t j) const { return std::numbers::pi * static_cast<double>(j) / grid_.L; }

void HeatPropagator::forward(const double* in, std::complex<double>* spec) const {
    fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(spec));
}

void HeatPropagator::inverse(std::complex<double>* spec, double* out) const {
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(spec), out);
    const double s = 1.0 / static_cast<double>(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i) out[i] *= s;
}

std::vector<double> HeatPropagator::multiplier(double eps_t) const {
    std::vector<double> m(modes());
    for (std::size_t j = 0; j < m.size(); ++j) {
        const double k = wavenumber(j);
        m[j] = std::exp(-eps_t * k * k);
    }
    return m;
}

void HeatPropagator::apply_multiplier(const double* in, double* out, const std::vector<double>& mult) const {
    thread_local std::vector<std::complex<double>> spec;
    spec.resize(modes());
    forward(in, spec.data());
    for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= mult[j];
    inverse(spec.data(), out);
}

void HeatPropagator::apply(const double* in, double* out, double eps_t) const {
    if (eps_t == 0.0) {
        if (in != out) std::copy(in, in + grid_.n, out);
        return;
    }
    apply_multiplier(in, out, multiplier(eps_t));
}

void HeatPropagator::apply_derivative(const double* in, double* out, double eps_t) const {
    thread_local std::vector<std::complex<double>> spec;
    spec.resize(modes());
    forward(in, spec.data());
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double k = wavenumber(j);
        spec[j] *= std::complex<double>(0.0, k) * std::exp(-eps_t * k * k);
    }
    spec.back() = 0.0;  // the Nyquist mode has no odd derivative
    inverse(spec.data(), out);
}

GridField heat_convolve(const GridField& u, const KernelParams& params) {
    GridField out(u.grid, 0.0, u.t + params.t);
    if (params.eps_t() == 0.0) {
        out.values = u.values;
        return out;
    }
    if (!params.resolved(u.grid.dx()))
        std::clog << "warning: heat kernel width sqrt(2 eps t) is under-resolved by the grid\n";
    HeatPropagator h(u.grid);
    h.apply(u.values.data(), out.values.data(), params.eps_t());
    return out;
}

GridField heat_convolve_divergence(const GridField& v, const KernelParams& params) {
    GridField out(v.grid, 0.0, v.t + params.t);
    HeatPropagator h(v.grid);
    h.apply_derivative(v.values.data(), out.values.data(), params.eps_t());
    return out;
}

// ---------------------------------------------------------------- constants

namespace {

double cd_integrand(int d, double z) { return std::pow(z, d) * (1.0 + z) * (1.0 + z) * std::exp(z - z * z); }

}  // namespace

ConstantValue c_d_simpson(int d) {
    if (d < 0) throw std::invalid_argument("c_d needs d >= 0");
    constexpr double Z = 12.0;
    auto f = [d](double z) { return cd_integrand(d, z); };
    const QuadratureResult q = adaptive_simpson(f, 0.0, Z, 1e-13, 60);
    // For z >= Z: z^d (1+z)^2 grows by at most exp((d+2)(z-Z)/Z) and
    // exp(z - z^2) decays at least like exp(-(2Z-1)(z-Z)).
    const double tail = cd_integrand(d, Z) / ((2.0 * Z - 1.0) - (d + 2) / Z);
    return {q.value, q.error + tail};
}

ConstantValue c_d_laguerre(int d) {
    if (d < 0) throw std::invalid_argument("c_d needs d >= 0");
    // Substitute the weight exp(-b z): \int f = \int e^{-b z} [e^{b z} f(z)] dz. A steep weight keeps
    // the nodes inside the Gaussian bulk of exp(z - z^2); b = 1/4 needs hundreds of nodes.
    constexpr double b = 4.0;
    auto g = [d](double z) { return std::exp(b * z) * cd_integrand(d, z); };
    const double v60 = integrate(gauss_laguerre(60, b), g);
    const double v80 = integrate(gauss_laguerre(80, b), g);
    return {v80, std::abs(v80 - v60)};
}

double c_d_constant(int d) { return c_d_simpson(d).value; }

double sphere_factor(int d) {
    if (d < 1) throw std::invalid_argument("sphere factor needs d >= 1");
    return d / std::tgamma(0.5 * d + 1.0);
}

double kappa1(int d) { return c_d_constant(d - 1) * sphere_factor(d); }
double kappa2(int d) { return c_d_constant(d) * sphere_factor(d); }

YoungCheck verify_young_heat(const GridField& u, double p, const Weight& w, const KernelParams& params) {
    YoungCheck out;
    out.regime_ok = params.in_regime(w.c_phi());
    const auto phi = w.sample(u.grid);
    const double dx = u.grid.dx();
    std::vector<double> conv(u.size());
    HeatPropagator h(u.grid);
    h.apply(u.values.data(), conv.data(), params.eps_t());
    out.lhs = weighted_lp_norm(conv, p, phi, dx);
    out.bound = kappa1(params.d) * weighted_lp_norm(u.values, p, phi, dx);
    return out;
}

YoungCheck verify_young_heat_divergence(const GridField& v, double p, const Weight& w, const KernelParams& params) {
    YoungCheck out;
    out.regime_ok = params.in_regime(w.c_phi());
    const auto phi = w.sample(v.grid);
    const double dx = v.grid.dx();
    std::vector<double> conv(v.size());
    HeatPropagator h(v.grid);
    h.apply_derivative(v.values.data(), conv.data(), params.eps_t());
    out.lhs = weighted_lp_norm(conv, p, phi, dx);
    out.bound = kappa2(params.d) / std::sqrt(params.eps_t()) * weighted_lp_norm(v.values, p, phi, dx);
    return out;
}

}  // namespace stochcl

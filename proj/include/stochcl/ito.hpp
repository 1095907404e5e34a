#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stochcl/malliavin.hpp"
#include "stochcl/noise.hpp"
#include "stochcl/stats.hpp"

namespace stochcl {

// X(t) = x0 + int int u(s, z) W(dz, ds) + int v(s) ds with deterministic u, v.
struct ToyProcess {
    double x0 = 0.5;
    double T = 1.0;
    NoiseSpace space = NoiseSpace::uniform(2);
    std::function<double(double, std::size_t)> u;
    std::function<double(double)> v;

    static ToyProcess standard();
};

// F(zeta, lambda, t) with the partial derivatives the formula needs.
struct ItoFunction {
    using Fn3 = std::function<double(double, double, double)>;
    Fn3 F, F1, F3, F11, F12;
    // Sampled check of |F|, |F_3| <= C(1 + |zeta| + |lambda|) and |F_1|, |F_11|, |F_12| <= C.
    bool growth_ok() const;
};

// Builds V on a grid of n_steps cells of width h over [0, T].
using RVFactory = std::function<SmoothRV(std::size_t n_steps, std::size_t m, double h)>;

struct ItoCase {
    std::string name;
    ToyProcess proc;
    ItoFunction F;
    RVFactory V;
    bool constant_V = false;
};

// identity, product_linear, square_classical, sin_tanh.
std::vector<ItoCase> builtin_ito_cases();
ItoCase ito_case(const std::string& name);

struct ItoResult {
    std::string name;
    std::size_t n_steps = 0;
    Estimate lhs;          // E F(X(T), V, T)
    Estimate rhs;          // E of the expansion without the Skorohod term
    Estimate residual;     // lhs - rhs, paired
    Estimate cross;        // E int int F_12 D V u, zero when V is constant
    Estimate skorohod;     // E delta(G), expected 0
    Estimate skorohod_V;   // E delta(G) V
    Estimate inner;        // E <G, DV>_H
    Estimate duality_gap;  // skorohod_V - inner, paired
    bool growth_ok = true;
    bool pass() const { return std::abs(residual.mean) <= 3.0 * residual.se; }
};

// Left-point discretisation with n_steps cells over [0, T].
ItoResult verify_anticipating_ito(const ItoCase& c, std::size_t n_mc, std::size_t n_steps, std::uint64_t seed);

struct WeakOrderStudy {
    std::vector<double> h;
    std::vector<Estimate> bias;
    LinearFit fit;  // log |bias| vs log h
};

// Coarse levels built by aggregating the increments of the finest level (common random numbers).
WeakOrderStudy weak_order_study(const ItoCase& c, const std::vector<double>& h_list, std::size_t n_mc,
                                std::uint64_t seed);

}  // namespace stochcl

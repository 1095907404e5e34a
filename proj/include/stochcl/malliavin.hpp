#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stochcl/viscous_solver.hpp"

namespace stochcl {

// w(t) = D_{r,z_k} u(t). Zero before the birth step r.
struct TangentField {
    std::size_t r_index = 0;
    std::size_t k = 0;
    bool born = false;
    Trajectory w;  // steps r..n_end when born

    // Field at step n; zeros for n < r.
    std::vector<double> at_step(std::size_t n) const;
};

// w(r) = sigma(., u(r), z_k), then w(r+1) = Phi(dt) w(r) and the linearised step afterwards.
// base must contain every step in [r, n_end].
TangentField solve_tangent(const Stepper& st, const Trajectory& base, const NoisePath& path, std::size_t r_index,
                           std::size_t k, std::size_t n_end);
// Same recursion from an arbitrary profile at step r.
Trajectory solve_tangent_profile(const Stepper& st, const Trajectory& base, const NoisePath& path, std::size_t r_index,
                                 const std::vector<double>& profile, std::size_t n_end);

// Default finite-difference step: sqrt(machine eps) times the increment scale sqrt(dt mu_k).
double default_fd_step(const SolverConfig& cfg, std::size_t k);

// [u(n_end; W + eps 1_{r,k}) - u(n_end; W)] / eps, or the centred quotient.
std::vector<double> fd_malliavin_oracle(const Stepper& st, const GridField& u0, const NoisePath& path,
                                        std::size_t r_index, std::size_t k, double eps_fd, std::size_t n_end,
                                        bool two_sided = true);

// Relative L^2(phi) distance ||a - b|| / ||b||.
double relative_l2_phi(const std::vector<double>& a, const std::vector<double>& b, const Stepper& st);

// ---------------------------------------------------------------- smooth random variables

// V = F(W(h_1), ..., W(h_n)) with h_i on the (step, node) cells.
class SmoothRV {
public:
    using Outer = std::function<double(std::span<const double>)>;
    using OuterGrad = std::function<void(std::span<const double>, std::span<double>)>;

    static SmoothRV constant(double c);
    // V = W(h).
    static SmoothRV linear(std::vector<double> h, std::size_t n_steps, std::size_t m);
    // V = g(W(h)).
    static SmoothRV composed(std::function<double(double)> g, std::function<double(double)> g_prime,
                             std::vector<double> h, std::size_t n_steps, std::size_t m);
    static SmoothRV general(Outer f, OuterGrad grad, std::vector<std::vector<double>> dirs, std::size_t n_steps,
                            std::size_t m);

    struct Eval {
        double value = 0.0;
        std::vector<double> W;     // W(h_i)
        std::vector<double> grad;  // d_i F at (W(h_1), ...)
    };
    Eval evaluate(const NoisePath& path) const;
    // D_{n,k} V = sum_i d_i F h_i(n, k).
    double derivative(const Eval& e, std::size_t n, std::size_t k) const;
    std::vector<double> derivative_field(const Eval& e) const;

    bool is_constant() const { return dirs_.empty(); }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t m() const { return m_; }
    const std::vector<std::vector<double>>& directions() const { return dirs_; }
    // Same outer function with directions scaled cellwise by (1 + eta * bump) for continuity sweeps.
    SmoothRV perturbed(const std::vector<double>& delta_h, double eta) const;

private:
    Outer f_;
    OuterGrad grad_;
    std::vector<std::vector<double>> dirs_;
    std::size_t n_steps_ = 0, m_ = 0;
};

// <a, b>_H = sum_{n,k} a b dt mu_k.
double h_inner(const std::vector<double>& a, const std::vector<double>& b, double dt, const NoiseSpace& space);

// ---------------------------------------------------------------- weak time continuity

struct WeakContinuityOptions {
    std::size_t r_index = 0;
    std::vector<std::size_t> r0_steps{8, 4, 2};
    std::vector<std::vector<double>> psi;  // one grid field per node
    Weight weight = Weight::truncated(Weight::exp(2.0), 5.0);
    std::size_t n_mc = 2000;
    std::uint64_t seed = 1;
    // Samples used for the sup_t E||D_r u(t)||^2 factor of the uniform bound (0 = skip).
    std::size_t n_bound = 100;
    std::size_t bound_snapshots = 10;
};

struct WeakContinuityResult {
    std::vector<std::size_t> r0_steps;
    std::vector<Estimate> stat;        // T_{r0}
    std::vector<Estimate> decrement;   // |T| at r0_{i} minus |T| at r0_{i+1} (paired, sign of the means)
    double tangent_sup = 0.0;          // sup_t (E||D_r u(t)||^2)^{1/2}
    double base_term = 0.0;            // ||M|| (E||1 + |u(r)|||^2)^{1/2}
    double constant = 0.0;             // tangent_sup + base_term
    double psi_norm = 0.0;             // (sum_k mu_k ||psi_k||_{2,phi}^2)^{1/2}
};

// Monte Carlo estimate of E sum_k mu_k int int (D_{r,k} u(t) - sigma(u(r))) J+_{r0}(t - r) psi_k phi.
// Continuations after step r are antithetic pairs sharing the same u(r).
WeakContinuityResult weak_time_continuity_stat(const SolverConfig& cfg, const GridField& u0,
                                               const WeakContinuityOptions& opt);

// Discrete weights of J+_{r0}(j dt), j = 0..2 r0, normalised to unit sum.
std::vector<double> shifted_mollifier_weights(std::size_t r0_steps);

}  // namespace stochcl

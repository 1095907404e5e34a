#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochcl/flux.hpp"
#include "stochcl/grid.hpp"
#include "stochcl/heat_kernel.hpp"
#include "stochcl/noise.hpp"
#include "stochcl/stats.hpp"
#include "stochcl/weights.hpp"

namespace stochcl {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { exp_euler, picard_mild };

struct SolverConfig {
    Grid grid;
    double eps = 0.05;
    double dt = 2e-4;
    std::size_t n_steps = 2500;
    FluxFn flux = FluxFn::burgers_clipped(2.0);
    NoiseSpace noise = NoiseSpace::uniform(4);
    SigmaCoeff sigma = SigmaCoeff::none(4);
    Weight weight = Weight::exp(2.0);
    Scheme scheme = Scheme::exp_euler;

    double T() const { return dt * static_cast<double>(n_steps); }
    double cfl() const { return dt * flux.lip_norm() / grid.dx(); }
    // Throws std::invalid_argument when the CFL or noise-stability constraints fail.
    void validate() const;
    std::string describe() const;
};

// Dense record of a solution at selected steps.
struct Trajectory {
    Grid grid;
    double dt = 0.0;
    std::vector<std::size_t> steps;
    std::vector<std::vector<double>> fields;

    std::size_t size() const { return steps.size(); }
    double time(std::size_t i) const { return dt * static_cast<double>(steps[i]); }
    // Field at a stored step (throws if absent).
    const std::vector<double>& at_step(std::size_t n) const;
    GridField field(std::size_t i) const { return GridField(grid, fields[i], time(i)); }
};

// One-step operator of the stochastic exponential Euler scheme
//   u_{n+1} = Phi(dt) * [u_n - dt D_x f(u_n) + sum_k sigma(., u_n, z_k) dW_{n,k}]
// with a global Lax-Friedrichs flux, plus its exact linearisation.
class Stepper {
public:
    explicit Stepper(const SolverConfig& cfg);

    const SolverConfig& config() const { return cfg_; }
    const HeatPropagator& heat() const { return *heat_; }
    const std::vector<double>& weight_samples() const { return phi_; }
    const std::vector<double>& coordinates() const { return x_; }
    double dx() const { return dx_; }

    // u <- step(u). dW points at the m increments of the current step (nullptr = no noise).
    void step(std::vector<double>& u, const double* dW) const;
    // Bracket before the heat propagator.
    void bracket(const std::vector<double>& u, const double* dW, std::vector<double>& out) const;
    // -dt D_x f(u) added to out.
    void add_flux_divergence(const std::vector<double>& u, std::vector<double>& out) const;
    // w <- D step(u)[w], the derivative of the step map at u applied to w.
    void tangent_step(const std::vector<double>& u, std::vector<double>& w, const double* dW) const;

    double sigma_at(std::size_t i, double u, std::size_t k) const { return g_[k] * cfg_.sigma.shape(u) * mod_[i]; }
    double sigma_du_at(std::size_t i, double u, std::size_t k) const {
        return g_[k] * cfg_.sigma.shape_derivative(u) * mod_[i];
    }
    bool has_noise() const { return noisy_; }

private:
    SolverConfig cfg_;
    std::shared_ptr<HeatPropagator> heat_;
    std::vector<double> mult_;
    std::vector<double> phi_;
    std::vector<double> x_;
    std::vector<double> mod_;
    std::vector<double> g_;
    double dx_ = 0.0;
    bool noisy_ = false;
};

// Observer called with (step index, field) for n = 0 and after every step.
using StepObserver = std::function<void(std::size_t, const std::vector<double>&)>;

// Marches n_end steps; path may be nullptr for a noise-free run.
std::vector<double> march(const Stepper& st, const std::vector<double>& u0, const NoisePath* path, std::size_t n_end,
                          const StepObserver& observe = {});

NoisePath mc_path(const SolverConfig& cfg, std::uint64_t seed, std::uint64_t sample);

Trajectory solve_path(const SolverConfig& cfg, const GridField& u0, const NoisePath& path,
                      const std::vector<std::size_t>& snapshot_steps);
Trajectory solve_path(const Stepper& st, const GridField& u0, const NoisePath* path,
                      const std::vector<std::size_t>& snapshot_steps);
// Every step 0..n_end stored (base trajectories for tangent solves).
Trajectory solve_full(const Stepper& st, const GridField& u0, const NoisePath* path, std::size_t n_end);

// Evenly spaced snapshot steps k * n_steps / count, k = 1..count.
std::vector<std::size_t> snapshot_schedule(std::size_t n_steps, std::size_t count, bool include_zero = false);

// ---------------------------------------------------------------- mild form

// delta_{beta,1} ||f||_Lip + delta_{beta,2} ||sigma||_Lip for the beta-weighted L^p norm.
struct ContractionConstants {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double total = 0.0;
};
ContractionConstants picard_contraction_constants(const SolverConfig& cfg, double beta, double p = 2.0);
// Smallest beta with contraction constant <= target.
double picard_beta_threshold(const SolverConfig& cfg, double p = 2.0, double target = 1.0);

struct PicardResult {
    Trajectory final_iterate;
    // diff_sq[k][n] = ||u^{k+1}(t_n) - u^k(t_n)||_{2,phi}^2.
    std::vector<std::vector<double>> diff_sq;
};
// Iterates the discrete mild map from the zero process.
PicardResult picard_mild_solve(const SolverConfig& cfg, const GridField& u0, const NoisePath& path, std::size_t n_iter);

struct PicardHistory {
    double beta = 0.0;
    std::vector<double> distance;  // ||u^{k+1} - u^k||_{beta,2}, k = 0..n_iter-1
    std::vector<double> ratio;     // distance[k+1]/distance[k]
};
// Monte Carlo beta-norm of the Picard increments; log-domain so that very large beta is safe.
PicardHistory picard_contraction_history(const SolverConfig& cfg, const GridField& u0, std::size_t n_mc,
                                         std::uint64_t seed, std::size_t n_iter, double beta);

// ---------------------------------------------------------------- diagnostics

struct CurvePoint {
    double t = 0.0;
    Estimate est;
};

// E ||u(t)||_{p,phi}^p at snapshot steps for each p; shared paths across p.
std::vector<std::vector<CurvePoint>> lp_moment_curves(const SolverConfig& cfg, const GridField& u0,
                                                      const std::vector<double>& ps, std::size_t n_mc,
                                                      std::uint64_t seed, const std::vector<std::size_t>& snaps);
std::vector<CurvePoint> lp_moment_curve(const SolverConfig& cfg, const GridField& u0, double p, std::size_t n_mc,
                                        std::uint64_t seed, const std::vector<std::size_t>& snaps);

// E ||d_x u(t)||_{2,phi}^2 using centred differences.
std::vector<CurvePoint> spatial_derivative_bound(const SolverConfig& cfg, const GridField& u0, std::size_t n_mc,
                                                 std::uint64_t seed, const std::vector<std::size_t>& snaps);

struct DependenceProbe {
    double lhs = 0.0;               // ||u_1 - u_2||_{beta,p}
    double initial_term = 0.0;      // E||u_1^0 - u_2^0||^p ^{1/p}
    double flux_term = 0.0;         // ||f_1 - f_2||_Lip ||u_1||_{beta,p}
    double sigma_term = 0.0;        // ||sigma_1 - sigma_2||_Lip (||phi||_1 + ||u_1||_{beta,p})
    double rhs() const { return initial_term + flux_term + sigma_term; }
};
DependenceProbe continuous_dependence_probe(const SolverConfig& cfg1, const SolverConfig& cfg2, const GridField& u0_1,
                                            const GridField& u0_2, std::size_t n_mc, std::uint64_t seed, double p,
                                            double beta, const std::vector<std::size_t>& snaps);

}  // namespace stochcl

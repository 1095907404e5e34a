#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stochcl/entropy.hpp"
#include "stochcl/viscous_solver.hpp"

namespace stochcl {

// Combined FNV-1a hash of the per-sample path hashes, in sample order.
std::uint64_t combine_path_hashes(const std::vector<std::uint64_t>& h);

// Numerical viscosity of the global Lax-Friedrichs flux, ||f||_Lip dx / 2.
double numerical_viscosity(const SolverConfig& cfg);

// ---------------------------------------------------------------- L1 contraction

struct ContractionCurve {
    std::vector<double> t;               // t[0] = 0
    std::vector<Estimate> distance;      // E ||u(t) - v(t)||_{1,phi}
    std::vector<Estimate> increment;     // distance[j] - distance[j-1], paired; j >= 1
    std::vector<double> tol;             // budget for increment[j-1]
    std::uint64_t path_hash_u = 0, path_hash_v = 0;
    bool nonincreasing() const;
};

// tol(t) = c1 dx + c2 sqrt(dt) t + 3 SE.
struct ContractionBudget {
    double c1 = 0.0, c2 = 0.0;
    double operator()(double dx, double dt, double t, double se) const { return c1 * dx + c2 * std::sqrt(dt) * t + 3.0 * se; }
};
ContractionBudget contraction_tolerance();

// Snapshots are taken at the given steps; u and v consume identical paths.
ContractionCurve l1_contraction_curve(const SolverConfig& cfg, const GridField& u0, const GridField& v0,
                                      std::size_t n_mc, std::uint64_t seed, const std::vector<std::size_t>& snaps);

// ---------------------------------------------------------------- Kato inequality

struct KatoResult {
    Estimate lhs;            // E int |u(t0) - v(t0)| psi
    Estimate initial;        // E int |u0 - v0| psi
    Estimate flux;           // E int_0^t0 int sign(u - v)(f(u) - f(v)) psi'
    Estimate viscous;        // (eps + numerical viscosity) E int int |u - v| |psi''|
    Estimate gap;            // lhs - initial - flux, paired
    double tol = 0.0;
    std::uint64_t path_hash_u = 0, path_hash_v = 0;
    double rhs() const { return initial.mean + flux.mean; }
    bool pass() const { return gap.mean <= tol; }
};

KatoResult kato_check(const SolverConfig& cfg, const GridField& u0, const GridField& v0, const TestFunction& psi,
                      std::size_t t0_steps, std::size_t n_mc, std::uint64_t seed);

// ---------------------------------------------------------------- doubling of variables

struct DoublingParams {
    double r = 0.3;               // spatial mollifier radius
    std::size_t r0_steps = 2;     // time mollifier radius
    double delta = 0.2;           // entropy smoothing
    std::size_t gamma_steps = 10; // time cutoff radius
    std::size_t t0_steps = 200;
    double psi_x0 = 0.0;          // psi = bump((x - x0)/width), unnormalised
    double psi_width = 3.0;
    std::size_t s_stride = 10;    // outer time stride away from t0
    double eps_ratio = 0.25;      // proxy viscosity eps' = eps_ratio * eps

    // Throws std::invalid_argument unless 2 r0 < t0, t0 + 2 gamma <= T and r >= 2 dx.
    void validate(const SolverConfig& cfg) const;
};

// delta = r^{1+eta}, admissible when 0 < eta < 2 kappa - 1.
double coupled_delta(double r, double eta);

struct DoublingTerms {
    Estimate L, R, F, T1, T2, T3;
    Estimate T3_proxy;     // -eps' E int S(v - u) Delta_y test, from the viscous proxy
    Estimate numerical;    // nu_num E int S |Delta_x test| + |Delta_y test|
    Estimate gap;          // L - (R + F + T1 + T2 + T3), paired
    double tol = 0.0;
    std::uint64_t path_hash_u = 0, path_hash_v = 0;
    bool pass() const { return gap.mean >= -tol; }
};

// v is the viscous proxy at eps' on the same paths.
DoublingTerms doubling_terms(const SolverConfig& cfg, const GridField& u0, const GridField& v0,
                             const DoublingParams& p, std::size_t n_mc, std::uint64_t seed);

// ---------------------------------------------------------------- fractional BV

// int int |u(x + z) - u(x - z)| phi(x) J_r(z) dx dz on the grid, r >= 2 dx.
double bv_modulus(const std::vector<double>& u, const std::vector<double>& phi, double dx, double r);

// 1 + C_phi ||f||_Lip T exp(C_phi ||f||_Lip T).
double frac_bv_constant(const SolverConfig& cfg);

struct FracBvResult {
    std::vector<double> r;
    std::vector<Estimate> initial;   // modulus of u0
    std::vector<Estimate> final;     // modulus at t = T
    std::vector<Estimate> excess;    // final - C initial, paired
    double C = 0.0;
    double kappa = 0.5;
    std::vector<double> ratio;       // final / initial
    Estimate amplitude;              // A in max(excess, 0) ~ A r^kappa (per-path weighted fit)
    LinearFit excess_loglog;        // log excess vs log r (positive excess only)
    // Smallest C' with final <= C initial + C' r^kappa at every r, padded by 3 SE.
    double required_cprime() const;
};

FracBvResult fractional_bv_study(const SolverConfig& cfg, const GridField& u0, const std::vector<double>& r_list,
                                 std::size_t n_mc, std::uint64_t seed);

// ---------------------------------------------------------------- epsilon -> 0

struct ConvergenceStudy {
    std::vector<double> eps;
    std::vector<std::vector<Estimate>> pairwise;  // E ||u^{eps_i} - u^{eps_j}||_{1,phi}(T), i < j
    std::vector<Estimate> consecutive;            // pairwise[i][i+1]
    std::vector<Estimate> decrement;              // consecutive[i] - consecutive[i+1], paired
    std::uint64_t path_hash = 0;
    bool strictly_decreasing() const;
};

ConvergenceStudy epsilon_convergence_study(const SolverConfig& base, const std::vector<double>& eps_list,
                                           const GridField& u0, std::size_t n_mc, std::uint64_t seed);

struct ExactLimitStudy {
    std::vector<double> eps;
    std::vector<Estimate> distance;   // E ||u^eps(T) - u(T)||_{1,phi}
    LinearFit fit;                    // log-log
};

// Linear flux with x-independent additive noise: u(T) = u0(x - aT) + sum_k g_k W_k(T).
ExactLimitStudy linear_additive_exact_study(const SolverConfig& base, const std::vector<double>& eps_list,
                                            const std::string& u0_key, std::size_t n_mc, std::uint64_t seed);

}  // namespace stochcl

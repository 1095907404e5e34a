#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "stochcl/malliavin.hpp"
#include "stochcl/viscous_solver.hpp"

namespace stochcl {

enum class EntropyFamily { s_delta, s_R, custom };

// Convex S with S(0) = 0 paired with the flux Q(u, c) = int_c^u S'(z - c) f'(z) dz.
class EntropyPair {
public:
    // S_delta' = 2 int_0^s J_delta, S_delta(0) = 0.
    static EntropyPair s_delta(double delta, const FluxFn& f);
    // |u|^p on (-R, R), continued linearly.
    static EntropyPair s_R(double R, double p, const FluxFn& f);
    static EntropyPair custom(std::function<double(double)> S, std::function<double(double)> dS,
                              std::function<double(double)> d2S, double lip, const FluxFn& f);
    // "s_delta:<delta>", "s_R:<R>:<p>", "linear" (S(s) = s) or "abs_smooth:<eta>".
    static EntropyPair parse(std::string_view key, const FluxFn& f);

    double S(double s) const;
    double dS(double s) const;
    double d2S(double s) const;
    // sup |S'|.
    double lip() const { return lip_; }
    EntropyFamily family() const { return family_; }
    double delta() const { return delta_; }
    const FluxFn& flux() const { return flux_; }
    std::string key() const { return key_; }

    // Reference: Gauss-Legendre quadrature of the defining integral, split at every kink.
    double q_flux(double u, double c) const;
    // Fast form for S_delta: full-window integrals plus the exact tail sign(u-c)(f(u) - f(c +- delta)).
    double q_fast(double u, double c) const;

    // Window integral G(c, y) = int_0^y S_delta'(w) f'(c + w) dw for |y| <= delta.
    double window_integral(double c, double y) const;

private:
    EntropyFamily family_ = EntropyFamily::custom;
    FluxFn flux_;
    double delta_ = 0.0, R_ = 0.0, p_ = 2.0, lip_ = 1.0;
    std::function<double(double)> S_, dS_, d2S_;
    std::string key_;
    std::vector<double> breakpoints(double a, double b, double c) const;
};

// Unit-width profile of S_delta: S_delta(s) = delta * profile(s / delta).
struct SdeltaProfile {
    static double value(double s);       // int_0^s (2K - 1)
    static double slope(double s);       // 2K(s) - 1
    static double curvature(double s);   // 2J(s)
    static double gap();                 // 1 - value(1), so S_delta(s) = |s| - delta * gap() for |s| >= delta
};

// Space-time test function theta(t) chi(x) with theta = cutoff(t / t_end).
struct TestFunction {
    double t_end = 0.5;
    std::vector<double> chi, chi_x, chi_xx;
    std::size_t lo = 0, hi = 0;  // support indices [lo, hi)

    double theta(double t) const;
    double theta_t(double t) const;
    // amp * bump((x - x0)/w), bump(s) = exp(-1/(1-s^2)).
    static TestFunction bump(const Grid& g, double x0, double width, double amp, double t_end);
    // cutoff((x - x0)/w): equal to 1 on |x - x0| <= w/2.
    static TestFunction plateau(const Grid& g, double x0, double width, double t_end);
    static TestFunction zero(const Grid& g, double t_end);
};

// One (S, test, V) draw.
struct EntropyTrial {
    EntropyPair pair;
    TestFunction test;
    SmoothRV V;
};

struct EntropyTerms {
    Estimate initial, transport, malliavin, quadratic, viscous;
    Estimate functional;  // the four-term functional (no viscous term)
    Estimate residual;    // functional + viscous term
};

struct EntropyRunOptions {
    std::size_t n_mc = 2000;
    std::uint64_t seed = 1;
    std::size_t time_stride = 1;  // left Riemann sum on every stride-th step
};

// Evaluates all trials on the same Monte Carlo paths; one streaming pass per path.
std::vector<EntropyTerms> entropy_residuals(const SolverConfig& cfg, const GridField& u0,
                                            const std::vector<EntropyTrial>& trials, const EntropyRunOptions& opt);

EntropyTerms entropy_functional(const SolverConfig& cfg, const GridField& u0, const EntropyTrial& trial,
                                const EntropyRunOptions& opt);

// tol = c1 dx + c2 dt_q + 3 SE + c3 eps with dt_q the time-quadrature step.
struct ToleranceBudget {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double operator()(double dx, double dt_q, double se, double eps) const { return c1 * dx + c2 * dt_q + 3.0 * se + c3 * eps; }
};
// Frozen constants from the linear-flux calibration.
ToleranceBudget entropy_tolerance();

struct InitialConditionResult {
    std::vector<std::size_t> r0_steps;
    std::vector<Estimate> stat;
    std::vector<Estimate> decrement;  // stat[i] - stat[i+1], paired
};

// E int int S(u(t,x) - u0(x)) psi(x) J+_{r0}(t) dx dt for each r0 (in steps).
InitialConditionResult initial_condition_stat(const SolverConfig& cfg, const GridField& u0,
                                              const std::function<double(double)>& S, const std::vector<double>& psi,
                                              const std::vector<std::size_t>& r0_steps, std::size_t n_mc,
                                              std::uint64_t seed);
// Single stored trajectory (every step up to 2 max r0).
std::vector<double> initial_condition_stat(const Trajectory& traj, const GridField& u0,
                                           const std::function<double(double)>& S, const std::vector<double>& psi,
                                           const std::vector<std::size_t>& r0_steps);

}  // namespace stochcl

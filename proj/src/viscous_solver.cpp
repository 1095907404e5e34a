#include "stochcl/viscous_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "stochcl/parallel.hpp"

namespace stochcl {

void SolverConfig::validate() const {
    grid.validate();
    noise.validate();
    if (!(eps >= 0.0)) throw std::invalid_argument("viscosity must be nonnegative");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (sigma.m() != noise.m()) throw std::invalid_argument("sigma and noise space disagree on node count");
    if (cfl() > 0.5) throw std::invalid_argument("CFL violated: dt*Lip(f)/dx = " + std::to_string(cfl()));
    const double s = sigma.max_du();
    if (dt * s * s * noise.total_mass() > 1.0) throw std::invalid_argument("noise stability constraint violated");
}

std::string SolverConfig::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "n_x=" << grid.n << " L=" << grid.L << " eps=" << eps << " dt=" << dt << " n_steps=" << n_steps
       << " flux=" << flux.key() << " sigma=" << sigma.key() << " m=" << noise.m() << " weight=" << weight.key();
    return os.str();
}

const std::vector<double>& Trajectory::at_step(std::size_t n) const {
    const auto it = std::lower_bound(steps.begin(), steps.end(), n);
    if (it == steps.end() || *it != n) throw std::out_of_range("trajectory has no snapshot at step " + std::to_string(n));
    return fields[static_cast<std::size_t>(it - steps.begin())];
}

// ---------------------------------------------------------------- stepper

Stepper::Stepper(const SolverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    heat_ = std::make_shared<HeatPropagator>(cfg.grid);
    mult_ = heat_->multiplier(cfg.eps * cfg.dt);
    phi_ = cfg.weight.sample(cfg.grid);
    dx_ = cfg.grid.dx();
    x_.resize(cfg.grid.n);
    mod_.resize(cfg.grid.n);
    for (std::size_t i = 0; i < cfg.grid.n; ++i) {
        x_[i] = cfg.grid.x(i);
        mod_[i] = cfg.sigma.modulation(x_[i]);
    }
    g_ = cfg.sigma.amplitudes();
    noisy_ = !cfg.sigma.is_zero();
}

void Stepper::add_flux_divergence(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t n = u.size();
    const double a = cfg_.flux.lip_norm();
    const double c = cfg_.dt / dx_;
    thread_local std::vector<double> fu, F;
    fu.resize(n);
    F.resize(n);
    for (std::size_t i = 0; i < n; ++i) fu[i] = cfg_.flux(u[i]);
    // F[i] is the numerical flux at the interface i+1/2.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1 == n) ? 0 : i + 1;
        F[i] = 0.5 * (fu[i] + fu[j]) - 0.5 * a * (u[j] - u[i]);
    }
    for (std::size_t i = 0; i < n; ++i) out[i] -= c * (F[i] - F[i == 0 ? n - 1 : i - 1]);
}

void Stepper::bracket(const std::vector<double>& u, const double* dW, std::vector<double>& out) const {
    const std::size_t n = u.size();
    out.assign(u.begin(), u.end());
    if (cfg_.flux.lip_norm() != 0.0) add_flux_divergence(u, out);
    if (dW && noisy_) {
        const std::size_t m = g_.size();
        double gw = 0.0;
        for (std::size_t k = 0; k < m; ++k) gw += g_[k] * dW[k];
        // sigma = g_k s(u) m(x) factorises, so the node sum collapses to one product.
        for (std::size_t i = 0; i < n; ++i) out[i] += gw * cfg_.sigma.shape(u[i]) * mod_[i];
    }
}

void Stepper::step(std::vector<double>& u, const double* dW) const {
    thread_local std::vector<double> b;
    bracket(u, dW, b);
    heat_->apply_multiplier(b.data(), u.data(), mult_);
}

void Stepper::tangent_step(const std::vector<double>& u, std::vector<double>& w, const double* dW) const {
    const std::size_t n = u.size();
    thread_local std::vector<double> b, fw, G;
    b.assign(w.begin(), w.end());
    const double a = cfg_.flux.lip_norm();
    if (a != 0.0) {
        const double c = cfg_.dt / dx_;
        fw.resize(n);
        G.resize(n);
        for (std::size_t i = 0; i < n; ++i) fw[i] = cfg_.flux.derivative(u[i]) * w[i];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i + 1 == n) ? 0 : i + 1;
            G[i] = 0.5 * (fw[i] + fw[j]) - 0.5 * a * (w[j] - w[i]);
        }
        for (std::size_t i = 0; i < n; ++i) b[i] -= c * (G[i] - G[i == 0 ? n - 1 : i - 1]);
    }
    if (dW && noisy_) {
        double gw = 0.0;
        for (std::size_t k = 0; k < g_.size(); ++k) gw += g_[k] * dW[k];
        for (std::size_t i = 0; i < n; ++i) b[i] += gw * cfg_.sigma.shape_derivative(u[i]) * mod_[i] * w[i];
    }
    heat_->apply_multiplier(b.data(), w.data(), mult_);
}

namespace {

void check_finite(const std::vector<double>& u, std::size_t n) {
    for (double v : u) {
        if (!std::isfinite(v) || std::abs(v) > 1e100) {
            double mx = 0.0;
            for (double y : u) mx = std::max(mx, std::abs(y));
            throw SolverError("solver instability at step " + std::to_string(n) + " (max|u| = " + std::to_string(mx) + ")");
        }
    }
}

}  // namespace

std::vector<double> march(const Stepper& st, const std::vector<double>& u0, const NoisePath* path, std::size_t n_end,
                          const StepObserver& observe) {
    if (path && path->n_steps < n_end) throw std::invalid_argument("noise path shorter than the requested run");
    if (path && path->m != st.config().noise.m()) throw std::invalid_argument("noise path has the wrong node count");
    std::vector<double> u = u0;
    if (observe) observe(0, u);
    for (std::size_t n = 0; n < n_end; ++n) {
        st.step(u, path ? path->row(n) : nullptr);
        check_finite(u, n + 1);
        if (observe) observe(n + 1, u);
    }
    return u;
}

NoisePath mc_path(const SolverConfig& cfg, std::uint64_t seed, std::uint64_t sample) {
    return sample_path(cfg.noise, cfg.dt, cfg.n_steps, seed, sample);
}

Trajectory solve_path(const Stepper& st, const GridField& u0, const NoisePath* path,
                      const std::vector<std::size_t>& snapshot_steps) {
    std::vector<std::size_t> snaps = snapshot_steps;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    Trajectory tr;
    tr.grid = st.config().grid;
    tr.dt = st.config().dt;
    tr.steps = snaps;
    tr.fields.reserve(snaps.size());
    if (snaps.empty()) return tr;
    std::size_t next = 0;
    march(st, u0.values, path, snaps.back(), [&](std::size_t n, const std::vector<double>& u) {
        if (next < snaps.size() && snaps[next] == n) {
            tr.fields.push_back(u);
            ++next;
        }
    });
    return tr;
}

Trajectory solve_path(const SolverConfig& cfg, const GridField& u0, const NoisePath& path,
                      const std::vector<std::size_t>& snapshot_steps) {
    return solve_path(Stepper(cfg), u0, &path, snapshot_steps);
}

Trajectory solve_full(const Stepper& st, const GridField& u0, const NoisePath* path, std::size_t n_end) {
    std::vector<std::size_t> all(n_end + 1);
    for (std::size_t n = 0; n <= n_end; ++n) all[n] = n;
    return solve_path(st, u0, path, all);
}

std::vector<std::size_t> snapshot_schedule(std::size_t n_steps, std::size_t count, bool include_zero) {
    std::vector<std::size_t> s;
    if (include_zero) s.push_back(0);
    for (std::size_t k = 1; k <= count; ++k) s.push_back(k * n_steps / count);
    return s;
}

// ---------------------------------------------------------------- mild form

ContractionConstants picard_contraction_constants(const SolverConfig& cfg, double beta, double p) {
    if (p != 2.0) throw std::invalid_argument("contraction constants are implemented for p = 2");
    const double T = cfg.T(), e = cfg.eps;
    if (!(e > 0.0)) throw std::invalid_argument("contraction constants need eps > 0");
    // \int_0^T e^{-beta tau} / sqrt(eps tau) d tau, increasing in T, so the sup sits at t = T.
    const double I = beta > 0.0 ? std::sqrt(std::numbers::pi / (e * beta)) * std::erf(std::sqrt(beta * T))
                                : 2.0 * std::sqrt(T / e);
    ContractionConstants c;
    c.delta1 = kappa2(1) * std::pow(2.0 * std::sqrt(T / e), 1.0 - 1.0 / p) * std::pow(I, 1.0 / p);
    // c_2 = 1 (Ito isometry).
    const double J = beta > 0.0 ? (p / (2.0 * beta)) * (1.0 - std::exp(-2.0 * beta * T / p)) : T;
    c.delta2 = kappa1(1) * std::sqrt(J);
    const double sig = sigma_lip_distance(cfg.sigma, SigmaCoeff::none(cfg.noise.m()), cfg.noise, cfg.grid.L);
    c.total = c.delta1 * cfg.flux.lip_norm() + c.delta2 * sig;
    return c;
}

double picard_beta_threshold(const SolverConfig& cfg, double p, double target) {
    if (picard_contraction_constants(cfg, 0.0, p).total <= target) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (picard_contraction_constants(cfg, hi, p).total > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("no contracting beta found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (picard_contraction_constants(cfg, mid, p).total > target ? lo : hi) = mid;
    }
    return hi;
}

PicardResult picard_mild_solve(const SolverConfig& cfg, const GridField& u0, const NoisePath& path, std::size_t n_iter) {
    if (cfg.grid.n > 128 || cfg.n_steps > 256)
        throw std::invalid_argument("picard_mild_solve is restricted to n_x <= 128 and n_steps <= 256");
    const Stepper st(cfg);
    const std::size_t N = cfg.n_steps, n = cfg.grid.n;
    const auto& phi = st.weight_samples();
    const double dx = st.dx();
    std::vector<std::vector<double>> cur(N + 1, std::vector<double>(n, 0.0)), next(N + 1, std::vector<double>(n));
    PicardResult res;
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n_iter; ++k) {
        next[0] = u0.values;
        for (std::size_t j = 0; j < N; ++j) {
            // S(V)(t_{j+1}) = Phi(dt) [S(V)(t_j) - dt D_x f(V_j) + sigma(V_j) dW_j].
            st.bracket(cur[j], path.row(j), b);
            for (std::size_t i = 0; i < n; ++i) b[i] += next[j][i] - cur[j][i];
            st.heat().apply_multiplier(b.data(), next[j + 1].data(), st.heat().multiplier(cfg.eps * cfg.dt));
        }
        std::vector<double> d(N + 1);
        for (std::size_t j = 0; j <= N; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = next[j][i] - cur[j][i];
                s += e * e * phi[i];
            }
            d[j] = s * dx;
        }
        res.diff_sq.push_back(std::move(d));
        std::swap(cur, next);
    }
    res.final_iterate.grid = cfg.grid;
    res.final_iterate.dt = cfg.dt;
    for (std::size_t j = 0; j <= N; ++j) {
        res.final_iterate.steps.push_back(j);
        res.final_iterate.fields.push_back(cur[j]);
    }
    return res;
}

PicardHistory picard_contraction_history(const SolverConfig& cfg, const GridField& u0, std::size_t n_mc,
                                         std::uint64_t seed, std::size_t n_iter, double beta) {
    std::vector<std::vector<std::vector<double>>> per(n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(cfg, seed, s);
        per[s] = picard_mild_solve(cfg, u0, path, n_iter).diff_sq;
    });
    PicardHistory h;
    h.beta = beta;
    const std::size_t N = cfg.n_steps;
    std::vector<double> col(n_mc);
    for (std::size_t k = 0; k < n_iter; ++k) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= N; ++j) {
            for (std::size_t s = 0; s < n_mc; ++s) col[s] = per[s][k][j];
            const double mean = pairwise_sum(col) / static_cast<double>(n_mc);
            if (mean > 0.0) best = std::max(best, std::log(mean) - beta * cfg.dt * static_cast<double>(j));
        }
        h.distance.push_back(0.5 * best);  // log of the beta-norm
    }
    for (std::size_t k = 0; k + 1 < h.distance.size(); ++k) h.ratio.push_back(std::exp(h.distance[k + 1] - h.distance[k]));
    for (double& d : h.distance) d = std::exp(d);
    return h;
}

// ---------------------------------------------------------------- diagnostics

std::vector<std::vector<CurvePoint>> lp_moment_curves(const SolverConfig& cfg, const GridField& u0,
                                                      const std::vector<double>& ps, std::size_t n_mc,
                                                      std::uint64_t seed, const std::vector<std::size_t>& snaps) {
    const Stepper st(cfg);
    const std::size_t S = snaps.size(), P = ps.size();
    std::vector<double> vals(P * S * n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(cfg, seed, s);
        const Trajectory tr = solve_path(st, u0, &path, snaps);
        for (std::size_t q = 0; q < P; ++q)
            for (std::size_t j = 0; j < S; ++j)
                vals[(q * S + j) * n_mc + s] = weighted_lp_norm_pow(tr.at_step(snaps[j]), ps[q], st.weight_samples(), st.dx());
    });
    std::vector<std::vector<CurvePoint>> out(P, std::vector<CurvePoint>(S));
    for (std::size_t q = 0; q < P; ++q)
        for (std::size_t j = 0; j < S; ++j) {
            out[q][j].t = cfg.dt * static_cast<double>(snaps[j]);
            out[q][j].est = estimate(std::span<const double>(vals.data() + (q * S + j) * n_mc, n_mc));
        }
    return out;
}

std::vector<CurvePoint> lp_moment_curve(const SolverConfig& cfg, const GridField& u0, double p, std::size_t n_mc,
                                        std::uint64_t seed, const std::vector<std::size_t>& snaps) {
    return lp_moment_curves(cfg, u0, {p}, n_mc, seed, snaps).front();
}

std::vector<CurvePoint> spatial_derivative_bound(const SolverConfig& cfg, const GridField& u0, std::size_t n_mc,
                                                 std::uint64_t seed, const std::vector<std::size_t>& snaps) {
    const Stepper st(cfg);
    const std::size_t S = snaps.size(), n = cfg.grid.n;
    std::vector<double> vals(S * n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(cfg, seed, s);
        const Trajectory tr = solve_path(st, u0, &path, snaps);
        std::vector<double> du(n);
        for (std::size_t j = 0; j < S; ++j) {
            const auto& u = tr.at_step(snaps[j]);
            for (std::size_t i = 0; i < n; ++i) du[i] = (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * st.dx());
            vals[j * n_mc + s] = weighted_lp_norm_pow(du, 2.0, st.weight_samples(), st.dx());
        }
    });
    std::vector<CurvePoint> out(S);
    for (std::size_t j = 0; j < S; ++j) {
        out[j].t = cfg.dt * static_cast<double>(snaps[j]);
        out[j].est = estimate(std::span<const double>(vals.data() + j * n_mc, n_mc));
    }
    return out;
}

DependenceProbe continuous_dependence_probe(const SolverConfig& cfg1, const SolverConfig& cfg2, const GridField& u0_1,
                                            const GridField& u0_2, std::size_t n_mc, std::uint64_t seed, double p,
                                            double beta, const std::vector<std::size_t>& snaps) {
    if (!(cfg1.grid == cfg2.grid) || cfg1.eps != cfg2.eps || cfg1.dt != cfg2.dt)
        throw std::invalid_argument("continuous_dependence_probe: configurations must share grid, eps and dt");
    const Stepper s1(cfg1), s2(cfg2);
    const std::size_t S = snaps.size();
    std::vector<double> dist(S * n_mc), norm1(S * n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(cfg1, seed, s);
        const Trajectory a = solve_path(s1, u0_1, &path, snaps);
        const Trajectory b = solve_path(s2, u0_2, &path, snaps);
        std::vector<double> d(cfg1.grid.n);
        for (std::size_t j = 0; j < S; ++j) {
            const auto& ua = a.at_step(snaps[j]);
            const auto& ub = b.at_step(snaps[j]);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = ua[i] - ub[i];
            dist[j * n_mc + s] = weighted_lp_norm_pow(d, p, s1.weight_samples(), s1.dx());
            norm1[j * n_mc + s] = weighted_lp_norm_pow(ua, p, s1.weight_samples(), s1.dx());
        }
    });
    auto beta_norm = [&](const std::vector<double>& v) {
        double best = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
            const double mean = pairwise_sum(std::span<const double>(v.data() + j * n_mc, n_mc)) / static_cast<double>(n_mc);
            best = std::max(best, std::exp(-beta * cfg1.dt * static_cast<double>(snaps[j])) * mean);
        }
        return std::pow(best, 1.0 / p);
    };
    DependenceProbe out;
    out.lhs = beta_norm(dist);
    const double u1 = beta_norm(norm1);
    std::vector<double> d0(cfg1.grid.n);
    for (std::size_t i = 0; i < d0.size(); ++i) d0[i] = u0_1[i] - u0_2[i];
    out.initial_term = weighted_lp_norm(d0, p, s1.weight_samples(), s1.dx());
    out.flux_term = flux_lip_distance(cfg1.flux, cfg2.flux) * u1;
    out.sigma_term = sigma_lip_distance(cfg1.sigma, cfg2.sigma, cfg1.noise, cfg1.grid.L) * (cfg1.weight.l1_norm() + u1);
    return out;
}

}  // namespace stochcl

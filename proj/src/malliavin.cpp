#include "stochcl/malliavin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stochcl/parallel.hpp"

namespace stochcl {

std::vector<double> TangentField::at_step(std::size_t n) const {
    if (!born || n < r_index) return std::vector<double>(w.grid.n, 0.0);
    return w.at_step(n);
}

Trajectory solve_tangent_profile(const Stepper& st, const Trajectory& base, const NoisePath& path, std::size_t r_index,
                                 const std::vector<double>& profile, std::size_t n_end) {
    Trajectory tr;
    tr.grid = st.config().grid;
    tr.dt = st.config().dt;
    if (r_index > n_end) return tr;
    std::vector<double> w = profile;
    tr.steps.push_back(r_index);
    tr.fields.push_back(w);
    for (std::size_t n = r_index; n < n_end; ++n) {
        if (n == r_index) {
            // The increment at step r enters only through sigma(u_r) dW_r.
            st.heat().apply_multiplier(w.data(), w.data(), st.heat().multiplier(st.config().eps * st.config().dt));
        } else {
            st.tangent_step(base.at_step(n), w, path.row(n));
        }
        for (double v : w)
            if (!std::isfinite(v)) throw SolverError("tangent instability at step " + std::to_string(n + 1));
        tr.steps.push_back(n + 1);
        tr.fields.push_back(w);
    }
    return tr;
}

TangentField solve_tangent(const Stepper& st, const Trajectory& base, const NoisePath& path, std::size_t r_index,
                           std::size_t k, std::size_t n_end) {
    TangentField tf;
    tf.r_index = r_index;
    tf.k = k;
    tf.w.grid = st.config().grid;
    tf.w.dt = st.config().dt;
    if (k >= st.config().noise.m()) throw std::out_of_range("tangent node index out of range");
    // Born only if the increment at r influences something up to n_end.
    if (r_index >= n_end) return tf;
    const auto& ur = base.at_step(r_index);
    std::vector<double> prof(ur.size());
    for (std::size_t i = 0; i < ur.size(); ++i) prof[i] = st.sigma_at(i, ur[i], k);
    tf.w = solve_tangent_profile(st, base, path, r_index, prof, n_end);
    tf.born = true;
    return tf;
}

double default_fd_step(const SolverConfig& cfg, std::size_t k) {
    return std::sqrt(std::numeric_limits<double>::epsilon()) * std::sqrt(cfg.dt * cfg.noise.mu.at(k));
}

std::vector<double> fd_malliavin_oracle(const Stepper& st, const GridField& u0, const NoisePath& path,
                                        std::size_t r_index, std::size_t k, double eps_fd, std::size_t n_end,
                                        bool two_sided) {
    if (r_index >= n_end) return std::vector<double>(u0.size(), 0.0);
    const NoisePath plus = shift_path(path, r_index, k, eps_fd);
    const auto up = march(st, u0.values, &plus, n_end);
    std::vector<double> out(up.size());
    if (two_sided) {
        const NoisePath minus = shift_path(path, r_index, k, -eps_fd);
        const auto um = march(st, u0.values, &minus, n_end);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (up[i] - um[i]) / (2.0 * eps_fd);
    } else {
        const auto u = march(st, u0.values, &path, n_end);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (up[i] - u[i]) / eps_fd;
    }
    return out;
}

double relative_l2_phi(const std::vector<double>& a, const std::vector<double>& b, const Stepper& st) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double nb = weighted_lp_norm(b, 2.0, st.weight_samples(), st.dx());
    const double nd = weighted_lp_norm(d, 2.0, st.weight_samples(), st.dx());
    if (nb == 0.0) return nd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return nd / nb;
}

// ---------------------------------------------------------------- smooth random variables

SmoothRV SmoothRV::constant(double c) {
    SmoothRV v;
    v.f_ = [c](std::span<const double>) { return c; };
    v.grad_ = [](std::span<const double>, std::span<double>) {};
    return v;
}

SmoothRV SmoothRV::general(Outer f, OuterGrad grad, std::vector<std::vector<double>> dirs, std::size_t n_steps,
                           std::size_t m) {
    for (const auto& h : dirs)
        if (h.size() != n_steps * m) throw std::invalid_argument("direction size does not match the cell grid");
    SmoothRV v;
    v.f_ = std::move(f);
    v.grad_ = std::move(grad);
    v.dirs_ = std::move(dirs);
    v.n_steps_ = n_steps;
    v.m_ = m;
    return v;
}

SmoothRV SmoothRV::linear(std::vector<double> h, std::size_t n_steps, std::size_t m) {
    return general([](std::span<const double> w) { return w[0]; },
                   [](std::span<const double>, std::span<double> g) { g[0] = 1.0; }, {std::move(h)}, n_steps, m);
}

SmoothRV SmoothRV::composed(std::function<double(double)> g, std::function<double(double)> g_prime,
                            std::vector<double> h, std::size_t n_steps, std::size_t m) {
    return general([g](std::span<const double> w) { return g(w[0]); },
                   [g_prime](std::span<const double> w, std::span<double> out) { out[0] = g_prime(w[0]); },
                   {std::move(h)}, n_steps, m);
}

SmoothRV::Eval SmoothRV::evaluate(const NoisePath& path) const {
    Eval e;
    if (!dirs_.empty() && (path.n_steps < n_steps_ || path.m != m_))
        throw std::invalid_argument("noise path does not cover the smooth variable's cells");
    e.W.resize(dirs_.size());
    for (std::size_t i = 0; i < dirs_.size(); ++i) {
        double s = 0.0;
        const auto& h = dirs_[i];
        for (std::size_t c = 0; c < h.size(); ++c) s += h[c] * path.increments[c];
        e.W[i] = s;
    }
    e.value = f_(e.W);
    e.grad.assign(dirs_.size(), 0.0);
    grad_(e.W, e.grad);
    return e;
}

double SmoothRV::derivative(const Eval& e, std::size_t n, std::size_t k) const {
    if (n >= n_steps_) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < dirs_.size(); ++i) s += e.grad[i] * dirs_[i][n * m_ + k];
    return s;
}

std::vector<double> SmoothRV::derivative_field(const Eval& e) const {
    std::vector<double> d(n_steps_ * m_, 0.0);
    for (std::size_t i = 0; i < dirs_.size(); ++i)
        for (std::size_t c = 0; c < d.size(); ++c) d[c] += e.grad[i] * dirs_[i][c];
    return d;
}

SmoothRV SmoothRV::perturbed(const std::vector<double>& delta_h, double eta) const {
    SmoothRV v = *this;
    for (auto& h : v.dirs_) {
        if (delta_h.size() != h.size()) throw std::invalid_argument("perturbation size mismatch");
        for (std::size_t c = 0; c < h.size(); ++c) h[c] += eta * delta_h[c];
    }
    return v;
}

double h_inner(const std::vector<double>& a, const std::vector<double>& b, double dt, const NoiseSpace& space) {
    const std::size_t m = space.m();
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c] * space.mu[c % m];
    return s * dt;
}

// ---------------------------------------------------------------- weak time continuity

std::vector<double> shifted_mollifier_weights(std::size_t r0_steps) {
    if (r0_steps == 0) throw std::invalid_argument("r0 smaller than dt");
    const Mollifier J(static_cast<double>(r0_steps), true);
    std::vector<double> w(2 * r0_steps + 1);
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += (w[j] = J(static_cast<double>(j)));
    for (double& x : w) x /= s;
    return w;
}

namespace {

NoisePath antithetic_after(const NoisePath& p, std::size_t r) {
    NoisePath q = p;
    for (std::size_t c = r * p.m; c < q.increments.size(); ++c) q.increments[c] = -q.increments[c];
    return q;
}

}  // namespace

WeakContinuityResult weak_time_continuity_stat(const SolverConfig& cfg, const GridField& u0,
                                               const WeakContinuityOptions& opt) {
    const std::size_t m = cfg.noise.m(), n = cfg.grid.n, R = opt.r0_steps.size();
    if (opt.psi.size() != m) throw std::invalid_argument("psi needs one field per noise node");
    std::size_t span = 0;
    for (std::size_t r0 : opt.r0_steps) {
        if (r0 == 0) throw std::invalid_argument("r0 smaller than dt");
        span = std::max(span, 2 * r0);
    }
    const std::size_t r = opt.r_index, n_end = r + span;
    if (n_end > cfg.n_steps) throw std::invalid_argument("r + 2 r0 exceeds the horizon");
    const Stepper st(cfg);
    const double dx = st.dx();
    const auto phi = opt.weight.sample(cfg.grid);
    std::vector<std::vector<double>> omega;
    for (std::size_t r0 : opt.r0_steps) omega.push_back(shifted_mollifier_weights(r0));

    // a_j = sum_k mu_k <w_k(r + j) - sigma_k(u_r), psi_k phi>
    auto pairing = [&](const NoisePath& path) {
        const auto base = solve_path(st, u0, &path, [&] {
            std::vector<std::size_t> s;
            for (std::size_t j = r; j <= n_end; ++j) s.push_back(j);
            return s;
        }());
        std::vector<double> a(span + 1, 0.0);
        const auto& ur = base.at_step(r);
        for (std::size_t k = 0; k < m; ++k) {
            const TangentField tf = solve_tangent(st, base, path, r, k, n_end);
            for (std::size_t j = 0; j <= span; ++j) {
                const auto& w = tf.w.at_step(r + j);
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += (w[i] - st.sigma_at(i, ur[i], k)) * opt.psi[k][i] * phi[i];
                a[j] += cfg.noise.mu[k] * s * dx;
            }
        }
        return a;
    };

    std::vector<double> vals(R * opt.n_mc);
    parallel_for(opt.n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(cfg, opt.seed, s);
        const auto a1 = pairing(path);
        const auto a2 = pairing(antithetic_after(path, r));
        for (std::size_t q = 0; q < R; ++q) {
            double t = 0.0;
            for (std::size_t j = 0; j < omega[q].size(); ++j) t += omega[q][j] * 0.5 * (a1[j] + a2[j]);
            vals[q * opt.n_mc + s] = t;
        }
    });

    WeakContinuityResult res;
    res.r0_steps = opt.r0_steps;
    for (std::size_t q = 0; q < R; ++q)
        res.stat.push_back(estimate(std::span<const double>(vals.data() + q * opt.n_mc, opt.n_mc)));
    for (std::size_t q = 0; q + 1 < R; ++q) {
        // Paired difference of magnitudes, using the sign of each mean.
        const double s0 = res.stat[q].mean >= 0 ? 1.0 : -1.0, s1 = res.stat[q + 1].mean >= 0 ? 1.0 : -1.0;
        std::vector<double> d(opt.n_mc);
        for (std::size_t s = 0; s < opt.n_mc; ++s) d[s] = s0 * vals[q * opt.n_mc + s] - s1 * vals[(q + 1) * opt.n_mc + s];
        res.decrement.push_back(estimate(d));
    }

    double psi2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) psi2 += cfg.noise.mu[k] * weighted_lp_norm_pow(opt.psi[k], 2.0, phi, dx);
    res.psi_norm = std::sqrt(psi2);

    if (opt.n_bound > 0) {
        const auto snaps = [&] {
            std::vector<std::size_t> s{r};
            for (std::size_t j = 1; j <= opt.bound_snapshots; ++j)
                s.push_back(r + j * (cfg.n_steps - r) / opt.bound_snapshots);
            return s;
        }();
        std::vector<double> tang(snaps.size() * opt.n_bound), base(opt.n_bound);
        parallel_for(opt.n_bound, [&](std::size_t s) {
            // Independent stream block so the bound does not reuse the statistic's paths.
            const NoisePath path = mc_path(cfg, opt.seed ^ 0x5bd1e995u, s);
            const Trajectory full = solve_full(st, u0, &path, cfg.n_steps);
            const auto& ur = full.at_step(r);
            std::vector<double> one(n);
            for (std::size_t i = 0; i < n; ++i) one[i] = 1.0 + std::abs(ur[i]);
            base[s] = weighted_lp_norm_pow(one, 2.0, phi, dx);
            for (std::size_t k = 0; k < m; ++k) {
                const TangentField tf = solve_tangent(st, full, path, r, k, cfg.n_steps);
                for (std::size_t j = 0; j < snaps.size(); ++j)
                    tang[j * opt.n_bound + s] += cfg.noise.mu[k] * weighted_lp_norm_pow(tf.w.at_step(snaps[j]), 2.0, phi, dx);
            }
        });
        double sup = 0.0;
        for (std::size_t j = 0; j < snaps.size(); ++j)
            sup = std::max(sup, estimate(std::span<const double>(tang.data() + j * opt.n_bound, opt.n_bound)).mean);
        res.tangent_sup = std::sqrt(sup);
        res.base_term = cfg.sigma.lip_norm(cfg.noise) * std::sqrt(estimate(base).mean);
        res.constant = res.tangent_sup + res.base_term;
    }
    return res;
}

}  // namespace stochcl

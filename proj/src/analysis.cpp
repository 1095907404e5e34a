#include "stochcl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochcl/initial_data.hpp"
#include "stochcl/malliavin.hpp"
#include "stochcl/parallel.hpp"

namespace stochcl {

std::uint64_t combine_path_hashes(const std::vector<std::uint64_t>& h) {
    std::uint64_t acc = 1469598103934665603ull;
    for (std::uint64_t x : h)
        for (int b = 0; b < 8; ++b) {
            acc ^= (x >> (8 * b)) & 0xffu;
            acc *= 1099511628211ull;
        }
    return acc;
}

double numerical_viscosity(const SolverConfig& cfg) { return 0.5 * cfg.flux.lip_norm() * cfg.grid.dx(); }

namespace {

double weighted_l1_distance(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& phi,
                            double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]) * phi[i];
    return s * dx;
}

std::vector<double> column(const std::vector<double>& vals, std::size_t q, std::size_t n) {
    return std::vector<double>(vals.begin() + q * n, vals.begin() + (q + 1) * n);
}

void require_finite(const std::vector<double>& u, std::size_t n) {
    for (double v : u)
        if (!std::isfinite(v) || std::abs(v) > 1e100) throw SolverError("solver instability at step " + std::to_string(n));
}

}  // namespace

// ---------------------------------------------------------------- L1 contraction

bool ContractionCurve::nonincreasing() const {
    for (std::size_t j = 0; j < increment.size(); ++j)
        if (increment[j].mean > tol[j]) return false;
    return true;
}

ContractionBudget contraction_tolerance() {
    ContractionBudget b;
    b.c1 = 0.0;
    b.c2 = 0.0;
    return b;
}

ContractionCurve l1_contraction_curve(const SolverConfig& cfg, const GridField& u0, const GridField& v0,
                                      std::size_t n_mc, std::uint64_t seed, const std::vector<std::size_t>& snaps) {
    std::vector<std::size_t> steps{0};
    for (std::size_t s : snaps)
        if (s > 0) steps.push_back(s);
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    const Stepper st(cfg);
    const auto& phi = st.weight_samples();
    const std::size_t J = steps.size();
    std::vector<double> vals(J * n_mc);
    std::vector<std::uint64_t> hu(n_mc), hv(n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        // Each solution draws its own copy of the stream; the hashes certify the coupling.
        const NoisePath pu = mc_path(cfg, seed, s);
        const NoisePath pv = mc_path(cfg, seed, s);
        hu[s] = pu.hash();
        hv[s] = pv.hash();
        const Trajectory tu = solve_path(st, u0, &pu, steps);
        const Trajectory tv = solve_path(st, v0, &pv, steps);
        for (std::size_t j = 0; j < J; ++j) vals[j * n_mc + s] = weighted_l1_distance(tu.fields[j], tv.fields[j], phi, st.dx());
    });
    ContractionCurve c;
    c.path_hash_u = combine_path_hashes(hu);
    c.path_hash_v = combine_path_hashes(hv);
    const auto budget = contraction_tolerance();
    for (std::size_t j = 0; j < J; ++j) {
        c.t.push_back(steps[j] * cfg.dt);
        c.distance.push_back(estimate(column(vals, j, n_mc)));
        if (j == 0) continue;
        std::vector<double> d(n_mc);
        for (std::size_t s = 0; s < n_mc; ++s) d[s] = vals[j * n_mc + s] - vals[(j - 1) * n_mc + s];
        c.increment.push_back(estimate(d));
        c.tol.push_back(budget(st.dx(), cfg.dt, c.t.back(), c.increment.back().se));
    }
    return c;
}

// ---------------------------------------------------------------- Kato

KatoResult kato_check(const SolverConfig& cfg, const GridField& u0, const GridField& v0, const TestFunction& psi,
                      std::size_t t0_steps, std::size_t n_mc, std::uint64_t seed) {
    if (t0_steps == 0 || t0_steps > cfg.n_steps) throw std::invalid_argument("t0 outside (0, T]");
    const Stepper st(cfg);
    const double dx = st.dx(), dt = cfg.dt, nu = cfg.eps + numerical_viscosity(cfg);
    std::vector<double> lhs(n_mc), flux(n_mc), visc(n_mc);
    double init = 0.0;
    for (std::size_t i = psi.lo; i < psi.hi; ++i) init += std::abs(u0[i] - v0[i]) * psi.chi[i];
    init *= dx;
    std::vector<std::uint64_t> hu(n_mc), hv(n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath pu = mc_path(cfg, seed, s);
        const NoisePath pv = mc_path(cfg, seed, s);
        hu[s] = pu.hash();
        hv[s] = pv.hash();
        std::vector<double> u = u0.values, v = v0.values;
        double fl = 0.0, vi = 0.0;
        for (std::size_t n = 0; n < t0_steps; ++n) {
            for (std::size_t i = psi.lo; i < psi.hi; ++i) {
                const double d = u[i] - v[i];
                const double sg = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
                fl += sg * (cfg.flux(u[i]) - cfg.flux(v[i])) * psi.chi_x[i];
                vi += std::abs(d) * std::abs(psi.chi_xx[i]);
            }
            st.step(u, pu.row(n));
            st.step(v, pv.row(n));
            require_finite(u, n + 1);
            require_finite(v, n + 1);
        }
        double l = 0.0;
        for (std::size_t i = psi.lo; i < psi.hi; ++i) l += std::abs(u[i] - v[i]) * psi.chi[i];
        lhs[s] = l * dx;
        flux[s] = fl * dt * dx;
        visc[s] = nu * vi * dt * dx;
    });
    KatoResult r;
    r.path_hash_u = combine_path_hashes(hu);
    r.path_hash_v = combine_path_hashes(hv);
    r.lhs = estimate(lhs);
    r.flux = estimate(flux);
    r.viscous = estimate(visc);
    r.initial.mean = init;
    r.initial.n = n_mc;
    std::vector<double> gap(n_mc);
    for (std::size_t s = 0; s < n_mc; ++s) gap[s] = lhs[s] - init - flux[s];
    r.gap = estimate(gap);
    r.tol = r.viscous.mean + 3.0 * r.gap.se;
    return r;
}

// ---------------------------------------------------------------- doubling

void DoublingParams::validate(const SolverConfig& cfg) const {
    if (r0_steps == 0) throw std::invalid_argument("r0 smaller than dt");
    if (2 * r0_steps >= t0_steps) throw std::invalid_argument("doubling needs 2 r0 < t0");
    if (gamma_steps == 0 || t0_steps + 2 * gamma_steps > cfg.n_steps)
        throw std::invalid_argument("doubling needs 0 < gamma and t0 + 2 gamma <= T");
    if (r < 2.0 * cfg.grid.dx()) throw std::invalid_argument("doubling needs r >= 2 dx");
    if (!(delta > 0.0)) throw std::invalid_argument("doubling needs delta > 0");
    if (!(eps_ratio > 0.0 && eps_ratio <= 1.0)) throw std::invalid_argument("proxy viscosity ratio outside (0, 1]");
    if (std::abs(psi_x0) + psi_width + 2.0 * r >= cfg.grid.L) throw std::invalid_argument("psi support leaves the torus");
}

double coupled_delta(double r, double eta) { return std::pow(r, 1.0 + eta); }

namespace {

struct Entry {
    std::uint32_t i, j;
    double K, Kx, Ky, Kxx, Kyy;
};

// Spatial factor psi((x+y)/2) J_r((x-y)/2) / 2 and its derivatives on the grid pairs it touches.
std::vector<Entry> doubling_entries(const Grid& g, const DoublingParams& p) {
    const Mollifier J(p.r);
    const double dx = g.dx(), w = p.psi_width;
    const auto D = static_cast<std::ptrdiff_t>(std::ceil(2.0 * p.r / dx));
    std::vector<Entry> out;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::ptrdiff_t d = -D; d <= D; ++d) {
            const double z = 0.5 * d * dx;
            const double xm = g.x(i) - z;
            const double s = (xm - p.psi_x0) / w;
            if (std::abs(s) >= 1.0 || std::abs(z) >= p.r) continue;
            const double ps = Mollifier::bump(s), ps1 = Mollifier::bump_derivative(s) / w,
                         ps2 = Mollifier::bump_second_derivative(s) / (w * w);
            const double j0 = J(z), j1 = J.derivative(z), j2 = J.second_derivative(z);
            Entry e;
            e.i = static_cast<std::uint32_t>(i);
            e.j = static_cast<std::uint32_t>(wrap(static_cast<std::ptrdiff_t>(i) - d, g.n));
            e.K = 0.5 * ps * j0;
            e.Kx = 0.25 * (ps1 * j0 + ps * j1);
            e.Ky = 0.25 * (ps1 * j0 - ps * j1);
            e.Kxx = 0.125 * (ps2 * j0 + 2.0 * ps1 * j1 + ps * j2);
            e.Kyy = 0.125 * (ps2 * j0 - 2.0 * ps1 * j1 + ps * j2);
            if (e.K == 0.0 && e.Kx == 0.0 && e.Kxx == 0.0) continue;
            out.push_back(e);
        }
    return out;
}

}  // namespace

DoublingTerms doubling_terms(const SolverConfig& cfg, const GridField& u0, const GridField& v0,
                             const DoublingParams& p, std::size_t n_mc, std::uint64_t seed) {
    p.validate(cfg);
    SolverConfig cfg_v = cfg;
    cfg_v.eps = p.eps_ratio * cfg.eps;
    const Stepper st(cfg), st_v(cfg_v);
    const std::size_t m = cfg.noise.m(), t0 = p.t0_steps, n_end = t0 + 2 * p.gamma_steps;
    const double dx = st.dx(), dt = cfg.dt, nu = numerical_viscosity(cfg);
    const auto entries = doubling_entries(cfg.grid, p);
    const auto omega = shifted_mollifier_weights(p.r0_steps);
    const auto omega_g = shifted_mollifier_weights(p.gamma_steps);
    const EntropyPair pair = EntropyPair::s_delta(p.delta, cfg.flux);

    // xi(t_n) and its derivative on steps 0..n_end.
    std::vector<double> xi(n_end + 1, 1.0), xi_t(n_end + 1, 0.0);
    {
        double acc = 0.0;
        for (std::size_t n = t0; n <= n_end; ++n) {
            acc += omega_g[n - t0];
            xi[n] = std::max(0.0, 1.0 - acc);
            xi_t[n] = -omega_g[n - t0] / dt;
        }
    }
    // Outer s nodes: stride s_stride in the bulk, every step near t0.
    std::vector<std::size_t> nodes;
    const std::size_t dense_from = t0 > 2 * p.r0_steps + p.s_stride ? t0 - 2 * p.r0_steps - p.s_stride : 0;
    for (std::size_t s = 0; s < dense_from; s += std::max<std::size_t>(1, p.s_stride)) nodes.push_back(s);
    for (std::size_t s = nodes.empty() ? 0 : std::max(dense_from, nodes.back() + 1); s < n_end; ++s) nodes.push_back(s);
    std::vector<double> node_w(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q)
        node_w[q] = ((q + 1 < nodes.size() ? nodes[q + 1] : n_end) - nodes[q]) * dt;

    enum { L_, R_, F_, T1_, T2_, T3_, T3V_, NUM_, NT };
    std::vector<double> vals(NT * n_mc, 0.0);
    std::vector<std::uint64_t> hu(n_mc), hv(n_mc);
    const std::size_t span = 2 * p.r0_steps;

    parallel_for(n_mc, [&](std::size_t smp) {
        const NoisePath pu = mc_path(cfg, seed, smp);
        const NoisePath pv = mc_path(cfg_v, seed, smp);
        hu[smp] = pu.hash();
        hv[smp] = pv.hash();
        const Trajectory tu = solve_full(st, u0, &pu, n_end);
        const Trajectory tv = solve_full(st_v, v0, &pv, n_end);
        double acc[NT] = {0, 0, 0, 0, 0, 0, 0, 0};

        for (std::size_t j = 1; j < span; ++j) {
            const auto& u = tu.fields[j];
            double s = 0.0;
            for (const Entry& e : entries) s += pair.S(v0[e.j] - u[e.i]) * e.K;
            acc[L_] += omega[j] * xi[j] * s;
        }

        std::vector<TangentField> tang(m);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const std::size_t s = nodes[q];
            const std::size_t last = std::min(s + span - 1, n_end);
            if (st.has_noise())
                for (std::size_t k = 0; k < m; ++k) tang[k] = solve_tangent(st, tu, pu, s, k, last);
            const auto& v = tv.fields[s];
            for (std::size_t jt = 1; jt < span; ++jt) {
                const std::size_t t = s + jt;
                if (t >= n_end) break;
                const double wgt = node_w[q] * omega[jt];
                const auto& u = tu.fields[t];
                const double x = xi[t], xp = xi_t[t];
                double a[NT] = {0, 0, 0, 0, 0, 0, 0, 0};
                std::vector<const std::vector<double>*> Dw(m, nullptr);
                if (st.has_noise())
                    for (std::size_t k = 0; k < m; ++k) Dw[k] = &tang[k].w.at_step(t);
                for (const Entry& e : entries) {
                    const double uu = u[e.i], vv = v[e.j], y = vv - uu;
                    const double S = pair.S(y);
                    a[R_] -= S * e.K * xp;
                    a[F_] -= (pair.q_fast(uu, vv) * e.Kx + pair.q_fast(vv, uu) * e.Ky) * x;
                    a[T3_] -= cfg.eps * S * e.Kxx * x;
                    a[T3V_] -= cfg_v.eps * S * e.Kyy * x;
                    a[NUM_] += nu * S * (std::abs(e.Kxx) + std::abs(e.Kyy)) * x;
                    if (!st.has_noise()) continue;
                    const double S2 = pair.d2S(y);
                    if (S2 == 0.0) continue;
                    double t1 = 0.0, t2 = 0.0;
                    for (std::size_t k = 0; k < m; ++k) {
                        const double su = st.sigma_at(e.i, uu, k), sv = st_v.sigma_at(e.j, vv, k);
                        t1 += cfg.noise.mu[k] * (sv - su) * (sv - su);
                        t2 += cfg.noise.mu[k] * ((*Dw[k])[e.i] - su) * sv;
                    }
                    a[T1_] -= 0.5 * S2 * t1 * e.K * x;
                    a[T2_] += S2 * t2 * e.K * x;
                }
                for (int c = R_; c < NT; ++c) acc[c] += wgt * a[c];
            }
        }
        for (int c = 0; c < NT; ++c) vals[c * n_mc + smp] = acc[c] * dx * dx;
    });

    DoublingTerms out;
    out.path_hash_u = combine_path_hashes(hu);
    out.path_hash_v = combine_path_hashes(hv);
    Estimate* dst[NT] = {&out.L, &out.R, &out.F, &out.T1, &out.T2, &out.T3, &out.T3_proxy, &out.numerical};
    for (int c = 0; c < NT; ++c) *dst[c] = estimate(column(vals, c, n_mc));
    std::vector<double> gap(n_mc);
    for (std::size_t s = 0; s < n_mc; ++s) {
        double rhs = 0.0;
        for (int c = R_; c <= T3_; ++c) rhs += vals[c * n_mc + s];
        gap[s] = vals[L_ * n_mc + s] - rhs;
    }
    out.gap = estimate(gap);
    out.tol = std::abs(out.T3_proxy.mean) + out.numerical.mean + 3.0 * out.gap.se;
    return out;
}

// ---------------------------------------------------------------- fractional BV

double bv_modulus(const std::vector<double>& u, const std::vector<double>& phi, double dx, double r) {
    if (r < 2.0 * dx) throw std::invalid_argument("modulus needs r >= 2 dx");
    const Mollifier J(r);
    const auto D = static_cast<std::ptrdiff_t>(std::floor(r / dx));
    const std::size_t n = u.size();
    std::vector<double> w;
    double norm = 0.0;
    for (std::ptrdiff_t d = -D; d <= D; ++d) {
        w.push_back(J(d * dx));
        norm += w.back();
    }
    double total = 0.0;
    for (std::ptrdiff_t d = -D; d <= D; ++d) {
        const double wd = w[static_cast<std::size_t>(d + D)] / norm;
        if (wd == 0.0 || d == 0) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<std::ptrdiff_t>(i);
            s += std::abs(u[wrap(ii + d, n)] - u[wrap(ii - d, n)]) * phi[i];
        }
        total += wd * s * dx;
    }
    return total;
}

double frac_bv_constant(const SolverConfig& cfg) {
    const double a = cfg.weight.c_phi() * cfg.flux.lip_norm() * cfg.T();
    return 1.0 + a * std::exp(a);
}

double FracBvResult::required_cprime() const {
    double c = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q)
        c = std::max(c, (excess[q].mean + 3.0 * excess[q].se) / std::pow(r[q], kappa));
    return c;
}

FracBvResult fractional_bv_study(const SolverConfig& cfg, const GridField& u0, const std::vector<double>& r_list,
                                 std::size_t n_mc, std::uint64_t seed) {
    const Stepper st(cfg);
    const auto& phi = st.weight_samples();
    const std::size_t R = r_list.size();
    FracBvResult res;
    res.r = r_list;
    res.C = frac_bv_constant(cfg);
    res.kappa = cfg.sigma.kappa();
    std::vector<double> init(R);
    for (std::size_t q = 0; q < R; ++q) init[q] = bv_modulus(u0.values, phi, st.dx(), r_list[q]);
    std::vector<double> vals(R * n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(cfg, seed, s);
        const auto u = march(st, u0.values, &path, cfg.n_steps);
        for (std::size_t q = 0; q < R; ++q) vals[q * n_mc + s] = bv_modulus(u, phi, st.dx(), r_list[q]);
    });
    for (std::size_t q = 0; q < R; ++q) {
        Estimate e;
        e.mean = init[q];
        e.n = n_mc;
        res.initial.push_back(e);
        res.final.push_back(estimate(column(vals, q, n_mc)));
        std::vector<double> ex(n_mc);
        for (std::size_t s = 0; s < n_mc; ++s) ex[s] = vals[q * n_mc + s] - res.C * init[q];
        res.excess.push_back(estimate(ex));
    }
    // Weighted least squares of the part of the excess the bound must absorb, A r^kappa ~ max(excess, 0),
    // applied per path so the SE is honest.
    std::vector<double> c(R);
    double den = 0.0;
    for (std::size_t q = 0; q < R; ++q) {
        res.ratio.push_back(res.final[q].mean / init[q]);
        const double se = std::max(res.excess[q].se, 1e-12);
        const double rk = std::pow(r_list[q], res.kappa);
        c[q] = rk / (se * se);
        den += rk * rk / (se * se);
    }
    std::vector<double> A(n_mc, 0.0);
    for (std::size_t s = 0; s < n_mc; ++s)
        for (std::size_t q = 0; q < R; ++q) A[s] += c[q] / den * std::max(vals[q * n_mc + s] - res.C * init[q], 0.0);
    res.amplitude = estimate(A);
    std::vector<double> lr, le;
    for (std::size_t q = 0; q < R; ++q)
        if (res.excess[q].mean > 0) {
            lr.push_back(r_list[q]);
            le.push_back(res.excess[q].mean);
        }
    if (lr.size() >= 2) res.excess_loglog = loglog_fit(lr, le);
    return res;
}

// ---------------------------------------------------------------- epsilon -> 0

bool ConvergenceStudy::strictly_decreasing() const {
    for (std::size_t i = 0; i < decrement.size(); ++i)
        if (!(decrement[i].mean > 0.0 && decrement[i].ci_lo() > 0.0)) return false;
    return true;
}

ConvergenceStudy epsilon_convergence_study(const SolverConfig& base, const std::vector<double>& eps_list,
                                           const GridField& u0, std::size_t n_mc, std::uint64_t seed) {
    ConvergenceStudy out;
    out.eps = eps_list;
    const std::size_t E = eps_list.size();
    if (E < 2) return out;
    std::vector<Stepper> st;
    for (double e : eps_list) {
        SolverConfig c = base;
        c.eps = e;
        st.emplace_back(c);
    }
    const auto& phi = st.front().weight_samples();
    const double dx = base.grid.dx();
    const std::size_t P = E * (E - 1) / 2;
    auto pair_index = [E](std::size_t i, std::size_t j) { return i * E - i * (i + 1) / 2 + (j - i - 1); };
    std::vector<double> vals(P * n_mc);
    std::vector<std::uint64_t> h(n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(base, seed, s);
        h[s] = path.hash();
        std::vector<std::vector<double>> u(E);
        for (std::size_t i = 0; i < E; ++i) u[i] = march(st[i], u0.values, &path, base.n_steps);
        for (std::size_t i = 0; i < E; ++i)
            for (std::size_t j = i + 1; j < E; ++j) vals[pair_index(i, j) * n_mc + s] = weighted_l1_distance(u[i], u[j], phi, dx);
    });
    out.path_hash = combine_path_hashes(h);
    out.pairwise.assign(E, std::vector<Estimate>(E));
    for (std::size_t i = 0; i < E; ++i)
        for (std::size_t j = i + 1; j < E; ++j) out.pairwise[i][j] = estimate(column(vals, pair_index(i, j), n_mc));
    for (std::size_t i = 0; i + 1 < E; ++i) out.consecutive.push_back(out.pairwise[i][i + 1]);
    for (std::size_t i = 0; i + 2 < E; ++i) {
        std::vector<double> d(n_mc);
        for (std::size_t s = 0; s < n_mc; ++s)
            d[s] = vals[pair_index(i, i + 1) * n_mc + s] - vals[pair_index(i + 1, i + 2) * n_mc + s];
        out.decrement.push_back(estimate(d));
    }
    return out;
}

ExactLimitStudy linear_additive_exact_study(const SolverConfig& base, const std::vector<double>& eps_list,
                                            const std::string& u0_key, std::size_t n_mc, std::uint64_t seed) {
    if (!base.flux.is_linear()) throw std::invalid_argument("closed form needs a linear flux");
    if (base.sigma.family() != SigmaFamily::additive && base.sigma.family() != SigmaFamily::none)
        throw std::invalid_argument("closed form needs x-independent additive noise");
    const Grid& g = base.grid;
    const GridField u0 = make_initial(u0_key, g);
    const double a = base.flux.parameter(), T = base.T();
    std::vector<double> shifted(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double x = g.x(i) - a * T;
        x = x - 2.0 * g.L * std::floor((x + g.L) / (2.0 * g.L));
        shifted[i] = initial_value(u0_key, x, g.L);
    }
    ExactLimitStudy out;
    out.eps = eps_list;
    const std::size_t E = eps_list.size(), m = base.noise.m();
    std::vector<Stepper> st;
    for (double e : eps_list) {
        SolverConfig c = base;
        c.eps = e;
        st.emplace_back(c);
    }
    const auto& phi = st.front().weight_samples();
    const auto& gk = base.sigma.amplitudes();
    std::vector<double> vals(E * n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = mc_path(base, seed, s);
        double shift = 0.0;
        if (!base.sigma.is_zero())
            for (std::size_t k = 0; k < m; ++k) {
                double W = 0.0;
                for (std::size_t n = 0; n < base.n_steps; ++n) W += path(n, k);
                shift += gk[k] * W;
            }
        std::vector<double> exact(g.n);
        for (std::size_t i = 0; i < g.n; ++i) exact[i] = shifted[i] + shift;
        for (std::size_t e = 0; e < E; ++e) {
            const auto u = march(st[e], u0.values, &path, base.n_steps);
            vals[e * n_mc + s] = weighted_l1_distance(u, exact, phi, g.dx());
        }
    });
    for (std::size_t e = 0; e < E; ++e) out.distance.push_back(estimate(column(vals, e, n_mc)));
    std::vector<double> d;
    for (const auto& e : out.distance) d.push_back(e.mean);
    if (E >= 2) out.fit = loglog_fit(eps_list, d);
    return out;
}

}  // namespace stochcl

#include "stochcl/ito.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "stochcl/parallel.hpp"

namespace stochcl {

ToyProcess ToyProcess::standard() {
    ToyProcess p;
    p.x0 = 0.5;
    p.T = 1.0;
    p.space = NoiseSpace::uniform(2);
    p.u = [](double s, std::size_t k) { return 0.3 * (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * s)) * (k + 1.0); };
    p.v = [](double s) { return 1.0 + std::cos(std::numbers::pi * s); };
    return p;
}

bool ItoFunction::growth_ok() const {
    // The constant fitted on a small box must still work on a box 100 times larger.
    auto sup = [&](double R, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-R, R), Ut(0.0, 1.0);
        double lin = 0.0, bnd = 0.0;
        for (int i = 0; i < 4000; ++i) {
            const double z = U(rng), l = U(rng), t = Ut(rng);
            const double g = 1.0 + std::abs(z) + std::abs(l);
            lin = std::max({lin, std::abs(F(z, l, t)) / g, std::abs(F3(z, l, t)) / g});
            bnd = std::max({bnd, std::abs(F1(z, l, t)), std::abs(F11(z, l, t)), std::abs(F12(z, l, t))});
        }
        return std::pair{lin, bnd};
    };
    const auto [l1, b1] = sup(10.0, 7);
    const auto [l2, b2] = sup(1000.0, 11);
    return l2 <= 5.0 * l1 + 1e-12 && b2 <= 5.0 * b1 + 1e-12;
}

namespace {

std::vector<double> early_direction(std::size_t n_steps, std::size_t m, double h, double t_cut) {
    // h'(s, z_k) = (k + 1)/m on s < t_cut.
    std::vector<double> d(n_steps * m, 0.0);
    for (std::size_t n = 0; n < n_steps; ++n)
        if ((n + 0.5) * h < t_cut)
            for (std::size_t k = 0; k < m; ++k) d[n * m + k] = (k + 1.0) / m;
    return d;
}

ItoFunction make_fn(ItoFunction::Fn3 F, ItoFunction::Fn3 F1, ItoFunction::Fn3 F3, ItoFunction::Fn3 F11,
                    ItoFunction::Fn3 F12) {
    return {std::move(F), std::move(F1), std::move(F3), std::move(F11), std::move(F12)};
}

}  // namespace

std::vector<ItoCase> builtin_ito_cases() {
    const auto zero = [](double, double, double) { return 0.0; };
    std::vector<ItoCase> out;
    {
        ItoCase c;
        c.name = "identity";
        c.proc = ToyProcess::standard();
        c.F = make_fn([](double z, double, double) { return z; }, [](double, double, double) { return 1.0; }, zero, zero,
                      zero);
        c.V = [](std::size_t n, std::size_t m, double h) {
            return SmoothRV::composed([](double w) { return std::tanh(w); },
                                      [](double w) { return 1.0 - std::tanh(w) * std::tanh(w); },
                                      early_direction(n, m, h, 0.4), n, m);
        };
        out.push_back(c);
    }
    {
        ItoCase c;
        c.name = "product_linear";
        c.proc = ToyProcess::standard();
        c.F = make_fn([](double z, double l, double) { return z * l; }, [](double, double l, double) { return l; }, zero,
                      zero, [](double, double, double) { return 1.0; });
        c.V = [](std::size_t n, std::size_t m, double h) { return SmoothRV::linear(early_direction(n, m, h, 0.4), n, m); };
        out.push_back(c);
    }
    {
        ItoCase c;
        c.name = "square_classical";
        c.proc = ToyProcess::standard();
        c.F = make_fn([](double z, double, double) { return z * z; }, [](double z, double, double) { return 2.0 * z; },
                      zero, [](double, double, double) { return 2.0; }, zero);
        c.V = [](std::size_t, std::size_t, double) { return SmoothRV::constant(1.0); };
        c.constant_V = true;
        out.push_back(c);
    }
    {
        ItoCase c;
        c.name = "sin_tanh";
        c.proc = ToyProcess::standard();
        c.F = make_fn([](double z, double l, double t) { return std::sin(z) * std::sin(l) * (1.0 + t); },
                      [](double z, double l, double t) { return std::cos(z) * std::sin(l) * (1.0 + t); },
                      [](double z, double l, double) { return std::sin(z) * std::sin(l); },
                      [](double z, double l, double t) { return -std::sin(z) * std::sin(l) * (1.0 + t); },
                      [](double z, double l, double t) { return std::cos(z) * std::cos(l) * (1.0 + t); });
        c.V = [](std::size_t n, std::size_t m, double h) {
            return SmoothRV::composed([](double w) { return std::tanh(w); },
                                      [](double w) { return 1.0 - std::tanh(w) * std::tanh(w); },
                                      early_direction(n, m, h, 0.4), n, m);
        };
        out.push_back(c);
    }
    return out;
}

ItoCase ito_case(const std::string& name) {
    for (auto& c : builtin_ito_cases())
        if (c.name == name) return c;
    std::string names;
    for (auto& c : builtin_ito_cases()) names += " " + c.name;
    throw std::invalid_argument("unknown Ito case '" + name + "'; available:" + names);
}

namespace {

struct PathValues {
    double lhs = 0, rhs = 0, cross = 0, skor = 0, skor_V = 0, inner = 0;
};

// One path at resolution N (increments given per cell, row-major N x m).
PathValues run_path(const ItoCase& c, const SmoothRV& V, const NoisePath& path) {
    const ToyProcess& p = c.proc;
    const std::size_t N = path.n_steps, m = path.m;
    const double h = path.dt;
    const auto ev = V.evaluate(path);
    const double lam = ev.value;
    PathValues out;
    double X = p.x0;
    double rhs = c.F.F(p.x0, lam, 0.0), cross = 0.0, skor = 0.0, inner = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double s = n * h;
        const double f1 = c.F.F1(X, lam, s), f12 = c.F.F12(X, lam, s);
        double quad = 0.0, dX = p.v(s) * h;
        rhs += c.F.F3(X, lam, s) * h + f1 * p.v(s) * h;
        for (std::size_t k = 0; k < m; ++k) {
            const double uk = p.u(s, k), mu = p.space.mu[k];
            const double dv = c.constant_V ? 0.0 : V.derivative(ev, n, k);
            const double G = f1 * uk;
            cross += f12 * dv * uk * mu * h;
            quad += uk * uk * mu * h;
            // Discrete Skorohod integral of the cell function G: sum G dW - sum D_{n,k} G mu h,
            // where only the V-dependence of G has a derivative on its own cell.
            skor += G * path(n, k) - f12 * dv * uk * mu * h;
            inner += G * dv * mu * h;
            dX += uk * path(n, k);
        }
        rhs += 0.5 * c.F.F11(X, lam, s) * quad;
        X += dX;
    }
    out.lhs = c.F.F(X, lam, p.T);
    out.rhs = rhs + cross;
    out.cross = cross;
    out.skor = skor;
    out.skor_V = skor * lam;
    out.inner = inner;
    return out;
}

NoisePath aggregate(const NoisePath& fine, std::size_t factor) {
    NoisePath q;
    q.dt = fine.dt * factor;
    q.n_steps = fine.n_steps / factor;
    q.m = fine.m;
    q.seed = fine.seed;
    q.stream_id = fine.stream_id;
    q.increments.assign(q.n_steps * q.m, 0.0);
    for (std::size_t n = 0; n < fine.n_steps; ++n)
        for (std::size_t k = 0; k < fine.m; ++k) q(n / factor, k) += fine(n, k);
    return q;
}

}  // namespace

ItoResult verify_anticipating_ito(const ItoCase& c, std::size_t n_mc, std::size_t n_steps, std::uint64_t seed) {
    if (n_steps == 0) throw std::invalid_argument("need at least one step");
    const double h = c.proc.T / n_steps;
    const std::size_t m = c.proc.space.m();
    const SmoothRV V = c.V(n_steps, m, h);
    std::vector<double> lhs(n_mc), rhs(n_mc), res(n_mc), cross(n_mc), skor(n_mc), skv(n_mc), inner(n_mc), dgap(n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath path = sample_path(c.proc.space, h, n_steps, seed, s);
        const PathValues v = run_path(c, V, path);
        lhs[s] = v.lhs;
        rhs[s] = v.rhs;
        res[s] = v.lhs - v.rhs;
        cross[s] = v.cross;
        skor[s] = v.skor;
        skv[s] = v.skor_V;
        inner[s] = v.inner;
        dgap[s] = v.skor_V - v.inner;
    });
    ItoResult r;
    r.name = c.name;
    r.n_steps = n_steps;
    r.lhs = estimate(lhs);
    r.rhs = estimate(rhs);
    r.residual = estimate(res);
    r.cross = estimate(cross);
    r.skorohod = estimate(skor);
    r.skorohod_V = estimate(skv);
    r.inner = estimate(inner);
    r.duality_gap = estimate(dgap);
    r.growth_ok = c.F.growth_ok();
    return r;
}

WeakOrderStudy weak_order_study(const ItoCase& c, const std::vector<double>& h_list, std::size_t n_mc,
                                std::uint64_t seed) {
    if (h_list.empty()) throw std::invalid_argument("empty step list");
    const double h_min = *std::min_element(h_list.begin(), h_list.end());
    const auto n_fine = static_cast<std::size_t>(std::llround(c.proc.T / h_min));
    std::vector<std::size_t> factor;
    for (double h : h_list) {
        const auto f = static_cast<std::size_t>(std::llround(h / h_min));
        if (f == 0 || std::abs(f * h_min - h) > 1e-12 || n_fine % f != 0)
            throw std::invalid_argument("step sizes must be integer multiples of the finest one");
        factor.push_back(f);
    }
    const std::size_t m = c.proc.space.m(), L = h_list.size();
    std::vector<SmoothRV> V;
    for (std::size_t l = 0; l < L; ++l) V.push_back(c.V(n_fine / factor[l], m, h_list[l]));
    std::vector<double> vals(L * n_mc);
    parallel_for(n_mc, [&](std::size_t s) {
        const NoisePath fine = sample_path(c.proc.space, h_min, n_fine, seed, s);
        for (std::size_t l = 0; l < L; ++l) {
            const PathValues v = run_path(c, V[l], factor[l] == 1 ? fine : aggregate(fine, factor[l]));
            vals[l * n_mc + s] = v.lhs - v.rhs;
        }
    });
    WeakOrderStudy w;
    w.h = h_list;
    for (std::size_t l = 0; l < L; ++l)
        w.bias.push_back(estimate(std::span<const double>(vals.data() + l * n_mc, n_mc)));
    std::vector<double> b;
    for (const auto& e : w.bias) b.push_back(e.mean);
    if (L >= 2) w.fit = loglog_fit(h_list, b);
    return w;
}

}  // namespace stochcl

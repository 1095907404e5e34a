#include "stochcl/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <stdexcept>

namespace stochcl {

namespace {

struct SimpsonState {
    const Fn1& f;
    int evals = 0;
    double err = 0.0;
};

double simpson_step(SimpsonState& st, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.f(lm), frm = st.f(rm);
    st.evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        st.err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_step(st, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(st, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadratureResult adaptive_simpson(const Fn1& f, double a, double b, double tol, int max_depth) {
    SimpsonState st{f};
    QuadratureResult out;
    if (a == b) return out;
    // Pre-split so narrow features cannot hide between the first samples.
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    for (int p = 0; p < kPanels; ++p) {
        const double lo = a + p * h, hi = (p + 1 == kPanels) ? b : a + (p + 1) * h;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        st.evals += 3;
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        out.value += simpson_step(st, lo, flo, mid, fmid, hi, fhi, whole, tol / kPanels, max_depth);
    }
    out.error = st.err;
    out.evaluations = st.evals;
    return out;
}

Rule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> tab(
        gsl_integration_glfixed_table_alloc(static_cast<size_t>(n)), &gsl_integration_glfixed_table_free);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i)
        gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &r.nodes[i], &r.weights[i], tab.get());
    return r;
}

Rule gauss_laguerre(int n, double b) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be positive");
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
        gsl_integration_fixed_alloc(gsl_integration_fixed_laguerre, static_cast<size_t>(n), 0.0, b, 0.0, 0.0),
        &gsl_integration_fixed_free);
    if (!ws) throw std::runtime_error("gauss_laguerre: allocation failed");
    Rule r;
    const double* x = gsl_integration_fixed_nodes(ws.get());
    const double* w = gsl_integration_fixed_weights(ws.get());
    r.nodes.assign(x, x + n);
    r.weights.assign(w, w + n);
    return r;
}

double integrate(const Rule& rule, const Fn1& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

}  // namespace stochcl

#include "stochcl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "stochcl/quadrature.hpp"

namespace stochcl {

// ---------------------------------------------------------------- mollifier

double Mollifier::bump(double x) {
    const double q = 1.0 - x * x;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double Mollifier::bump_derivative(double x) {
    const double q = 1.0 - x * x;
    if (q <= 0.0) return 0.0;
    return std::exp(-1.0 / q) * (-2.0 * x / (q * q));
}

double Mollifier::bump_second_derivative(double x) {
    const double q = 1.0 - x * x;
    if (q <= 0.0) return 0.0;
    const double q2 = q * q;
    return std::exp(-1.0 / q) * (4.0 * x * x / (q2 * q2) - 2.0 / q2 - 8.0 * x * x / (q2 * q));
}

double Mollifier::normalisation() {
    static const double z = adaptive_simpson(&Mollifier::bump, -1.0, 1.0, 1e-15).value;
    return z;
}

double Mollifier::gradient_l1() {
    // J is even and unimodal, so \int |J'| = 2 J(0).
    return 2.0 * bump(0.0) / normalisation();
}

Mollifier::Mollifier(double r, bool shifted) : r_(r), shifted_(shifted) {
    if (!(r > 0.0)) throw std::invalid_argument("mollifier radius must be positive");
}

double Mollifier::operator()(double x) const {
    const double y = shifted_ ? x - r_ : x;
    return bump(y / r_) / (normalisation() * r_);
}

double Mollifier::derivative(double x) const {
    const double y = shifted_ ? x - r_ : x;
    return bump_derivative(y / r_) / (normalisation() * r_ * r_);
}

double Mollifier::second_derivative(double x) const {
    const double y = shifted_ ? x - r_ : x;
    return bump_second_derivative(y / r_) / (normalisation() * r_ * r_ * r_);
}

// ---------------------------------------------------------------- cutoff

namespace {

double psi_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = psi_exp(t), b = psi_exp(1.0 - t);
    return a / (a + b);
}

double smooth_step_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = psi_exp(t), b = psi_exp(1.0 - t);
    const double da = a / (t * t), db = b / ((1.0 - t) * (1.0 - t));
    const double d = a + b;
    return (da * b + a * db) / (d * d);
}

}  // namespace

double cutoff(double s) {
    s = std::abs(s);
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    return smooth_step(2.0 * (1.0 - s));
}

double cutoff_derivative(double s) {
    const double sg = s < 0 ? -1.0 : 1.0;
    s = std::abs(s);
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -2.0 * sg * smooth_step_derivative(2.0 * (1.0 - s));
}

double cutoff_second_derivative(double s) {
    constexpr double h = 1e-5;
    return (cutoff_derivative(s + h) - cutoff_derivative(s - h)) / (2.0 * h);
}

double cutoff_gradient_sup() {
    static const double sup = [] {
        double m = 0.0;
        for (int i = 0; i <= 20000; ++i) m = std::max(m, std::abs(cutoff_derivative(0.5 + 0.5 * i / 20000.0)));
        return m;
    }();
    return sup;
}

// ---------------------------------------------------------------- weights

namespace {

const Rule& mollifier_rule() {
    static const Rule rule = gauss_legendre(96, -1.0, 1.0);
    return rule;
}

// \int_R g via x = tan(theta).
double integrate_line(const Fn1& g, double tol = 1e-12) {
    const double h = 0.5 * std::numbers::pi;
    auto integrand = [&](double th) {
        th = std::clamp(th, -h * (1.0 - 1e-12), h * (1.0 - 1e-12));
        const double c = std::cos(th);
        return g(std::tan(th)) / (c * c);
    };
    return adaptive_simpson(integrand, -h, h, tol).value;
}

}  // namespace

Weight Weight::poly(int N) {
    if (N < 1) throw std::invalid_argument("poly weight needs N >= 1");
    Weight w;
    w.kind_ = WeightKind::poly;
    w.N_ = N;
    w.c_phi_ = 2.0 * N;
    w.finish();
    return w;
}

Weight Weight::exp(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exp weight needs lambda > 0");
    Weight w;
    w.kind_ = WeightKind::exp;
    w.param_ = lambda;
    w.c_phi_ = lambda;
    w.finish();
    return w;
}

Weight Weight::mollified(const Weight& base, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("mollified weight needs delta > 0");
    Weight w;
    w.kind_ = WeightKind::mollified;
    w.param_ = delta;
    w.base_ = std::make_shared<const Weight>(base);
    w.c_phi_ = base.c_phi();
    w.finish();
    return w;
}

Weight Weight::truncated(const Weight& base, double R) {
    if (!(R > 1.0)) throw std::invalid_argument("truncated weight needs R > 1");
    Weight w;
    w.kind_ = WeightKind::truncated;
    w.param_ = R;
    w.base_ = std::make_shared<const Weight>(base);
    w.c_phi_ = base.c_phi();
    w.finish();
    return w;
}

void Weight::finish() {
    switch (kind_) {
        case WeightKind::mollified:
            l1_norm_ = base_->l1_norm();  // unit-mass mollifier preserves the integral
            break;
        case WeightKind::truncated:
            l1_norm_ = adaptive_simpson([this](double x) { return (*this)(x); }, -param_, param_, 1e-12).value;
            break;
        default:
            l1_norm_ = integrate_line([this](double x) { return (*this)(x); });
    }
}

Weight Weight::parse(std::string_view key) {
    std::vector<std::string> tok;
    std::string cur;
    for (char c : key) {
        if (c == ':') {
            tok.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    tok.push_back(cur);
    auto num = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad number in weight key: " + s);
        return v;
    };
    try {
        if (tok[0] == "poly" && tok.size() == 2) return poly(static_cast<int>(num(tok[1])));
        if (tok[0] == "exp" && tok.size() == 2) return exp(num(tok[1]));
        if ((tok[0] == "moll" || tok[0] == "trunc") && tok.size() >= 3) {
            std::string base;
            for (std::size_t i = 1; i + 1 < tok.size(); ++i) base += (i > 1 ? ":" : "") + tok[i];
            const Weight b = parse(base);
            return tok[0] == "moll" ? mollified(b, num(tok.back())) : truncated(b, num(tok.back()));
        }
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("invalid weight key: " + std::string(key));
    }
    throw std::invalid_argument("invalid weight key: " + std::string(key));
}

std::string Weight::key() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case WeightKind::poly: os << "poly:" << N_; break;
        case WeightKind::exp: os << "exp:" << param_; break;
        case WeightKind::mollified: os << "moll:" << base_->key() << ":" << param_; break;
        case WeightKind::truncated: os << "trunc:" << base_->key() << ":" << param_; break;
    }
    return os.str();
}

double Weight::operator()(double x) const {
    switch (kind_) {
        case WeightKind::poly: return std::pow(1.0 + x * x, -N_);
        case WeightKind::exp: return std::exp(-param_ * std::sqrt(1.0 + x * x));
        case WeightKind::mollified: {
            const Rule& r = mollifier_rule();
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                s += r.weights[i] * Mollifier::bump(r.nodes[i]) * (*base_)(x - param_ * r.nodes[i]);
            return s / Mollifier::normalisation();
        }
        case WeightKind::truncated: return (*base_)(x) * cutoff(x / param_);
    }
    return 0.0;
}

double Weight::derivative(double x) const {
    switch (kind_) {
        case WeightKind::poly: return -2.0 * N_ * x * std::pow(1.0 + x * x, -N_ - 1);
        case WeightKind::exp: {
            const double s = std::sqrt(1.0 + x * x);
            return -param_ * (x / s) * std::exp(-param_ * s);
        }
        case WeightKind::mollified: {
            const Rule& r = mollifier_rule();
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                s += r.weights[i] * Mollifier::bump(r.nodes[i]) * base_->derivative(x - param_ * r.nodes[i]);
            return s / Mollifier::normalisation();
        }
        case WeightKind::truncated:
            return base_->derivative(x) * cutoff(x / param_) + (*base_)(x) * cutoff_derivative(x / param_) / param_;
    }
    return 0.0;
}

double Weight::second_derivative(double x) const {
    switch (kind_) {
        case WeightKind::poly: {
            const double q = 1.0 + x * x;
            return -2.0 * N_ * std::pow(q, -N_ - 1) + 4.0 * N_ * (N_ + 1) * x * x * std::pow(q, -N_ - 2);
        }
        case WeightKind::exp: {
            const double s = std::sqrt(1.0 + x * x);
            const double sp = x / s, spp = 1.0 / (s * s * s);
            return (param_ * param_ * sp * sp - param_ * spp) * std::exp(-param_ * s);
        }
        case WeightKind::mollified: {
            // phi_delta'' = \int phi'(x - y) J_delta'(y) dy keeps only first derivatives of the base.
            const Rule& r = mollifier_rule();
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                s += r.weights[i] * Mollifier::bump_derivative(r.nodes[i]) * base_->derivative(x - param_ * r.nodes[i]);
            return s / (Mollifier::normalisation() * param_);
        }
        case WeightKind::truncated: {
            const double R = param_;
            return base_->second_derivative(x) * cutoff(x / R) +
                   2.0 * base_->derivative(x) * cutoff_derivative(x / R) / R +
                   (*base_)(x) * cutoff_second_derivative(x / R) / (R * R);
        }
    }
    return 0.0;
}

std::vector<double> Weight::sample(const Grid& g) const {
    std::vector<double> phi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) phi[i] = (*this)(g.x(i));
    return phi;
}

double Weight::tail_mass(double L) const {
    if (kind_ == WeightKind::truncated && L >= param_) return 0.0;
    const double h = 0.5 * std::numbers::pi;
    const double a = std::atan(L);
    auto integrand = [&](double th) {
        th = std::min(th, h * (1.0 - 1e-12));
        const double c = std::cos(th);
        return (*this)(std::tan(th)) / (c * c);
    };
    return 2.0 * adaptive_simpson(integrand, a, h, 1e-14).value;
}

double Weight::half_width_for_ratio(double ratio) const {
    if (!positive()) return param_;
    const double phi0 = (*this)(0.0);
    double lo = 0.0, hi = 1.0;
    while ((*this)(hi) / phi0 >= ratio && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((*this)(mid) / phi0 >= ratio ? lo : hi) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------- norms

double weighted_lp_norm_pow(const std::vector<double>& u, double p, const std::vector<double>& phi, double dx) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("weighted_lp_norm: p must be finite and >= 1");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i])) throw std::domain_error("weighted_lp_norm: non-finite field value");
        const double a = std::abs(u[i]);
        s += (p == 2.0 ? a * a : (p == 1.0 ? a : std::pow(a, p))) * phi[i];
    }
    return s * dx;
}

double weighted_lp_norm(const std::vector<double>& u, double p, const std::vector<double>& phi, double dx) {
    const double s = weighted_lp_norm_pow(u, p, phi, dx);
    return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double weighted_lp_norm(const GridField& u, double p, const Weight& w) {
    return weighted_lp_norm(u.values, p, w.sample(u.grid), u.grid.dx());
}

NormReport weighted_lp_norm_report(const GridField& u, double p, const Weight& w) {
    return {weighted_lp_norm(u, p, w), w.tail_mass(u.grid.L)};
}

double weighted_linf_norm(const GridField& h, const Weight& w) {
    double m = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double phi = w(h.grid.x(i));
        if (h[i] == 0.0) continue;
        if (phi <= 0.0) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(h[i]) / phi);
    }
    return m;
}

double modulus_w(double p, double c_phi, double r) {
    if (r < 0.0) throw std::invalid_argument("modulus_w: r must be nonnegative");
    const double a = c_phi / p * r;
    return a * (1.0 + a * std::exp(c_phi * r / p));
}

Weight mollify_weight(const Weight& w, double delta) { return Weight::mollified(w, delta); }
Weight truncate_weight(const Weight& w, double R) { return Weight::truncated(w, R); }

std::vector<double> grid_convolve(const std::vector<double>& f, const std::vector<double>& g, double dx) {
    const std::size_t n = g.size();
    const auto c = static_cast<std::ptrdiff_t>(n / 2);
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (f[j] == 0.0) continue;
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - c;
        for (std::size_t i = 0; i < n; ++i)
            out[i] += f[j] * g[wrap(static_cast<std::ptrdiff_t>(i) - shift, n)] * dx;
    }
    return out;
}

std::pair<double, double> localized_young_bound(const GridField& f, const GridField& g, double p, const Weight& w) {
    const Grid& gr = g.grid;
    const double dx = gr.dx();
    const auto phi = w.sample(gr);
    const auto conv = grid_convolve(f.values, g.values, dx);
    const double lhs = weighted_lp_norm(conv, p, phi, dx);
    double mass = 0.0;
    for (std::size_t j = 0; j < gr.n; ++j) {
        const double x = std::abs((static_cast<double>(j) - static_cast<double>(gr.origin())) * dx);
        mass += std::abs(f[j]) * (1.0 + modulus_w(p, w, x)) * dx;
    }
    return {lhs, mass * weighted_lp_norm(g.values, p, phi, dx)};
}

}  // namespace stochcl

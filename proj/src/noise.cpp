#include "stochcl/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stochcl {

NoiseSpace NoiseSpace::uniform(std::size_t m) {
    if (m < 1) throw std::invalid_argument("noise space needs at least one node");
    return NoiseSpace{std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

double NoiseSpace::total_mass() const {
    double s = 0.0;
    for (double v : mu) s += v;
    return s;
}

void NoiseSpace::validate() const {
    if (mu.empty()) throw std::invalid_argument("noise space needs at least one node");
    for (double v : mu)
        if (!(v > 0.0)) throw std::invalid_argument("noise node masses must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t NoisePath::hash() const {
    return fnv1a(increments.data(), increments.size() * sizeof(double));
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
}

NoisePath sample_path(const NoiseSpace& space, double dt, std::size_t n_steps, std::uint64_t seed,
                      std::uint64_t stream_id) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_path: dt must be positive");
    space.validate();
    NoisePath p;
    p.dt = dt;
    p.n_steps = n_steps;
    p.m = space.m();
    p.seed = seed;
    p.stream_id = stream_id;
    p.increments.resize(n_steps * p.m);
    std::mt19937_64 eng(derive_stream_seed(seed, stream_id));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> sd(p.m);
    for (std::size_t k = 0; k < p.m; ++k) sd[k] = std::sqrt(dt * space.mu[k]);
    for (std::size_t n = 0; n < n_steps; ++n)
        for (std::size_t k = 0; k < p.m; ++k) p(n, k) = sd[k] * normal(eng);
    return p;
}

NoisePath shift_path(const NoisePath& p, std::size_t n, std::size_t k, double eps) {
    if (n >= p.n_steps || k >= p.m) throw std::out_of_range("shift_path: cell index out of range");
    NoisePath q = p;
    q(n, k) += eps;
    return q;
}

void write_path(const NoisePath& p, const std::string& filename) {
    std::ofstream os(filename, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + filename);
    const std::uint64_t n = p.n_steps, m = p.m;
    os.write(reinterpret_cast<const char*>(&p.seed), 8);
    os.write(reinterpret_cast<const char*>(&p.stream_id), 8);
    os.write(reinterpret_cast<const char*>(&p.dt), 8);
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&m), 8);
    os.write(reinterpret_cast<const char*>(p.increments.data()),
             static_cast<std::streamsize>(p.increments.size() * sizeof(double)));
}

NoisePath read_path(const std::string& filename) {
    std::ifstream is(filename, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + filename);
    NoisePath p;
    std::uint64_t n = 0, m = 0;
    is.read(reinterpret_cast<char*>(&p.seed), 8);
    is.read(reinterpret_cast<char*>(&p.stream_id), 8);
    is.read(reinterpret_cast<char*>(&p.dt), 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&m), 8);
    if (!is || m == 0 || n > (1ULL << 32) || m > (1ULL << 20)) throw std::runtime_error("corrupt noise file " + filename);
    p.n_steps = n;
    p.m = m;
    p.increments.resize(n * m);
    is.read(reinterpret_cast<char*>(p.increments.data()), static_cast<std::streamsize>(n * m * sizeof(double)));
    if (!is) throw std::runtime_error("truncated noise file " + filename);
    return p;
}

// ---------------------------------------------------------------- sigma

std::vector<double> SigmaCoeff::node_profile(double g, std::size_t m) {
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k)
        out[k] = g * std::sqrt(2.0 * static_cast<double>(k + 1) / static_cast<double>(m + 1));
    return out;
}

SigmaCoeff SigmaCoeff::none(std::size_t m) {
    SigmaCoeff c;
    c.family_ = SigmaFamily::none;
    c.g_.assign(m, 0.0);
    c.finish();
    c.key_ = "none";
    return c;
}

SigmaCoeff SigmaCoeff::additive(const std::vector<double>& g) {
    SigmaCoeff c;
    c.family_ = SigmaFamily::additive;
    c.shape_ = SigmaShape::one;
    c.g_ = g;
    c.finish();
    return c;
}

SigmaCoeff SigmaCoeff::multiplicative(const std::vector<double>& g, SigmaShape s) {
    SigmaCoeff c;
    c.family_ = SigmaFamily::multiplicative;
    c.shape_ = s;
    c.g_ = g;
    c.finish();
    return c;
}

SigmaCoeff SigmaCoeff::modulated(const std::vector<double>& g, SigmaShape s, double amp, double period) {
    if (!(period > 0.0) || std::abs(amp) >= 1.0) throw std::invalid_argument("modulation needs period > 0, |amp| < 1");
    SigmaCoeff c;
    c.family_ = SigmaFamily::spatially_modulated;
    c.shape_ = s;
    c.g_ = g;
    c.amp_ = amp;
    c.period_ = period;
    c.finish();
    return c;
}

void SigmaCoeff::finish() {
    if (g_.empty()) throw std::invalid_argument("sigma needs at least one node");
    // Every shape obeys |s(u)| <= 1 + |u| and |s'| <= 1, so
    // M_k = |g_k| max(sup|m|, Lip(m)) covers growth, Lipschitz and Hoelder envelopes.
    const double msup = 1.0 + std::abs(amp_);
    const double mlip = std::abs(amp_) * 2.0 * std::numbers::pi / period_;
    M_.resize(g_.size());
    for (std::size_t k = 0; k < g_.size(); ++k) M_[k] = std::abs(g_[k]) * std::max(msup, mlip);
    kappa_ = 0.5;
    std::ostringstream os;
    os.precision(17);
    static const char* shapes[] = {"one", "sin", "rational"};
    switch (family_) {
        case SigmaFamily::none: os << "none"; break;
        case SigmaFamily::additive: os << "additive"; break;
        case SigmaFamily::multiplicative: os << "mult_" << shapes[static_cast<int>(shape_)]; break;
        case SigmaFamily::spatially_modulated:
            os << "mod_" << shapes[static_cast<int>(shape_)] << "[amp=" << amp_ << ",period=" << period_ << "]";
            break;
    }
    os << "[g=";
    for (std::size_t k = 0; k < g_.size(); ++k) os << (k ? "," : "") << g_[k];
    os << "]";
    key_ = os.str();
}

SigmaCoeff SigmaCoeff::parse(std::string_view key, const NoiseSpace& space) {
    std::vector<std::string> tok;
    std::stringstream ss{std::string(key)};
    for (std::string t; std::getline(ss, t, ':');) tok.push_back(t);
    if (tok.empty()) throw std::invalid_argument("empty sigma key");
    const std::size_t m = space.m();
    auto num = [&](std::size_t i, double dflt) { return i < tok.size() ? std::stod(tok[i]) : dflt; };
    const std::string& f = tok[0];
    SigmaCoeff c;
    if (f == "none") {
        c = none(m);
    } else if (f == "additive") {
        c = additive(node_profile(num(1, 0.5), m));
    } else if (f == "mult_sin") {
        c = multiplicative(node_profile(num(1, 0.5), m), SigmaShape::sine);
    } else if (f == "mult_rational") {
        c = multiplicative(node_profile(num(1, 0.5), m), SigmaShape::rational);
    } else if (f == "mod_one" || f == "mod_sin" || f == "mod_rational") {
        const SigmaShape s = f == "mod_one" ? SigmaShape::one : (f == "mod_sin" ? SigmaShape::sine : SigmaShape::rational);
        c = modulated(node_profile(num(1, 0.5), m), s, num(2, 0.5), num(3, 5.0));
    } else {
        throw std::invalid_argument("unknown sigma family: " + std::string(key));
    }
    c.key_ = std::string(key);
    return c;
}

double SigmaCoeff::shape(double u) const {
    switch (shape_) {
        case SigmaShape::one: return 1.0;
        case SigmaShape::sine: return std::sin(u);
        case SigmaShape::rational: return u / (1.0 + u * u);
    }
    return 0.0;
}

double SigmaCoeff::shape_derivative(double u) const {
    switch (shape_) {
        case SigmaShape::one: return 0.0;
        case SigmaShape::sine: return std::cos(u);
        case SigmaShape::rational: {
            const double q = 1.0 + u * u;
            return (1.0 - u * u) / (q * q);
        }
    }
    return 0.0;
}

double SigmaCoeff::modulation(double x) const {
    if (family_ != SigmaFamily::spatially_modulated) return 1.0;
    return 1.0 + amp_ * std::sin(2.0 * std::numbers::pi * x / period_);
}

double SigmaCoeff::modulation_derivative(double x) const {
    if (family_ != SigmaFamily::spatially_modulated) return 0.0;
    const double w = 2.0 * std::numbers::pi / period_;
    return amp_ * w * std::cos(w * x);
}

double SigmaCoeff::lip_norm(const NoiseSpace& space) const {
    double s = 0.0;
    for (std::size_t k = 0; k < M_.size(); ++k) s += space.mu[k] * M_[k] * M_[k];
    return std::sqrt(s);
}

double SigmaCoeff::max_du() const {
    if (shape_ == SigmaShape::one || family_ == SigmaFamily::none) return 0.0;
    double g = 0.0;
    for (double v : g_) g = std::max(g, std::abs(v));
    return g * (1.0 + std::abs(amp_));
}

bool SigmaCoeff::is_zero() const {
    return std::all_of(g_.begin(), g_.end(), [](double v) { return v == 0.0; });
}

SigmaCoeff SigmaCoeff::scaled(double factor) const {
    SigmaCoeff c = *this;
    for (double& v : c.g_) v *= factor;
    const std::string k = key_;
    c.finish();
    std::ostringstream os;
    os.precision(17);
    os << k << "*" << factor;
    c.key_ = os.str();
    return c;
}

void SigmaCoeff::check_envelopes(double L) const {
    std::mt19937_64 eng(0x5eed);
    std::uniform_real_distribution<double> ux(-L, L), uu(-20.0, 20.0);
    const double e = 0.5 + kappa_;
    for (int it = 0; it < 1000; ++it) {
        const std::size_t k = static_cast<std::size_t>(it) % g_.size();
        const double x = ux(eng), y = ux(eng), u = uu(eng), v = uu(eng);
        const double tol = 1e-12 * (1.0 + M_[k]);
        if (std::abs((*this)(x, u, k) - (*this)(x, v, k)) > std::abs(u - v) * M_[k] + tol)
            throw std::logic_error("sigma violates its Lipschitz envelope: " + key_);
        if (std::abs((*this)(x, u, k)) > M_[k] * (1.0 + std::abs(u)) + tol)
            throw std::logic_error("sigma violates its growth envelope: " + key_);
        if (std::abs((*this)(x, u, k) - (*this)(y, u, k)) > M_[k] * std::pow(std::abs(x - y), e) * (1.0 + std::abs(u)) + tol)
            throw std::logic_error("sigma violates its spatial Hoelder envelope: " + key_);
    }
}

double hs_norm_G(const SigmaCoeff& c, const NoiseSpace& space, const GridField& u, const Weight& w) {
    const Grid& g = u.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i), phi = w(x);
        for (std::size_t k = 0; k < space.m(); ++k) {
            const double v = c(x, u[i], k);
            s += v * v * space.mu[k] * phi;
        }
    }
    return std::sqrt(s * g.dx());
}

double hs_distance_G(const SigmaCoeff& c, const NoiseSpace& space, const GridField& u, const GridField& v,
                     const Weight& w) {
    const Grid& g = u.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i), phi = w(x);
        for (std::size_t k = 0; k < space.m(); ++k) {
            const double d = c(x, u[i], k) - c(x, v[i], k);
            s += d * d * space.mu[k] * phi;
        }
    }
    return std::sqrt(s * g.dx());
}

double sigma_lip_distance(const SigmaCoeff& a, const SigmaCoeff& b, const NoiseSpace& space, double L) {
    double total = 0.0;
    for (std::size_t k = 0; k < space.m(); ++k) {
        double growth = 0.0, lip = 0.0;
        for (int ix = 0; ix < 256; ++ix) {
            const double x = -L + 2.0 * L * ix / 256.0;
            for (int iu = 0; iu <= 800; ++iu) {
                const double u = -20.0 + 40.0 * iu / 800.0;
                growth = std::max(growth, std::abs(a(x, u, k) - b(x, u, k)) / (1.0 + std::abs(u)));
                lip = std::max(lip, std::abs(a.du(x, u, k) - b.du(x, u, k)));
            }
        }
        const double Mk = growth + lip;
        total += space.mu[k] * Mk * Mk;
    }
    return std::sqrt(total);
}

}  // namespace stochcl

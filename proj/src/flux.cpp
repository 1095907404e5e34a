#include "stochcl/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stochcl {

FluxFn FluxFn::linear(double a) {
    FluxFn f;
    f.family_ = FluxFamily::linear;
    f.a_ = a;
    f.lip_ = std::abs(a);
    return f;
}

FluxFn FluxFn::burgers_clipped(double u_max) {
    if (!(u_max > 0.0)) throw std::invalid_argument("burgers flux needs u_max > 0");
    FluxFn f;
    f.family_ = FluxFamily::burgers_clipped;
    f.a_ = u_max;
    f.lip_ = u_max;
    return f;
}

FluxFn FluxFn::sine(double a) {
    FluxFn f;
    f.family_ = FluxFamily::sine;
    f.a_ = a;
    f.lip_ = std::abs(a);
    return f;
}

FluxFn FluxFn::parse(std::string_view key) {
    const std::string k(key);
    if (k == "zero") return zero();
    const auto c = k.find(':');
    if (c == std::string::npos) throw std::invalid_argument("invalid flux key: " + k);
    const std::string fam = k.substr(0, c);
    const double v = std::stod(k.substr(c + 1));
    if (fam == "linear") return linear(v);
    if (fam == "burgers") return burgers_clipped(v);
    if (fam == "sin") return sine(v);
    throw std::invalid_argument("invalid flux key: " + k);
}

double FluxFn::operator()(double u) const {
    switch (family_) {
        case FluxFamily::linear: return a_ * u;
        case FluxFamily::burgers_clipped: {
            const double au = std::abs(u);
            return au <= a_ ? 0.5 * u * u : a_ * au - 0.5 * a_ * a_;
        }
        case FluxFamily::sine: return a_ * std::sin(u);
    }
    return 0.0;
}

double FluxFn::derivative(double u) const {
    switch (family_) {
        case FluxFamily::linear: return a_;
        case FluxFamily::burgers_clipped: return std::clamp(u, -a_, a_);
        case FluxFamily::sine: return a_ * std::cos(u);
    }
    return 0.0;
}

std::string FluxFn::key() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case FluxFamily::linear: os << "linear:" << a_; break;
        case FluxFamily::burgers_clipped: os << "burgers:" << a_; break;
        case FluxFamily::sine: os << "sin:" << a_; break;
    }
    return os.str();
}

double flux_lip_distance(const FluxFn& a, const FluxFn& b) {
    double m = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double u = -20.0 + 40.0 * i / 4000.0;
        m = std::max(m, std::abs(a.derivative(u) - b.derivative(u)));
    }
    return m;
}

}  // namespace stochcl

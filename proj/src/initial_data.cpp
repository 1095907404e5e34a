#include "stochcl/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace stochcl {

double initial_value(std::string_view key, double x, double L) {
    std::vector<std::string> tok;
    std::stringstream ss{std::string(key)};
    for (std::string t; std::getline(ss, t, ':');) tok.push_back(t);
    if (tok.empty()) throw std::invalid_argument("empty initial-data key");
    auto num = [&](std::size_t i, double dflt) { return i < tok.size() ? std::stod(tok[i]) : dflt; };
    const std::string& f = tok[0];
    {
        double v = 0.0;
        if (f == "zero") {
            v = 0.0;
        } else if (f == "const") {
            v = num(1, 0.0);
        } else if (f == "bump") {
            const double A = num(1, 1.0), w = num(2, 1.0), x0 = num(3, 0.0);
            v = A * std::exp(-(x - x0) * (x - x0) / (2.0 * w * w));
        } else if (f == "step") {
            const double A = num(1, 1.0), a = num(2, -1.0), b = num(3, 1.0);
            v = (x >= a && x < b) ? A : 0.0;
        } else if (f == "smoothstep") {
            const double A = num(1, 1.0), a = num(2, -1.0), b = num(3, 1.0), w = num(4, 0.1);
            v = 0.5 * A * (std::tanh((x - a) / w) - std::tanh((x - b) / w));
        } else if (f == "sine") {
            const double A = num(1, 1.0), q = num(2, 1.0);
            v = A * std::sin(std::numbers::pi * q * x / L);
        } else {
            throw std::invalid_argument("unknown initial-data family: " + std::string(key));
        }
        return v;
    }
}

GridField make_initial(std::string_view key, const Grid& grid) {
    GridField u(grid);
    for (std::size_t i = 0; i < grid.n; ++i) u[i] = initial_value(key, grid.x(i), grid.L);
    return u;
}

}  // namespace stochcl

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stochcl {

// Uniform periodic grid on the torus [-L, L).
struct Grid {
    std::size_t n = 256;
    double L = 10.0;

    Grid() = default;
    Grid(std::size_t n_cells, double half_width) : n(n_cells), L(half_width) { validate(); }

    double dx() const { return 2.0 * L / static_cast<double>(n); }
    double x(std::size_t i) const { return -L + static_cast<double>(i) * dx(); }
    // Index of the cell centred at x = 0.
    std::size_t origin() const { return n / 2; }

    void validate() const {
        if (n < 4 || (n & (n - 1)) != 0)
            throw std::invalid_argument("grid size must be a power of two >= 4");
        if (!(L > 0.0)) throw std::invalid_argument("grid half-width must be positive");
    }
    bool operator==(const Grid& o) const { return n == o.n && L == o.L; }
};

struct GridField {
    Grid grid;
    std::vector<double> values;
    double t = 0.0;

    GridField() = default;
    explicit GridField(const Grid& g, double fill = 0.0, double time = 0.0)
        : grid(g), values(g.n, fill), t(time) {}
    GridField(const Grid& g, std::vector<double> v, double time = 0.0)
        : grid(g), values(std::move(v)), t(time) {
        if (values.size() != grid.n) throw std::invalid_argument("field size does not match grid");
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// Periodic neighbour index.
inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace stochcl

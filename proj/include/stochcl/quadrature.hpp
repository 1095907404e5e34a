#pragma once

#include <functional>
#include <vector>

namespace stochcl {

using Fn1 = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int evaluations = 0;
};

// Adaptive Simpson with Richardson correction.
QuadratureResult adaptive_simpson(const Fn1& f, double a, double b, double tol = 1e-12,
                                  int max_depth = 50);

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss-Laguerre rule for the weight exp(-b x) on [0, inf).
Rule gauss_laguerre(int n, double b = 1.0);

double integrate(const Rule& rule, const Fn1& f);

}  // namespace stochcl

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace stochcl {

// Pairwise summation; the reduction tree depends only on the length, so the
// result is independent of how the inputs were scheduled.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

struct Estimate {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    std::size_t n = 0;

    double ci_lo() const { return mean - 1.959963984540054 * se; }
    double ci_hi() const { return mean + 1.959963984540054 * se; }
};

inline Estimate estimate(std::span<const double> v) {
    Estimate e;
    e.n = v.size();
    if (e.n == 0) return e;
    e.mean = pairwise_sum(v) / static_cast<double>(e.n);
    if (e.n > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.mean) * (v[i] - e.mean);
        const double var = pairwise_sum(sq) / static_cast<double>(e.n - 1);
        e.se = std::sqrt(var / static_cast<double>(e.n));
    }
    return e;
}

inline Estimate estimate(const std::vector<double>& v) { return estimate(std::span<const double>(v)); }

// Ordinary least squares y = a + b x.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit fit;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return fit;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

inline LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    return linear_fit(lx, ly);
}

}  // namespace stochcl

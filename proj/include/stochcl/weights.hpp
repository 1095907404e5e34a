#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stochcl/grid.hpp"

namespace stochcl {

// Standard bump J(x) = exp(-1/(1-x^2)) on (-1, 1), normalised to unit mass.
// J_r(x) = J(x/r)/r, and the shifted version J_r^+(x) = J_r(x - r) lives on (0, 2r).
class Mollifier {
public:
    explicit Mollifier(double r, bool shifted = false);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
    double radius() const { return r_; }
    bool shifted() const { return shifted_; }
    double support_lo() const { return shifted_ ? 0.0 : -r_; }
    double support_hi() const { return shifted_ ? 2.0 * r_ : r_; }

    // Unit-radius profile and its normalisation.
    static double bump(double x);
    static double bump_derivative(double x);
    static double bump_second_derivative(double x);
    static double normalisation();
    // ||J'||_{L^1} for the unit mollifier.
    static double gradient_l1();

private:
    double r_;
    bool shifted_;
};

enum class WeightKind { poly, exp, mollified, truncated };

class Weight {
public:
    static Weight poly(int N);
    static Weight exp(double lambda);
    static Weight mollified(const Weight& base, double delta);
    static Weight truncated(const Weight& base, double R);
    // "poly:N", "exp:lambda", "moll:<base>:<delta>", "trunc:<base>:<R>".
    static Weight parse(std::string_view key);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    WeightKind kind() const { return kind_; }
    // |phi'| <= c_phi * phi. For truncated weights this is the constant of the base.
    double c_phi() const { return c_phi_; }
    double l1_norm() const { return l1_norm_; }
    // Strictly positive everywhere (false only for truncated weights).
    bool positive() const { return kind_ != WeightKind::truncated; }
    std::string key() const;

    int poly_order() const { return N_; }
    double parameter() const { return param_; }  // lambda, delta or R
    const Weight* base() const { return base_.get(); }

    std::vector<double> sample(const Grid& g) const;
    // Mass outside [-L, L].
    double tail_mass(double L) const;
    // Smallest L with phi(L)/phi(0) below ratio (bisection, positive weights).
    double half_width_for_ratio(double ratio = 1e-6) const;

private:
    Weight() = default;
    void finish();

    WeightKind kind_ = WeightKind::poly;
    int N_ = 1;
    double param_ = 0.0;
    double c_phi_ = 0.0;
    double l1_norm_ = 0.0;
    std::shared_ptr<const Weight> base_;
};

// Smooth cutoff: 1 on [0, 1/2], 0 beyond 1, monotone in between (applied to |s|).
double cutoff(double s);
double cutoff_derivative(double s);
double cutoff_second_derivative(double s);
double cutoff_gradient_sup();

// Norms on the grid (periodic trapezoidal rule).
double weighted_lp_norm(const GridField& u, double p, const Weight& w);
double weighted_lp_norm(const std::vector<double>& u, double p, const std::vector<double>& phi, double dx);
double weighted_lp_norm_pow(const std::vector<double>& u, double p, const std::vector<double>& phi, double dx);
double weighted_linf_norm(const GridField& h, const Weight& w);

struct NormReport {
    double value = 0.0;
    double tail_mass = 0.0;  // \int_{|x|>L} phi, the truncation level of the torus
};
NormReport weighted_lp_norm_report(const GridField& u, double p, const Weight& w);

// (c/p) r (1 + (c/p) r e^{c r / p}).
double modulus_w(double p, double c_phi, double r);
inline double modulus_w(double p, const Weight& w, double r) { return modulus_w(p, w.c_phi(), r); }

Weight mollify_weight(const Weight& w, double delta);
Weight truncate_weight(const Weight& w, double R);

// Compactly supported f is given as a grid field centred at x = 0 (index n/2).
// Returns (||f * g||_{p,phi}, (\int |f| (1 + w_{p,phi}(|x|))) ||g||_{p,phi}).
std::pair<double, double> localized_young_bound(const GridField& f, const GridField& g, double p,
                                                const Weight& w);

// Periodic convolution on the grid with f centred at index n/2.
std::vector<double> grid_convolve(const std::vector<double>& f_centered, const std::vector<double>& g, double dx);

}  // namespace stochcl

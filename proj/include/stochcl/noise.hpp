#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stochcl/grid.hpp"
#include "stochcl/weights.hpp"

namespace stochcl {

struct NoiseSpace {
    std::vector<double> mu;  // mass of each node z_k

    static NoiseSpace uniform(std::size_t m);
    std::size_t m() const { return mu.size(); }
    double total_mass() const;
    void validate() const;
};

// Gaussian increments dW[n][k] ~ N(0, dt mu_k), stored row-major.
struct NoisePath {
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::vector<double> increments;

    double operator()(std::size_t n, std::size_t k) const { return increments[n * m + k]; }
    double& operator()(std::size_t n, std::size_t k) { return increments[n * m + k]; }
    const double* row(std::size_t n) const { return increments.data() + n * m; }
    // FNV-1a over the raw increments, used to verify noise coupling.
    std::uint64_t hash() const;
};

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id);

NoisePath sample_path(const NoiseSpace& space, double dt, std::size_t n_steps, std::uint64_t seed,
                      std::uint64_t stream_id);
NoisePath shift_path(const NoisePath& p, std::size_t n, std::size_t k, double eps);

void write_path(const NoisePath& p, const std::string& filename);
NoisePath read_path(const std::string& filename);

enum class SigmaFamily { none, additive, multiplicative, spatially_modulated };
// Nonlinearity s(u) used by the multiplicative and modulated families.
enum class SigmaShape { one, sine, rational };

// sigma(x, u, z_k) = g_k s(u) m(x), with m == 1 unless spatially modulated.
class SigmaCoeff {
public:
    static SigmaCoeff none(std::size_t m);
    static SigmaCoeff additive(const std::vector<double>& g);
    static SigmaCoeff multiplicative(const std::vector<double>& g, SigmaShape s);
    // m(x) = 1 + amp sin(2 pi x / period).
    static SigmaCoeff modulated(const std::vector<double>& g, SigmaShape s, double amp = 0.5, double period = 5.0);
    // Keys: none, additive:g, mult_sin:g, mult_rational:g, mod_one:g, mod_sin:g, mod_rational:g
    // with optional ":amp:period" for the modulated ones. The node amplitudes g_k
    // are g * sqrt(2(k+1)/(m+1)), so that sum_k mu_k g_k^2 = g^2 for uniform mu.
    static SigmaCoeff parse(std::string_view key, const NoiseSpace& space);
    static std::vector<double> node_profile(double g, std::size_t m);

    double operator()(double x, double u, std::size_t k) const {
        return g_[k] * shape(u) * modulation(x);
    }
    double du(double x, double u, std::size_t k) const { return g_[k] * shape_derivative(u) * modulation(x); }

    double shape(double u) const;
    double shape_derivative(double u) const;
    double modulation(double x) const;
    double modulation_derivative(double x) const;

    SigmaFamily family() const { return family_; }
    SigmaShape shape_kind() const { return shape_; }
    std::size_t m() const { return g_.size(); }
    const std::vector<double>& amplitudes() const { return g_; }
    const std::vector<double>& M() const { return M_; }
    double kappa() const { return kappa_; }
    // ||M||_{L^2(Z)}.
    double lip_norm(const NoiseSpace& space) const;
    // sup_u |d sigma / du| over all nodes and x.
    double max_du() const;
    bool x_dependent() const { return family_ == SigmaFamily::spatially_modulated && amp_ != 0.0; }
    bool is_zero() const;
    std::string key() const { return key_; }
    SigmaCoeff scaled(double factor) const;

    // Random sweep of the Lipschitz, growth and spatial Hoelder envelopes;
    // throws std::logic_error on the first violation.
    void check_envelopes(double L) const;

private:
    SigmaFamily family_ = SigmaFamily::none;
    SigmaShape shape_ = SigmaShape::one;
    std::vector<double> g_;
    std::vector<double> M_;
    double kappa_ = 0.5;
    double amp_ = 0.0;
    double period_ = 1.0;
    std::string key_ = "none";

    void finish();
};

// ||G(u)||_HS = (\int \int sigma(x,u(x),z)^2 phi dmu dx)^{1/2}.
double hs_norm_G(const SigmaCoeff& c, const NoiseSpace& space, const GridField& u, const Weight& w);
// ||G(u) - G(v)||_HS.
double hs_distance_G(const SigmaCoeff& c, const NoiseSpace& space, const GridField& u, const GridField& v,
                     const Weight& w);
// Sampling estimate of ||sigma_1 - sigma_2||_Lip = ||M_{sigma_1 - sigma_2}||_{L^2(Z)}.
double sigma_lip_distance(const SigmaCoeff& a, const SigmaCoeff& b, const NoiseSpace& space, double L);

}  // namespace stochcl

#pragma once

#include <string>
#include <string_view>

namespace stochcl {

enum class FluxFamily { linear, burgers_clipped, sine };

// Globally Lipschitz C^1 flux with f(0) = 0.
class FluxFn {
public:
    static FluxFn linear(double a);
    // u^2/2 on |u| <= u_max, continued linearly with slope +-u_max.
    static FluxFn burgers_clipped(double u_max);
    static FluxFn sine(double a);
    static FluxFn zero() { return linear(0.0); }
    // "linear:a", "burgers:u_max", "sin:a", "zero".
    static FluxFn parse(std::string_view key);

    double operator()(double u) const;
    double derivative(double u) const;
    double lip_norm() const { return lip_; }
    FluxFamily family() const { return family_; }
    double parameter() const { return a_; }
    bool is_linear() const { return family_ == FluxFamily::linear; }
    std::string key() const;

private:
    FluxFamily family_ = FluxFamily::linear;
    double a_ = 0.0;
    double lip_ = 0.0;
};

// ||f_1 - f_2||_Lip, by sampling the derivative difference.
double flux_lip_distance(const FluxFn& a, const FluxFn& b);

}  // namespace stochcl

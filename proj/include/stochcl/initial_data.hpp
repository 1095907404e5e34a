#pragma once

#include <string>
#include <string_view>

#include "stochcl/grid.hpp"

namespace stochcl {

// Deterministic initial data families, addressable by key:
//   const:c              constant
//   bump:A:w[:x0]        A exp(-(x-x0)^2 / (2 w^2))
//   step:A:a:b           A on [a, b), 0 elsewhere (periodic Riemann pair)
//   smoothstep:A:a:b:w   step with tanh edges of width w
//   sine:A:q             A sin(pi q x / L)
//   zero
GridField make_initial(std::string_view key, const Grid& grid);
// Pointwise value of the same family on the torus of half-width L.
double initial_value(std::string_view key, double x, double L);

}  // namespace stochcl

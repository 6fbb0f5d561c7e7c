#pragma once

#include <cstddef>
#include <vector>

#include "hsrnet/numerics/rng.hpp"

namespace hsrnet::numerics {

// d i.i.d. standard normal coordinates drawn in order from `rng`.
std::vector<double> gaussian_vector(Rng& rng, std::size_t d);

int rademacher(Rng& rng);

// Q(b) = P[Z > b] for Z ~ N(0, 1).
double gaussian_upper_tail(double b);

}  // namespace hsrnet::numerics

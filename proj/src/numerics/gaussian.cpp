#include "hsrnet/numerics/gaussian.hpp"

#include <cmath>

#include "hsrnet/errors.hpp"

namespace hsrnet::numerics {

std::vector<double> gaussian_vector(Rng& rng, std::size_t d) {
  if (d == 0) throw InvalidArgument("gaussian_vector: dimension must be >= 1");
  std::vector<double> v(d);
  for (auto& x : v) x = rng.gaussian();
  return v;
}

int rademacher(Rng& rng) { return rng.rademacher(); }

double gaussian_upper_tail(double b) { return 0.5 * std::erfc(b / std::sqrt(2.0)); }

}  // namespace hsrnet::numerics

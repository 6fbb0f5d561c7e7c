#include "hsrnet/ntk/separability.hpp"

#include <cmath>
#include <string>

#include "hsrnet/errors.hpp"

namespace hsrnet::ntk {

SeparabilityReport separability(std::span<const double> points, std::size_t d) {
  if (d == 0 || points.size() % d != 0) throw DimensionMismatch("separability: bad point buffer");
  const std::size_t n = points.size() / d;
  if (n < 2) throw InvalidArgument("separability: need at least two points");

  SeparabilityReport best;
  best.delta = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double minus = 0.0, plus = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double a = points[i * d + k], b = points[j * d + k];
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
      }
      minus = std::sqrt(minus);
      plus = std::sqrt(plus);
      if (minus < best.delta) best = {minus, i, j, SeparabilityReport::Mode::minus};
      if (plus < best.delta) best = {plus, i, j, SeparabilityReport::Mode::plus};
    }
  }
  if (best.delta == 0.0)
    throw DegenerateData("separability: points " + std::to_string(best.i) + " and " +
                         std::to_string(best.j) + " are duplicate or antipodal");
  return best;
}

SeparabilityReport separability(const data::Dataset& dataset) {
  return separability(dataset.points(), dataset.dim());
}

}  // namespace hsrnet::ntk

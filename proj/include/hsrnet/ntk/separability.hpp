#pragma once

#include <cstddef>
#include <span>

#include "hsrnet/data/dataset.hpp"

namespace hsrnet::ntk {

struct SeparabilityReport {
  enum class Mode { minus, plus };
  double delta = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  Mode mode = Mode::minus;  // which of |x_i - x_j|, |x_i + x_j| attains delta
};

// Exhaustive pair scan over row-major unit vectors. Throws InvalidArgument
// for n < 2 and DegenerateData when delta is zero.
SeparabilityReport separability(std::span<const double> points, std::size_t d);
SeparabilityReport separability(const data::Dataset& dataset);

}  // namespace hsrnet::ntk

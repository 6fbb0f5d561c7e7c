#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace hsrnet::numerics {

// Fixed ascending-index summation; every inner product in the library goes
// through here so that index queries and model evaluation agree bitwise.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace hsrnet::numerics

#pragma once

// Reference computations used as test oracles. They share no code with the
// library beyond plain vectors.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// P[Z > b] by composite Simpson integration of the normal density on
// [b, b + 40] (the remaining tail is below 1e-300).
inline double upper_tail(double b) {
  if (b < 0.0) return 1.0 - upper_tail(-b);
  const std::size_t steps = 400000;
  const double h = 40.0 / steps;
  auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  double s = phi(b) + phi(b + 40.0);
  for (std::size_t k = 1; k < steps; ++k) s += (k % 2 ? 4.0 : 2.0) * phi(b + k * h);
  return s * h / 3.0;
}

// Number of eigenvalues of the dense symmetric matrix `a` (row-major, order
// n) below sigma, from the signs of the pivots of LDL^T(a - sigma I).
inline std::size_t count_below(const std::vector<double>& a, std::size_t n, double sigma) {
  std::vector<double> m(a);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= sigma;
  std::size_t negative = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = m[k * n + k];
    if (pivot == 0.0) pivot = -1e-300;
    if (pivot < 0.0) ++negative;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i * n + k] / pivot;
      for (std::size_t j = k + 1; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return negative;
}

// Smallest eigenvalue by bisection on the inertia count.
inline double min_eigenvalue(const std::vector<double>& a, std::size_t n) {
  double bound = 0.0;
  for (double v : a) bound += v * v;
  bound = std::sqrt(bound) + 1.0;
  double lo = -bound, hi = bound;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * bound; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(a, n, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Shifted NTK Gram matrix of a width-m network by direct triple loop:
// H_ij = (1/m) sum_r <x_i, x_j> [<w_r, x_i> > b] [<w_r, x_j> > b].
inline std::vector<double> ntk_gram(const std::vector<double>& x, std::size_t n, std::size_t d,
                                    const std::vector<double>& w, std::size_t m, double b) {
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double xx = 0.0;
      for (std::size_t k = 0; k < d; ++k) xx += x[i * d + k] * x[j * d + k];
      std::size_t both = 0;
      for (std::size_t r = 0; r < m; ++r) {
        double zi = 0.0, zj = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          zi += w[r * d + k] * x[i * d + k];
          zj += w[r * d + k] * x[j * d + k];
        }
        if (zi > b && zj > b) ++both;
      }
      h[i * n + j] = xx * static_cast<double>(both) / static_cast<double>(m);
    }
  return h;
}

// Network output f(x) = m^{-1/2} sum_r a_r max(<w_r, x> - b, 0).
inline double network_output(const std::vector<double>& w, const std::vector<int>& a,
                             std::size_t d, double b, const double* x) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    double z = 0.0;
    for (std::size_t k = 0; k < d; ++k) z += w[r * d + k] * x[k];
    if (z > b) s += a[r] * (z - b);
  }
  return s / std::sqrt(static_cast<double>(a.size()));
}

inline double half_squared_loss(const std::vector<double>& w, const std::vector<int>& a,
                                std::size_t d, double b, const std::vector<double>& x,
                                const std::vector<double>& y) {
  double l = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = network_output(w, a, d, b, x.data() + i * d) - y[i];
    l += e * e;
  }
  return 0.5 * l;
}

}  // namespace oracle

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "hsrnet/train/trainer.hpp"

namespace hsrnet::train {

struct RateFit {
  double rho = 1.0;    // exp(slope) of log err2 against t
  double r2 = 1.0;     // coefficient of determination of the log-linear fit
  double slope = 0.0;
};

// Least squares fit of log(err2[t]) = c + t * log(rho). Needs at least ten
// strictly positive values. A constant trace gives rho = 1 and r2 = 1.
RateFit convergence_fit(std::span<const double> err2);

struct SparsityAudit {
  bool ok = true;
  std::uint64_t max_k = 0;
  std::uint64_t at_t = 0;
  std::uint64_t at_sample = 0;
  double bound = 0.0;  // C * m * exp(-b^2 / 2)
};

SparsityAudit sparsity_audit(const TrainTrace& trace, std::size_t m, double b,
                             double constant = 4.0);

// Claim-style bound on how far any neuron can move in a converging run:
// 4 sqrt(n) |err(0)|_2 / (lambda sqrt(m)).
double displacement_bound(double lambda, std::size_t m, std::size_t n, double err0_norm);

// Slope of log(y) against log(x) by least squares.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hsrnet::train

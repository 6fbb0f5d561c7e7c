#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/model/network.hpp"
#include "hsrnet/numerics/rng.hpp"
#include "hsrnet/numerics/sym_matrix.hpp"

namespace hsrnet::ntk {

enum class KernelKind { continuous_mc, discrete_at_init, discrete_at_step };

const char* to_string(KernelKind kind);

// Shifted NTK Gram matrix H_ij = <x_i, x_j> * P[<w, x_i> > b and <w, x_j> > b],
// with the probability taken over the neurons of a network (discrete) or over
// Gaussian samples (continuous, Monte Carlo). Entries are formed as
// <x_i, x_j> * count_ij / samples from integer co-firing counts, so the
// Monte-Carlo estimate with `samples = m` and the same stream reproduces the
// discrete kernel of a freshly initialised width-m network exactly.
struct KernelReport {
  numerics::SymMatrix h;
  double lambda_min = 0.0;
  std::vector<double> eigvec;
  KernelKind kind = KernelKind::continuous_mc;
  std::uint64_t samples = 0;  // MC samples, or the width for discrete kernels
  double shift = 0.0;
  // Standard error of lambda_min from the per-sample spread of v^T g_w v
  // (first-order perturbation); zero for discrete kernels.
  double lambda_stderr = 0.0;
  numerics::SymMatrix entry_stderr;
};

KernelReport h_discrete(const model::NetworkState& net, const data::Dataset& dataset);

// Samples are drawn in chunks of 65536, chunk c from rng.split(c); chunks are
// reduced in order, so the result does not depend on `workers`.
KernelReport h_continuous_mc(const numerics::Rng& rng, const data::Dataset& dataset, double b,
                             std::uint64_t samples, unsigned workers = 1);

struct GapCheck {
  double lambda = 0.0;
  double lower_bound = 0.0;   // exp(-b^2/2) delta / (100 n^2)
  double upper_bound = 0.0;   // exp(-b^2/2)
  double lower_margin = 0.0;  // lambda - lower_bound
  double upper_margin = 0.0;  // upper_bound - lambda
  double mc_error = 0.0;      // 3 standard errors
  bool lower_ok = false;
  bool upper_ok = false;
  // The 3-sigma error is smaller than the lower-bound margin.
  bool reliable = false;

  bool ok() const { return lower_ok && upper_ok && reliable; }
};

GapCheck check_spectral_gap(const KernelReport& report, double delta, std::size_t n, double b);

struct ConcentrationRow {
  std::size_t width = 0;
  double median_distance = 0.0;
  // Fraction of trials with lambda_min(H_dis) >= (3/4) lambda_hat.
  double fraction_above = 0.0;
  std::vector<double> distances;
  std::vector<double> lambda_mins;
};

struct ConcentrationTable {
  double lambda_hat = 0.0;
  double lambda_stderr = 0.0;
  std::uint64_t reference_samples = 0;
  std::vector<ConcentrationRow> rows;
};

// For each width, `trials` independent discrete kernels compared with one
// high-sample continuous estimate. Widths must be strictly ascending.
ConcentrationTable kernel_concentration(const numerics::Rng& rng, const data::Dataset& dataset,
                                        double b, std::span<const std::size_t> widths,
                                        std::size_t trials,
                                        std::uint64_t reference_samples = 1'000'000,
                                        unsigned workers = 1);

}  // namespace hsrnet::ntk

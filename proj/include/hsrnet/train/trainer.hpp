#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/geometry/hsr_index.hpp"
#include "hsrnet/model/network.hpp"

namespace hsrnet::train {

enum class TrainMode { dense, weight_index, data_index };

const char* to_string(TrainMode mode);
// Accepts "dense", "weight-index", "data-index".
TrainMode parse_mode(std::string_view name);

// Stream ids under the run seed.
inline constexpr std::uint64_t kNetworkStream = 0;
inline constexpr std::uint64_t kEtaStream = 1;

struct TrainConfig {
  TrainMode mode = TrainMode::data_index;
  std::size_t width = 4096;
  std::uint64_t max_iters = 1000;
  std::optional<double> eta;  // empty: lambda_hat / (4 n^2)
  model::ShiftPolicy shift = model::ShiftPolicy::standard();
  std::uint64_t seed = 1;
  // Stop once |err(t)|^2 <= stop_threshold * |err(0)|^2.
  double stop_threshold = 1e-6;
  geometry::HsrConfig hsr;
  std::uint64_t mc_samples = 100'000;
  double divergence_factor = 10.0;
  // Compare the maintained fire sets with a dense rebuild after every
  // iteration and throw InternalConsistency on any difference.
  bool verify_ledger = false;
  unsigned workers = 1;

  void validate() const;
};

// Work per iteration in O(d) units. query, forward and maintain are inner
// products or bound evaluations; backward and update are d-vector
// accumulations and are reported separately.
struct PhaseOps {
  std::uint64_t query = 0;
  std::uint64_t forward = 0;
  std::uint64_t backward = 0;
  std::uint64_t update = 0;
  std::uint64_t maintain = 0;

  std::uint64_t inner_products() const { return query + forward + maintain; }
};

struct IterationRecord {
  std::uint64_t t = 0;
  double err2 = 0.0;
  std::uint64_t k_min = 0;
  std::uint64_t k_median = 0;
  std::uint64_t k_max = 0;
  std::uint64_t k_sum = 0;
  std::uint64_t k_argmax = 0;  // sample attaining k_max
  std::uint64_t flips = 0;     // sum_i |S_i,fire(t) xor S_i,fire(t-1)|
  std::uint64_t changed = 0;   // neurons whose weights moved in this step
  bool updated = false;        // false for the closing record
  PhaseOps ops;
  geometry::HsrStats hsr;
  double displacement = 0.0;  // max_r |w_r(t) - w_r(0)|
  double millis = 0.0;
};

struct TrainTrace {
  TrainMode mode = TrainMode::dense;
  std::size_t n = 0;
  std::size_t width = 0;
  double shift = 0.0;
  double eta = 0.0;
  bool eta_auto = false;
  double lambda_hat = 0.0;  // only when eta_auto
  double lambda_stderr = 0.0;
  std::uint64_t init_ops = 0;
  bool converged = false;
  std::vector<IterationRecord> records;

  std::vector<double> err2() const;
};

struct TrainResult {
  model::NetworkState net;
  std::vector<double> initial_weights;
  TrainTrace trace;
};

struct EtaEstimate {
  double eta = 0.0;
  double lambda_hat = 0.0;
  double lambda_stderr = 0.0;
};

// eta = lambda_hat / (4 n^2) with lambda_hat the smallest eigenvalue of a
// Monte-Carlo continuous kernel. Throws UnreliableLambda when lambda_hat is
// not above three standard errors.
EtaEstimate auto_eta(const data::Dataset& dataset, double b, std::uint64_t mc_samples,
                     std::uint64_t seed, unsigned workers = 1);

// Full-batch gradient descent. Dense scans every neuron; weight_index keeps a
// half-space index over the neuron weights and queries it with every sample
// each step; data_index keeps a static index over the samples and re-queries
// it with the weights of every neuron that moved. All three produce the same
// trajectory bitwise. Throws Divergence when |err(t)|^2 exceeds
// divergence_factor * |err(0)|^2.
TrainResult train(const TrainConfig& config, const data::Dataset& dataset);
TrainResult train_dense(TrainConfig config, const data::Dataset& dataset);
TrainResult train_weight_indexed(TrainConfig config, const data::Dataset& dataset);
TrainResult train_data_indexed(TrainConfig config, const data::Dataset& dataset);

}  // namespace hsrnet::train

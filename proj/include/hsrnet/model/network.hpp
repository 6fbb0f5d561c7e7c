#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/numerics/rng.hpp"

namespace hsrnet::model {

using NeuronId = std::uint32_t;

// How the activation shift b is chosen at initialisation.
struct ShiftPolicy {
  enum class Kind { fixed, alpha_rule };
  Kind kind = Kind::alpha_rule;
  double value = 0.2;  // b for fixed, alpha for alpha_rule

  static ShiftPolicy fixed(double b) { return {Kind::fixed, b}; }
  // b = sqrt(0.5 (1 - alpha) ln m); fire probability at init <= m^{-(1-alpha)/2}.
  static ShiftPolicy alpha(double alpha) { return {Kind::alpha_rule, alpha}; }
  // alpha = 0.2, i.e. b = sqrt(0.4 ln m) and about m^{4/5} firing neurons.
  static ShiftPolicy standard() { return alpha(0.2); }

  double resolve(std::size_t m) const;
};

struct SparseGradient;

// Two-layer shifted-ReLU network f(x) = m^{-1/2} sum_r a_r max(<w_r, x> - b, 0).
// Weights are stored neuron-major (w_r contiguous). Signs a and shift b are
// fixed at construction; only apply_update changes the weights.
class NetworkState {
 public:
  NetworkState(std::size_t d, double shift, std::vector<double> weights, std::vector<int> signs);

  std::size_t dim() const { return d_; }
  std::size_t width() const { return signs_.size(); }
  double shift() const { return shift_; }
  double inv_sqrt_width() const { return inv_sqrt_m_; }
  std::span<const double> weight(NeuronId r) const {
    return {weights_.data() + static_cast<std::size_t>(r) * d_, d_};
  }
  std::span<const double> weights() const { return weights_; }
  int sign(NeuronId r) const { return signs_[r]; }
  std::span<const int> signs() const { return signs_; }
  std::uint64_t step() const { return step_; }

 private:
  friend std::vector<NeuronId> apply_update(NetworkState&, const SparseGradient&, double);

  std::size_t d_;
  double shift_;
  double inv_sqrt_m_;
  std::vector<double> weights_;
  std::vector<int> signs_;
  std::uint64_t step_ = 0;
};

// Draws all of W (neuron by neuron, d Gaussians each) and then all signs.
NetworkState init_network(numerics::Rng& rng, std::size_t d, std::size_t m, ShiftPolicy shift);

inline double shifted_relu(double z, double b) { return z - b > 0.0 ? z - b : 0.0; }

// Network output at a unit vector x. With `active`, only those neurons
// (ascending, a superset of the firing set) are evaluated; the summation
// order matches the dense path, so both agree bitwise.
double forward(const NetworkState& net, std::span<const double> x,
               const std::vector<NeuronId>* active = nullptr);

struct LossValue {
  double loss = 0.0;
  std::vector<double> residual;  // f(x_i) - y_i
};

LossValue loss(const NetworkState& net, const data::Dataset& dataset);

// Per-neuron gradient rows for the neurons that fire on at least one sample,
// ascending by neuron id.
struct SparseGradient {
  std::size_t dim = 0;
  std::vector<NeuronId> neurons;
  std::vector<double> rows;  // neurons.size() * dim

  std::span<const double> row(std::size_t k) const { return {rows.data() + k * dim, dim}; }
};

// w_r <- w_r - eta * grad_r. Returns the neurons whose weights changed in at
// least one coordinate and advances the step counter.
std::vector<NeuronId> apply_update(NetworkState& net, const SparseGradient& grads, double eta);

// max_r |w_r - w_r(0)|_2 against a snapshot of the weights at step 0.
double weight_displacement(const NetworkState& net, std::span<const double> initial_weights);

}  // namespace hsrnet::model

#include "hsrnet/model/network.hpp"

#include <cmath>
#include <string>

#include "hsrnet/errors.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::model {

using numerics::dot;

double ShiftPolicy::resolve(std::size_t m) const {
  if (kind == Kind::fixed) {
    if (!std::isfinite(value)) throw InvalidArgument("shift must be finite");
    return value;
  }
  if (!(value >= 0.0 && value < 1.0)) throw InvalidArgument("shift alpha must lie in [0, 1)");
  return std::sqrt(0.5 * (1.0 - value) * std::log(static_cast<double>(m)));
}

NetworkState::NetworkState(std::size_t d, double shift, std::vector<double> weights,
                           std::vector<int> signs)
    : d_(d), shift_(shift), weights_(std::move(weights)), signs_(std::move(signs)) {
  if (d_ == 0 || signs_.empty()) throw InvalidArgument("NetworkState: need d >= 1 and m >= 1");
  if (weights_.size() != d_ * signs_.size())
    throw DimensionMismatch("NetworkState: weight buffer does not match m * d");
  for (int a : signs_)
    if (a != 1 && a != -1) throw InvalidArgument("NetworkState: output signs must be +1 or -1");
  inv_sqrt_m_ = 1.0 / std::sqrt(static_cast<double>(signs_.size()));
}

NetworkState init_network(numerics::Rng& rng, std::size_t d, std::size_t m, ShiftPolicy shift) {
  if (d == 0 || m == 0) throw InvalidArgument("init_network: need d >= 1 and m >= 1");
  if (m > std::size_t{1} << 31) throw InvalidArgument("init_network: width too large");
  const double b = shift.resolve(m);
  std::vector<double> w(m * d);
  for (auto& v : w) v = rng.gaussian();
  std::vector<int> a(m);
  for (auto& s : a) s = rng.rademacher();
  return NetworkState(d, b, std::move(w), std::move(a));
}

double forward(const NetworkState& net, std::span<const double> x,
               const std::vector<NeuronId>* active) {
  if (x.size() != net.dim()) throw DimensionMismatch("forward: input dimension mismatch");
  const double norm = numerics::norm2(x);
  if (!(std::abs(norm - 1.0) <= 1e-9)) throw InvalidArgument("forward: input is not unit norm");

  const double b = net.shift();
  double s = 0.0;
  auto term = [&](NeuronId r) {
    const double z = dot(net.weight(r), x);
    if (z - b > 0.0) s += net.sign(r) * (z - b);
  };
  if (active) {
    for (NeuronId r : *active) {
      if (r >= net.width()) throw InvalidArgument("forward: active neuron out of range");
      term(r);
    }
  } else {
    for (NeuronId r = 0; r < net.width(); ++r) term(r);
  }
  return s * net.inv_sqrt_width();
}

LossValue loss(const NetworkState& net, const data::Dataset& dataset) {
  if (dataset.dim() != net.dim()) throw DimensionMismatch("loss: dataset dimension mismatch");
  LossValue out;
  out.residual.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out.residual[i] = forward(net, dataset.x(i)) - dataset.y(i);
    out.loss += out.residual[i] * out.residual[i];
  }
  out.loss *= 0.5;
  return out;
}

std::vector<NeuronId> apply_update(NetworkState& net, const SparseGradient& grads, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw InvalidArgument("apply_update: learning rate must be positive");
  if (grads.dim != net.d_ || grads.rows.size() != grads.neurons.size() * net.d_)
    throw DimensionMismatch("apply_update: gradient shape mismatch");
  std::vector<NeuronId> changed;
  for (std::size_t k = 0; k < grads.neurons.size(); ++k) {
    const NeuronId r = grads.neurons[k];
    if (r >= net.width()) throw InvalidArgument("apply_update: neuron out of range");
    double* w = net.weights_.data() + static_cast<std::size_t>(r) * net.d_;
    const auto g = grads.row(k);
    bool moved = false;
    for (std::size_t j = 0; j < net.d_; ++j) {
      const double next = w[j] - eta * g[j];
      moved |= next != w[j];
      w[j] = next;
    }
    if (moved) changed.push_back(r);
  }
  ++net.step_;
  return changed;
}

double weight_displacement(const NetworkState& net, std::span<const double> initial_weights) {
  if (initial_weights.size() != net.weights().size())
    throw DimensionMismatch("weight_displacement: snapshot shape mismatch");
  double worst = 0.0;
  for (NeuronId r = 0; r < net.width(); ++r) {
    const auto w0 = initial_weights.subspan(static_cast<std::size_t>(r) * net.dim(), net.dim());
    worst = std::max(worst, numerics::distance(net.weight(r), w0));
  }
  return worst;
}

}  // namespace hsrnet::model

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/model/network.hpp"

namespace hsrnet::model {

using SampleId = std::uint32_t;

// Both views of the firing relation: neurons firing on each sample and
// samples each neuron fires on. Every list is kept sorted ascending and the
// two views always describe the same set of pairs.
class FireLedger {
 public:
  FireLedger(std::size_t samples, std::size_t neurons);

  // Builds from per-sample lists (each sorted ascending).
  static FireLedger from_samples(std::size_t neurons, std::vector<std::vector<NeuronId>> by_sample);
  // Builds from per-neuron lists (each sorted ascending).
  static FireLedger from_neurons(std::size_t samples, std::vector<std::vector<SampleId>> by_neuron);

  std::size_t samples() const { return by_sample_.size(); }
  std::size_t neurons() const { return by_neuron_.size(); }
  const std::vector<NeuronId>& fired_on(SampleId i) const { return by_sample_[i]; }
  const std::vector<SampleId>& fires_for(NeuronId r) const { return by_neuron_[r]; }
  std::uint64_t total() const { return total_; }

  // Replaces neuron r's sample set: removes r from every old sample list and
  // adds it to every new one.
  void reassign_neuron(NeuronId r, std::span<const SampleId> samples);

  // Full duality check, O(total log).
  bool consistent() const;

  friend bool operator==(const FireLedger& a, const FireLedger& b) {
    return a.by_sample_ == b.by_sample_ && a.by_neuron_ == b.by_neuron_;
  }

 private:
  std::vector<std::vector<NeuronId>> by_sample_;
  std::vector<std::vector<SampleId>> by_neuron_;
  std::uint64_t total_ = 0;
};

// Neurons that flip between two ledgers for each sample (symmetric
// difference of the per-sample lists).
std::vector<std::uint64_t> flip_counts(const FireLedger& before, const FireLedger& after);

// Residuals f(x_i) - y_i evaluated only over each sample's firing neurons.
// Adds one inner product per (i, r) pair to *ops when given.
std::vector<double> residuals(const NetworkState& net, const data::Dataset& dataset,
                              const FireLedger& ledger, std::uint64_t* ops = nullptr,
                              unsigned workers = 1);

// grad_r = m^{-1/2} a_r sum_{i : r fires on i} (f(x_i) - y_i) x_i, summed in
// ascending i. Throws InternalConsistency when the ledger shape does not
// match the network and dataset.
SparseGradient gradient(const NetworkState& net, const data::Dataset& dataset,
                        const FireLedger& ledger, std::span<const double> residual);
SparseGradient gradient(const NetworkState& net, const data::Dataset& dataset,
                        const FireLedger& ledger);

}  // namespace hsrnet::model

#include "hsrnet/model/fire_ledger.hpp"

#include <algorithm>

#include "hsrnet/errors.hpp"
#include "hsrnet/numerics/parallel.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::model {

FireLedger::FireLedger(std::size_t samples, std::size_t neurons)
    : by_sample_(samples), by_neuron_(neurons) {}

FireLedger FireLedger::from_samples(std::size_t neurons,
                                    std::vector<std::vector<NeuronId>> by_sample) {
  FireLedger ledger(by_sample.size(), neurons);
  for (SampleId i = 0; i < by_sample.size(); ++i) {
    for (NeuronId r : by_sample[i]) {
      if (r >= neurons) throw InternalConsistency("FireLedger: neuron id out of range");
      ledger.by_neuron_[r].push_back(i);
    }
    ledger.total_ += by_sample[i].size();
  }
  ledger.by_sample_ = std::move(by_sample);
  return ledger;
}

FireLedger FireLedger::from_neurons(std::size_t samples,
                                    std::vector<std::vector<SampleId>> by_neuron) {
  FireLedger ledger(samples, by_neuron.size());
  for (NeuronId r = 0; r < by_neuron.size(); ++r) {
    for (SampleId i : by_neuron[r]) {
      if (i >= samples) throw InternalConsistency("FireLedger: sample id out of range");
      ledger.by_sample_[i].push_back(r);
    }
    ledger.total_ += by_neuron[r].size();
  }
  ledger.by_neuron_ = std::move(by_neuron);
  return ledger;
}

void FireLedger::reassign_neuron(NeuronId r, std::span<const SampleId> samples) {
  auto& old = by_neuron_[r];
  for (SampleId i : old) {
    auto& list = by_sample_[i];
    auto it = std::lower_bound(list.begin(), list.end(), r);
    if (it == list.end() || *it != r) throw InternalConsistency("FireLedger: views disagree");
    list.erase(it);
  }
  total_ -= old.size();
  old.assign(samples.begin(), samples.end());
  for (SampleId i : old) {
    if (i >= by_sample_.size()) throw InternalConsistency("FireLedger: sample id out of range");
    auto& list = by_sample_[i];
    list.insert(std::lower_bound(list.begin(), list.end(), r), r);
  }
  total_ += old.size();
}

bool FireLedger::consistent() const {
  std::uint64_t from_samples = 0, from_neurons = 0;
  for (SampleId i = 0; i < by_sample_.size(); ++i) {
    const auto& list = by_sample_[i];
    if (!std::is_sorted(list.begin(), list.end())) return false;
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) return false;
    for (NeuronId r : list) {
      if (r >= by_neuron_.size()) return false;
      const auto& back = by_neuron_[r];
      if (!std::binary_search(back.begin(), back.end(), i)) return false;
    }
    from_samples += list.size();
  }
  for (const auto& list : by_neuron_) {
    if (!std::is_sorted(list.begin(), list.end())) return false;
    from_neurons += list.size();
  }
  return from_samples == from_neurons && from_samples == total_;
}

std::vector<std::uint64_t> flip_counts(const FireLedger& before, const FireLedger& after) {
  if (before.samples() != after.samples())
    throw InternalConsistency("flip_counts: ledgers cover different samples");
  std::vector<std::uint64_t> flips(before.samples());
  for (SampleId i = 0; i < before.samples(); ++i) {
    const auto& a = before.fired_on(i);
    const auto& b = after.fired_on(i);
    std::size_t p = 0, q = 0, count = 0;
    while (p < a.size() && q < b.size()) {
      if (a[p] == b[q]) {
        ++p;
        ++q;
      } else if (a[p] < b[q]) {
        ++p;
        ++count;
      } else {
        ++q;
        ++count;
      }
    }
    flips[i] = count + (a.size() - p) + (b.size() - q);
  }
  return flips;
}

namespace {

void check_shape(const NetworkState& net, const data::Dataset& dataset, const FireLedger& ledger) {
  if (ledger.samples() != dataset.size() || ledger.neurons() != net.width() ||
      dataset.dim() != net.dim())
    throw InternalConsistency("fire ledger does not match the network and dataset");
}

}  // namespace

std::vector<double> residuals(const NetworkState& net, const data::Dataset& dataset,
                              const FireLedger& ledger, std::uint64_t* ops, unsigned workers) {
  check_shape(net, dataset, ledger);
  const double b = net.shift();
  std::vector<double> res(dataset.size());
  numerics::parallel_for(dataset.size(), workers, [&](std::size_t i) {
    const auto x = dataset.x(i);
    double s = 0.0;
    for (NeuronId r : ledger.fired_on(static_cast<SampleId>(i))) {
      const double z = numerics::dot(net.weight(r), x);
      if (z - b > 0.0) s += net.sign(r) * (z - b);
    }
    res[i] = s * net.inv_sqrt_width() - dataset.y(i);
  });
  if (ops) *ops += ledger.total();
  return res;
}

SparseGradient gradient(const NetworkState& net, const data::Dataset& dataset,
                        const FireLedger& ledger, std::span<const double> residual) {
  check_shape(net, dataset, ledger);
  if (residual.size() != dataset.size())
    throw InternalConsistency("gradient: residual length mismatch");
  const std::size_t d = net.dim();
  SparseGradient g;
  g.dim = d;
  for (NeuronId r = 0; r < net.width(); ++r) {
    const auto& samples = ledger.fires_for(r);
    if (samples.empty()) continue;
    const std::size_t base = g.rows.size();
    g.neurons.push_back(r);
    g.rows.resize(base + d, 0.0);
    double* row = g.rows.data() + base;
    for (SampleId i : samples) {
      const auto x = dataset.x(i);
      for (std::size_t j = 0; j < d; ++j) row[j] += residual[i] * x[j];
    }
    const double coef = net.sign(r) * net.inv_sqrt_width();
    for (std::size_t j = 0; j < d; ++j) row[j] *= coef;
  }
  return g;
}

SparseGradient gradient(const NetworkState& net, const data::Dataset& dataset,
                        const FireLedger& ledger) {
  return gradient(net, dataset, ledger, residuals(net, dataset, ledger));
}

}  // namespace hsrnet::model

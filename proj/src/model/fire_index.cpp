#include "hsrnet/model/fire_index.hpp"

#include <algorithm>

#include "hsrnet/errors.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::model {

WeightIndex::WeightIndex(const NetworkState& net, geometry::HsrConfig config)
    : index_(geometry::HsrIndex::build(net.dim(), net.weights(), config)) {
  point_of_neuron_.resize(net.width());
  for (NeuronId r = 0; r < net.width(); ++r) {
    point_of_neuron_[r] = r;
    neuron_of_point_.emplace(r, r);
  }
}

geometry::QueryCost WeightIndex::fired_on(std::span<const double> x, double b,
                                          std::vector<NeuronId>& out) const {
  std::vector<geometry::PointId> ids;
  const auto cost = index_.query(x, b, ids);
  out.clear();
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(neuron_of_point_.at(id));
  std::sort(out.begin(), out.end());
  return cost;
}

void WeightIndex::refresh(const NetworkState& net, std::span<const NeuronId> changed) {
  std::vector<geometry::PointId> stale;
  std::vector<double> fresh;
  stale.reserve(changed.size());
  fresh.reserve(changed.size() * net.dim());
  for (NeuronId r : changed) {
    stale.push_back(point_of_neuron_.at(r));
    const auto w = net.weight(r);
    fresh.insert(fresh.end(), w.begin(), w.end());
  }
  const auto ids = index_.update_batch(stale, fresh);
  for (std::size_t k = 0; k < changed.size(); ++k) {
    neuron_of_point_.erase(stale[k]);
    point_of_neuron_[changed[k]] = ids[k];
    neuron_of_point_.emplace(ids[k], changed[k]);
  }
}

bool WeightIndex::matches(const NetworkState& net) const {
  return index_.dim() == net.dim() && index_.live_count() == net.width() &&
         point_of_neuron_.size() == net.width();
}

bool WeightIndex::in_sync(const NetworkState& net) const {
  if (!matches(net)) return false;
  for (NeuronId r = 0; r < net.width(); ++r) {
    if (!index_.contains(point_of_neuron_[r])) return false;
    const auto stored = index_.point(point_of_neuron_[r]);
    const auto w = net.weight(r);
    if (!std::equal(stored.begin(), stored.end(), w.begin())) return false;
  }
  return true;
}

DataIndex::DataIndex(const data::Dataset& dataset, geometry::HsrConfig config)
    : index_(geometry::HsrIndex::build(dataset.dim(), dataset.points(), config)) {}

geometry::QueryCost DataIndex::fires_for(std::span<const double> w, double b,
                                         std::vector<SampleId>& out) const {
  std::vector<geometry::PointId> ids;
  const auto cost = index_.query(w, b, ids);
  out.assign(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  return cost;
}

bool DataIndex::matches(const data::Dataset& dataset) const {
  return index_.dim() == dataset.dim() && index_.live_count() == dataset.size();
}

FireLedger rebuild_ledger(const NetworkState& net, const data::Dataset& dataset,
                          const FireQueryEngine& engine, std::uint64_t* ops) {
  if (dataset.dim() != net.dim()) throw DimensionMismatch("rebuild_ledger: dimension mismatch");
  const double b = net.shift();
  std::uint64_t spent = 0;
  FireLedger ledger(0, 0);

  if (std::holds_alternative<DenseScan>(engine)) {
    std::vector<std::vector<NeuronId>> by_sample(dataset.size());
    for (SampleId i = 0; i < dataset.size(); ++i) {
      const auto x = dataset.x(i);
      for (NeuronId r = 0; r < net.width(); ++r)
        if (numerics::dot(net.weight(r), x) - b > 0.0) by_sample[i].push_back(r);
    }
    spent = static_cast<std::uint64_t>(dataset.size()) * net.width();
    ledger = FireLedger::from_samples(net.width(), std::move(by_sample));
  } else if (const auto* wi = std::get_if<const WeightIndex*>(&engine)) {
    if (!*wi || !(*wi)->matches(net))
      throw InternalConsistency("rebuild_ledger: weight index does not match the network");
    std::vector<std::vector<NeuronId>> by_sample(dataset.size());
    for (SampleId i = 0; i < dataset.size(); ++i)
      spent += (*wi)->fired_on(dataset.x(i), b, by_sample[i]).ops();
    ledger = FireLedger::from_samples(net.width(), std::move(by_sample));
  } else {
    const DataIndex* di = std::get<const DataIndex*>(engine);
    if (!di || !di->matches(dataset))
      throw InternalConsistency("rebuild_ledger: data index does not match the dataset");
    std::vector<std::vector<SampleId>> by_neuron(net.width());
    for (NeuronId r = 0; r < net.width(); ++r)
      spent += di->fires_for(net.weight(r), b, by_neuron[r]).ops();
    ledger = FireLedger::from_neurons(dataset.size(), std::move(by_neuron));
  }
  if (ops) *ops += spent;
  return ledger;
}

}  // namespace hsrnet::model

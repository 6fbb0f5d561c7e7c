#pragma once

#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/geometry/hsr_index.hpp"
#include "hsrnet/model/fire_ledger.hpp"
#include "hsrnet/model/network.hpp"

namespace hsrnet::model {

// Half-space index over the neuron weights. A query with sample x and the
// shift b returns the neurons firing on x.
class WeightIndex {
 public:
  WeightIndex(const NetworkState& net, geometry::HsrConfig config);

  // Replaces `out` with the neurons firing on x, ascending.
  geometry::QueryCost fired_on(std::span<const double> x, double b,
                               std::vector<NeuronId>& out) const;
  // Deletes the stored points of `changed` and inserts their current weights.
  void refresh(const NetworkState& net, std::span<const NeuronId> changed);
  // Point count and dimension agree with the network.
  bool matches(const NetworkState& net) const;
  // Every stored point equals the neuron's current weights bitwise.
  bool in_sync(const NetworkState& net) const;

  const geometry::HsrIndex& index() const { return index_; }
  geometry::HsrIndex& index() { return index_; }

 private:
  geometry::HsrIndex index_;
  std::vector<geometry::PointId> point_of_neuron_;
  std::unordered_map<geometry::PointId, NeuronId> neuron_of_point_;
};

// Static half-space index over the data points. A query with weights w_r and
// the shift b returns the samples neuron r fires on.
class DataIndex {
 public:
  DataIndex(const data::Dataset& dataset, geometry::HsrConfig config);

  geometry::QueryCost fires_for(std::span<const double> w, double b,
                                std::vector<SampleId>& out) const;
  bool matches(const data::Dataset& dataset) const;

  const geometry::HsrIndex& index() const { return index_; }
  geometry::HsrIndex& index() { return index_; }

 private:
  geometry::HsrIndex index_;
};

struct DenseScan {};
using FireQueryEngine = std::variant<DenseScan, const WeightIndex*, const DataIndex*>;

// Computes both fire-set views from scratch with the given engine. All
// engines produce identical ledgers. Throws InternalConsistency when the
// engine was built over a different point set. `ops` receives the number of
// O(d) evaluations spent.
FireLedger rebuild_ledger(const NetworkState& net, const data::Dataset& dataset,
                          const FireQueryEngine& engine, std::uint64_t* ops = nullptr);

}  // namespace hsrnet::model

#include "hsrnet/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "hsrnet/errors.hpp"
#include "hsrnet/model/fire_index.hpp"
#include "hsrnet/model/fire_ledger.hpp"
#include "hsrnet/ntk/kernel.hpp"
#include "hsrnet/numerics/parallel.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::train {

using model::FireLedger;
using model::NeuronId;
using model::SampleId;

const char* to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::dense:
      return "dense";
    case TrainMode::weight_index:
      return "weight-index";
    case TrainMode::data_index:
      return "data-index";
  }
  return "unknown";
}

TrainMode parse_mode(std::string_view name) {
  if (name == "dense") return TrainMode::dense;
  if (name == "weight-index") return TrainMode::weight_index;
  if (name == "data-index") return TrainMode::data_index;
  throw InvalidArgument("unknown training mode '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (width == 0) throw InvalidArgument("width must be >= 1");
  if (max_iters == 0) throw InvalidArgument("max iterations must be >= 1");
  if (eta && !(*eta > 0.0 && std::isfinite(*eta)))
    throw InvalidArgument("learning rate must be positive");
  if (!(stop_threshold > 0.0 && stop_threshold <= 1.0))
    throw InvalidArgument("stop threshold must lie in (0, 1]");
  if (mc_samples == 0) throw InvalidArgument("mc samples must be >= 1");
  if (!(divergence_factor > 1.0)) throw InvalidArgument("divergence factor must exceed 1");
}

std::vector<double> TrainTrace::err2() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.err2);
  return out;
}

EtaEstimate auto_eta(const data::Dataset& dataset, double b, std::uint64_t mc_samples,
                     std::uint64_t seed, unsigned workers) {
  const auto report =
      ntk::h_continuous_mc(numerics::Rng(seed, kEtaStream), dataset, b, mc_samples, workers);
  if (!(report.lambda_min > 3.0 * report.lambda_stderr))
    throw UnreliableLambda("lambda_hat = " + std::to_string(report.lambda_min) +
                           " is within three standard errors (" +
                           std::to_string(report.lambda_stderr) +
                           ") of zero; increase the Monte-Carlo sample count");
  const double n = static_cast<double>(dataset.size());
  return {report.lambda_min / (4.0 * n * n), report.lambda_min, report.lambda_stderr};
}

namespace {

std::uint64_t symmetric_difference(const std::vector<NeuronId>& a, const std::vector<NeuronId>& b) {
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
  return count + (a.size() - p) + (b.size() - q);
}

void fill_fire_stats(IterationRecord& rec, const FireLedger& ledger) {
  std::vector<std::uint64_t> k(ledger.samples());
  for (SampleId i = 0; i < ledger.samples(); ++i) k[i] = ledger.fired_on(i).size();
  const auto max_it = std::max_element(k.begin(), k.end());
  rec.k_max = *max_it;
  rec.k_argmax = static_cast<std::uint64_t>(max_it - k.begin());
  rec.k_min = *std::min_element(k.begin(), k.end());
  rec.k_sum = ledger.total();
  std::nth_element(k.begin(), k.begin() + k.size() / 2, k.end());
  rec.k_median = k[k.size() / 2];
}

// Dense forward pass: every (sample, neuron) inner product, recording the
// fire sets on the way.
FireLedger dense_forward(const model::NetworkState& net, const data::Dataset& dataset,
                         std::vector<double>& residual, unsigned workers) {
  const double b = net.shift();
  std::vector<std::vector<NeuronId>> fired(dataset.size());
  residual.assign(dataset.size(), 0.0);
  numerics::parallel_for(dataset.size(), workers, [&](std::size_t i) {
    const auto x = dataset.x(i);
    double s = 0.0;
    for (NeuronId r = 0; r < net.width(); ++r) {
      const double z = numerics::dot(net.weight(r), x);
      if (z - b > 0.0) {
        s += net.sign(r) * (z - b);
        fired[i].push_back(r);
      }
    }
    residual[i] = s * net.inv_sqrt_width() - dataset.y(i);
  });
  return FireLedger::from_samples(net.width(), std::move(fired));
}

}  // namespace

TrainResult train(const TrainConfig& config, const data::Dataset& dataset) {
  config.validate();
  using clock = std::chrono::steady_clock;

  numerics::Rng init_rng(config.seed, kNetworkStream);
  model::NetworkState net =
      model::init_network(init_rng, dataset.dim(), config.width, config.shift);
  std::vector<double> initial(net.weights().begin(), net.weights().end());
  const double b = net.shift();
  const std::size_t n = dataset.size();

  TrainTrace trace;
  trace.mode = config.mode;
  trace.n = n;
  trace.width = config.width;
  trace.shift = b;
  if (config.eta) {
    trace.eta = *config.eta;
  } else {
    const auto est = auto_eta(dataset, b, config.mc_samples, config.seed, config.workers);
    trace.eta = est.eta;
    trace.eta_auto = true;
    trace.lambda_hat = est.lambda_hat;
    trace.lambda_stderr = est.lambda_stderr;
  }

  std::optional<model::WeightIndex> weight_index;
  std::optional<model::DataIndex> data_index;
  FireLedger ledger(n, config.width);
  if (config.mode == TrainMode::weight_index) {
    weight_index.emplace(net, config.hsr);
    trace.init_ops = weight_index->index().stats().maintenance_ops;
  } else if (config.mode == TrainMode::data_index) {
    data_index.emplace(dataset, config.hsr);
    trace.init_ops = data_index->index().stats().maintenance_ops;
    std::vector<std::vector<SampleId>> by_neuron(config.width);
    std::vector<geometry::QueryCost> costs(config.width);
    numerics::parallel_for(config.width, config.workers, [&](std::size_t r) {
      costs[r] = data_index->fires_for(net.weight(static_cast<NeuronId>(r)), b, by_neuron[r]);
    });
    for (const auto& c : costs) {
      data_index->index().account(c);
      trace.init_ops += c.ops();
    }
    ledger = FireLedger::from_neurons(n, std::move(by_neuron));
  }

  std::vector<std::vector<NeuronId>> previous;
  double err2_initial = 0.0;
  for (std::uint64_t t = 0;; ++t) {
    const auto start = clock::now();
    IterationRecord rec;
    rec.t = t;
    std::vector<double> residual;

    switch (config.mode) {
      case TrainMode::dense:
        ledger = dense_forward(net, dataset, residual, config.workers);
        rec.ops.forward = static_cast<std::uint64_t>(n) * config.width;
        break;
      case TrainMode::weight_index: {
        std::vector<std::vector<NeuronId>> fired(n);
        std::vector<geometry::QueryCost> costs(n);
        numerics::parallel_for(n, config.workers, [&](std::size_t i) {
          costs[i] = weight_index->fired_on(dataset.x(i), b, fired[i]);
        });
        for (const auto& c : costs) {
          weight_index->index().account(c);
          rec.ops.query += c.ops();
        }
        ledger = FireLedger::from_samples(config.width, std::move(fired));
        residual = model::residuals(net, dataset, ledger, &rec.ops.forward, config.workers);
        break;
      }
      case TrainMode::data_index:
        residual = model::residuals(net, dataset, ledger, &rec.ops.forward, config.workers);
        break;
    }

    for (double e : residual) rec.err2 += e * e;
    fill_fire_stats(rec, ledger);
    if (t > 0)
      for (SampleId i = 0; i < n; ++i)
        rec.flips += symmetric_difference(previous[i], ledger.fired_on(i));
    previous.resize(n);
    for (SampleId i = 0; i < n; ++i) previous[i] = ledger.fired_on(i);
    rec.displacement = model::weight_displacement(net, initial);

    if (t == 0) err2_initial = rec.err2;
    if (rec.err2 > config.divergence_factor * err2_initial)
      throw Divergence("squared error " + std::to_string(rec.err2) + " at step " +
                       std::to_string(t) + " exceeds " + std::to_string(config.divergence_factor) +
                       "x the initial " + std::to_string(err2_initial));
    const bool stop = rec.err2 <= config.stop_threshold * err2_initial;
    if (stop || t == config.max_iters) {
      trace.converged = stop;
      if (weight_index) rec.hsr = weight_index->index().stats();
      if (data_index) rec.hsr = data_index->index().stats();
      rec.millis = std::chrono::duration<double, std::milli>(clock::now() - start).count();
      trace.records.push_back(rec);
      break;
    }

    const auto grads = model::gradient(net, dataset, ledger, residual);
    rec.ops.backward = ledger.total();
    rec.ops.update = grads.neurons.size();
    const auto changed = model::apply_update(net, grads, trace.eta);
    rec.changed = changed.size();
    rec.updated = true;

    if (weight_index) {
      const auto before = weight_index->index().stats().maintenance_ops;
      weight_index->refresh(net, changed);
      rec.ops.maintain = weight_index->index().stats().maintenance_ops - before;
      if (config.verify_ledger && !weight_index->in_sync(net))
        throw InternalConsistency("weight index is out of sync with the network at step " +
                                  std::to_string(t + 1));
    } else if (data_index) {
      std::vector<std::vector<SampleId>> fresh(changed.size());
      std::vector<geometry::QueryCost> costs(changed.size());
      numerics::parallel_for(changed.size(), config.workers, [&](std::size_t k) {
        costs[k] = data_index->fires_for(net.weight(changed[k]), b, fresh[k]);
      });
      for (std::size_t k = 0; k < changed.size(); ++k) {
        data_index->index().account(costs[k]);
        rec.ops.maintain += costs[k].ops();
        ledger.reassign_neuron(changed[k], fresh[k]);
      }
      if (config.verify_ledger) {
        const auto scratch = model::rebuild_ledger(net, dataset, model::DenseScan{});
        if (!(scratch == ledger) || !ledger.consistent())
          throw InternalConsistency("maintained fire sets differ from a rebuild at step " +
                                    std::to_string(t + 1));
      }
    }
    if (weight_index) rec.hsr = weight_index->index().stats();
    if (data_index) rec.hsr = data_index->index().stats();
    rec.millis = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    trace.records.push_back(rec);
  }

  return TrainResult{std::move(net), std::move(initial), std::move(trace)};
}

TrainResult train_dense(TrainConfig config, const data::Dataset& dataset) {
  config.mode = TrainMode::dense;
  return train(config, dataset);
}

TrainResult train_weight_indexed(TrainConfig config, const data::Dataset& dataset) {
  config.mode = TrainMode::weight_index;
  return train(config, dataset);
}

TrainResult train_data_indexed(TrainConfig config, const data::Dataset& dataset) {
  config.mode = TrainMode::data_index;
  return train(config, dataset);
}

}  // namespace hsrnet::train

#include "hsrnet/train/bench.hpp"

#include <algorithm>

#include "hsrnet/errors.hpp"

namespace hsrnet::train {

namespace {

constexpr std::uint64_t kBenchDataStream = 2;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.widths.empty() || config.modes.empty())
    throw InvalidArgument("bench: width grid and mode list must be non-empty");
  if (config.iterations == 0) throw InvalidArgument("bench: iterations must be >= 1");

  numerics::Rng data_rng(config.seed, kBenchDataStream);
  const auto dataset = data::gen_separated(data_rng, config.n, config.d, config.delta);

  std::vector<BenchRow> rows;
  for (std::size_t m : config.widths) {
    const double b = config.shift.resolve(m);
    std::optional<double> eta = config.eta;
    if (!eta) eta = auto_eta(dataset, b, config.mc_samples, config.seed, config.workers).eta;
    for (TrainMode mode : config.modes) {
      TrainConfig tc;
      tc.mode = mode;
      tc.width = m;
      tc.max_iters = config.iterations;
      tc.eta = eta;
      tc.shift = config.shift;
      tc.seed = config.seed;
      tc.hsr = config.hsr;
      tc.workers = config.workers;
      const auto result = train(tc, dataset);

      std::vector<double> ops, millis;
      for (const auto& rec : result.trace.records) {
        if (!rec.updated) continue;
        ops.push_back(static_cast<double>(rec.ops.inner_products()));
        millis.push_back(rec.millis);
      }
      BenchRow row;
      row.width = m;
      row.mode = mode;
      row.shift = b;
      row.median_ops = median(ops);
      row.median_millis = median(millis);
      row.dense_equivalent = static_cast<std::uint64_t>(config.n) * m;
      row.ops_fraction = row.median_ops / static_cast<double>(row.dense_equivalent);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace hsrnet::train

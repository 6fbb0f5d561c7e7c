#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hsrnet/geometry/hsr_index.hpp"
#include "hsrnet/model/network.hpp"
#include "hsrnet/train/trainer.hpp"

namespace hsrnet::train {

struct BenchConfig {
  std::vector<std::size_t> widths{1024, 4096, 16384};
  std::vector<TrainMode> modes{TrainMode::dense, TrainMode::weight_index, TrainMode::data_index};
  std::size_t n = 32;
  std::size_t d = 8;
  double delta = 0.5;
  std::uint64_t iterations = 5;
  std::uint64_t seed = 1;
  std::optional<double> eta;
  model::ShiftPolicy shift = model::ShiftPolicy::standard();
  geometry::HsrConfig hsr;
  std::uint64_t mc_samples = 100'000;
  unsigned workers = 1;
};

struct BenchRow {
  std::size_t width = 0;
  TrainMode mode = TrainMode::dense;
  double shift = 0.0;
  double median_ops = 0.0;  // inner products per full iteration
  double median_millis = 0.0;
  std::uint64_t dense_equivalent = 0;  // n * m
  double ops_fraction = 0.0;           // median_ops / dense_equivalent
};

// One row per (width, mode), widths outermost. The dataset is generated once
// from the seed and shared by every run.
std::vector<BenchRow> run_bench(const BenchConfig& config);

}  // namespace hsrnet::train

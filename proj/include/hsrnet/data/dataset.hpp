#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hsrnet/numerics/rng.hpp"

namespace hsrnet::data {

// n unit-norm points in R^d with real labels. Construction validates the
// norms (within 1e-9) and, for n >= 2, that no two points are equal or
// antipodal; the measured separability is stored alongside.
class Dataset {
 public:
  Dataset(std::size_t d, std::vector<double> points, std::vector<double> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return d_; }
  std::span<const double> x(std::size_t i) const { return {points_.data() + i * d_, d_}; }
  double y(std::size_t i) const { return labels_[i]; }
  std::span<const double> points() const { return points_; }
  std::span<const double> labels() const { return labels_; }
  // min_{i != j} min(|x_i - x_j|, |x_i + x_j|); +inf for a single point.
  double separability() const { return delta_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t d_;
  std::vector<double> points_;
  std::vector<double> labels_;
  double delta_;
};

enum class LabelMode { pm_one, uniform };

// Rejection sampling on the sphere: a candidate is kept when it is at least
// delta_target away from every accepted point and its antipode. After
// 1000 * n rejected candidates in total the generator falls back to a random
// orthonormal set when n <= d, and otherwise throws PackingInfeasible.
Dataset gen_separated(numerics::Rng& rng, std::size_t n, std::size_t d, double delta_target,
                      LabelMode labels = LabelMode::pm_one);

// Scales x to unit l2 norm. Rows already within 1e-12 of unit norm are
// returned unchanged, which makes normalisation idempotent bitwise.
// Throws DegenerateData for a zero vector.
void normalize_row(std::span<double> x);

// CSV with header "f0,...,f{d-1},label" and one point per line.
Dataset ingest_csv(const std::filesystem::path& path, bool normalize);
// Writes 17 significant digits so that ingest_csv reproduces the data bitwise.
void export_csv(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace hsrnet::data

#include "hsrnet/data/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "hsrnet/errors.hpp"
#include "hsrnet/ntk/separability.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::data {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kNormalizedTolerance = 1e-12;

}  // namespace

Dataset::Dataset(std::size_t d, std::vector<double> points, std::vector<double> labels)
    : d_(d), points_(std::move(points)), labels_(std::move(labels)), delta_(INFINITY) {
  if (d_ == 0) throw InvalidArgument("Dataset: dimension must be >= 1");
  if (labels_.empty()) throw InvalidArgument("Dataset: at least one point is required");
  if (points_.size() != labels_.size() * d_)
    throw DimensionMismatch("Dataset: point buffer does not match n * d");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!std::isfinite(labels_[i])) throw NumericInput("Dataset: non-finite label");
    const double norm = numerics::norm2(x(i));
    if (!(std::abs(norm - 1.0) <= kUnitTolerance))
      throw InvalidArgument("Dataset: point " + std::to_string(i) + " has norm " +
                            std::to_string(norm) + ", expected 1");
  }
  if (labels_.size() >= 2) delta_ = ntk::separability(points_, d_).delta;
}

void normalize_row(std::span<double> x) {
  const double norm = numerics::norm2(x);
  if (norm == 0.0) throw DegenerateData("normalize: zero-norm row");
  if (!std::isfinite(norm)) throw NumericInput("normalize: non-finite row");
  if (std::abs(norm - 1.0) <= kNormalizedTolerance) return;
  for (double& v : x) v /= norm;
}

namespace {

// Min over accepted points of min(|c - x|, |c + x|), computed exactly as the
// separability scan does.
bool far_enough(std::span<const double> accepted, std::size_t d, std::span<const double> x,
                double delta) {
  const std::size_t n = accepted.size() / d;
  for (std::size_t i = 0; i < n; ++i) {
    double minus = 0.0, plus = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double a = accepted[i * d + k], b = x[k];
      minus += (a - b) * (a - b);
      plus += (a + b) * (a + b);
    }
    if (std::sqrt(minus) < delta || std::sqrt(plus) < delta) return false;
  }
  return true;
}

std::vector<double> random_orthonormal(numerics::Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> q(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> v(q.data() + i * d, d);
    for (;;) {
      for (auto& c : v) c = rng.gaussian();
      // Two Gram-Schmidt passes keep the basis orthogonal to rounding level.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < i; ++k) {
          std::span<const double> u(q.data() + k * d, d);
          const double c = numerics::dot(v, u);
          for (std::size_t j = 0; j < d; ++j) v[j] -= c * u[j];
        }
      }
      const double norm = numerics::norm2(v);
      if (norm > 1e-6) {
        for (auto& c : v) c /= norm;
        break;
      }
    }
  }
  return q;
}

}  // namespace

Dataset gen_separated(numerics::Rng& rng, std::size_t n, std::size_t d, double delta_target,
                      LabelMode labels) {
  if (n < 2) throw InvalidArgument("gen_separated: n must be >= 2");
  if (d < 2) throw InvalidArgument("gen_separated: d must be >= 2");
  if (!(delta_target > 0.0 && delta_target < std::sqrt(2.0)))
    throw InvalidArgument("gen_separated: delta target must lie in (0, sqrt(2))");

  const std::size_t budget = 1000 * n;
  std::size_t rejected = 0;
  std::vector<double> points;
  points.reserve(n * d);
  std::vector<double> candidate(d);
  bool exhausted = false;
  while (points.size() < n * d) {
    for (auto& c : candidate) c = rng.gaussian();
    if (numerics::norm2(candidate) == 0.0) continue;
    normalize_row(candidate);
    if (far_enough(points, d, candidate, delta_target)) {
      points.insert(points.end(), candidate.begin(), candidate.end());
    } else if (++rejected > budget) {
      exhausted = true;
      break;
    }
  }
  if (exhausted) {
    if (n > d)
      throw PackingInfeasible("gen_separated: no " + std::to_string(n) + " points in R^" +
                              std::to_string(d) + " with separation " +
                              std::to_string(delta_target) + " found within " +
                              std::to_string(budget) + " rejections");
    points = random_orthonormal(rng, n, d);
  }

  std::vector<double> y(n);
  for (auto& v : y) v = labels == LabelMode::pm_one ? rng.rademacher() : rng.uniform_symmetric();
  return Dataset(d, std::move(points), std::move(y));
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_field(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) + ": non-numeric field '" +
                     std::string(field) + "'");
  return v;
}

}  // namespace

Dataset ingest_csv(const std::filesystem::path& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() < 2 || header.back() != "label")
    throw ParseError(path.string() + ": header must be f0,...,f{d-1},label");
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k)
    if (header[k] != "f" + std::to_string(k))
      throw ParseError(path.string() + ": header field " + std::to_string(k) + " must be f" +
                       std::to_string(k));

  std::vector<double> points, labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != d + 1)
      throw ParseError("line " + std::to_string(line_no) + ": ragged row with " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(d + 1));
    const std::size_t base = points.size();
    for (std::size_t k = 0; k < d; ++k) points.push_back(parse_field(fields[k], line_no));
    labels.push_back(parse_field(fields[d], line_no));
    if (normalize) {
      try {
        normalize_row(std::span<double>(points.data() + base, d));
      } catch (const DegenerateData&) {
        throw DegenerateData("line " + std::to_string(line_no) + ": zero-norm row");
      }
    }
  }
  return Dataset(d, std::move(points), std::move(labels));
}

void export_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot write " + path.string());
  bool ok = true;
  for (std::size_t k = 0; k < dataset.dim(); ++k) ok &= std::fprintf(f, "f%zu,", k) > 0;
  ok &= std::fprintf(f, "label\n") > 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (double v : dataset.x(i)) ok &= std::fprintf(f, "%.17g,", v) > 0;
    ok &= std::fprintf(f, "%.17g\n", dataset.y(i)) > 0;
  }
  ok &= std::fclose(f) == 0;
  if (!ok) throw IoError("write failed for " + path.string());
}

}  // namespace hsrnet::data

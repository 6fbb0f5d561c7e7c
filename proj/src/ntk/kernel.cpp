#include "hsrnet/ntk/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "hsrnet/errors.hpp"
#include "hsrnet/numerics/parallel.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::ntk {

namespace {

constexpr std::uint64_t kChunk = 1 << 16;
constexpr std::uint64_t kReferenceStream = 0x5EF0'0000'0000'0001ULL;

// Packed lower-triangular co-firing counts.
struct CoFire {
  explicit CoFire(std::size_t n) : n(n), counts(n * (n + 1) / 2, 0) {}
  std::size_t n;
  std::vector<std::uint64_t> counts;

  void add(const std::vector<std::uint32_t>& fired) {
    for (std::size_t p = 0; p < fired.size(); ++p) {
      const std::size_t i = fired[p];
      for (std::size_t q = 0; q <= p; ++q) counts[i * (i + 1) / 2 + fired[q]] += 1;
    }
  }
  void merge(const CoFire& o) {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o.counts[k];
  }
  std::uint64_t operator()(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return counts[i * (i + 1) / 2 + j];
  }
};

void fired_samples(std::span<const double> w, const data::Dataset& dataset, double b,
                   std::vector<std::uint32_t>& fired) {
  fired.clear();
  for (std::uint32_t i = 0; i < dataset.size(); ++i)
    if (numerics::dot(w, dataset.x(i)) - b > 0.0) fired.push_back(i);
}

KernelReport assemble(const data::Dataset& dataset, const CoFire& counts, std::uint64_t samples) {
  const std::size_t n = dataset.size();
  KernelReport report;
  report.h = numerics::SymMatrix(n);
  const double inv = 1.0 / static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      report.h.set(i, j,
                   numerics::dot(dataset.x(i), dataset.x(j)) *
                       (static_cast<double>(counts(i, j)) * inv));
  auto eig = numerics::sym_eig_min(report.h);
  report.lambda_min = eig.value;
  report.eigvec = std::move(eig.vector);
  report.samples = samples;
  return report;
}

}  // namespace

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::continuous_mc:
      return "continuous-mc";
    case KernelKind::discrete_at_init:
      return "discrete-at-init";
    case KernelKind::discrete_at_step:
      return "discrete-at-step-t";
  }
  return "unknown";
}

KernelReport h_discrete(const model::NetworkState& net, const data::Dataset& dataset) {
  if (net.dim() != dataset.dim()) throw DimensionMismatch("h_discrete: dimension mismatch");
  CoFire counts(dataset.size());
  std::vector<std::uint32_t> fired;
  for (model::NeuronId r = 0; r < net.width(); ++r) {
    fired_samples(net.weight(r), dataset, net.shift(), fired);
    counts.add(fired);
  }
  KernelReport report = assemble(dataset, counts, net.width());
  report.kind = net.step() == 0 ? KernelKind::discrete_at_init : KernelKind::discrete_at_step;
  report.shift = net.shift();
  return report;
}

KernelReport h_continuous_mc(const numerics::Rng& rng, const data::Dataset& dataset, double b,
                             std::uint64_t samples, unsigned workers) {
  if (samples == 0) throw InvalidArgument("h_continuous_mc: samples must be >= 1");
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.dim();
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  auto chunk_len = [&](std::size_t c) {
    return std::min<std::uint64_t>(kChunk, samples - c * kChunk);
  };

  std::vector<CoFire> partial(chunks, CoFire(n));
  numerics::parallel_for(chunks, workers, [&](std::size_t c) {
    numerics::Rng local = rng.split(c);
    std::vector<double> w(d);
    std::vector<std::uint32_t> fired;
    for (std::uint64_t s = 0; s < chunk_len(c); ++s) {
      for (auto& v : w) v = local.gaussian();
      fired_samples(w, dataset, b, fired);
      partial[c].add(fired);
    }
  });
  CoFire total(n);
  for (const auto& p : partial) total.merge(p);

  KernelReport report = assemble(dataset, total, samples);
  report.kind = KernelKind::continuous_mc;
  report.shift = b;

  report.entry_stderr = numerics::SymMatrix(n);
  const double ns = static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double p = static_cast<double>(total(i, j)) / ns;
      report.entry_stderr.set(
          i, j, std::abs(numerics::dot(dataset.x(i), dataset.x(j))) * std::sqrt(p * (1 - p) / ns));
    }

  // Second pass over the same streams: spread of |sum_{i fired} v_i x_i|^2.
  std::vector<double> sum(chunks, 0.0), sum_sq(chunks, 0.0);
  const auto& v = report.eigvec;
  numerics::parallel_for(chunks, workers, [&](std::size_t c) {
    numerics::Rng local = rng.split(c);
    std::vector<double> w(d), acc(d);
    std::vector<std::uint32_t> fired;
    for (std::uint64_t s = 0; s < chunk_len(c); ++s) {
      for (auto& x : w) x = local.gaussian();
      fired_samples(w, dataset, b, fired);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (auto i : fired) {
        const auto x = dataset.x(i);
        for (std::size_t j = 0; j < d; ++j) acc[j] += v[i] * x[j];
      }
      const double q = numerics::dot(acc, acc);
      sum[c] += q;
      sum_sq[c] += q * q;
    }
  });
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s1 += sum[c];
    s2 += sum_sq[c];
  }
  const double mean = s1 / ns;
  const double var = samples > 1 ? std::max(0.0, (s2 - ns * mean * mean) / (ns - 1)) : 0.0;
  report.lambda_stderr = std::sqrt(var / ns);
  return report;
}

GapCheck check_spectral_gap(const KernelReport& report, double delta, std::size_t n, double b) {
  GapCheck g;
  g.lambda = report.lambda_min;
  g.upper_bound = std::exp(-b * b / 2);
  g.lower_bound = g.upper_bound * delta / (100.0 * static_cast<double>(n) * static_cast<double>(n));
  g.lower_margin = g.lambda - g.lower_bound;
  g.upper_margin = g.upper_bound - g.lambda;
  g.mc_error = 3.0 * report.lambda_stderr;
  g.lower_ok = g.lambda >= g.lower_bound;
  g.upper_ok = g.lambda <= g.upper_bound;
  g.reliable = g.mc_error < g.lower_margin;
  return g;
}

ConcentrationTable kernel_concentration(const numerics::Rng& rng, const data::Dataset& dataset,
                                        double b, std::span<const std::size_t> widths,
                                        std::size_t trials, std::uint64_t reference_samples,
                                        unsigned workers) {
  if (widths.empty() || trials == 0)
    throw InvalidArgument("kernel_concentration: need a width grid and at least one trial");
  for (std::size_t k = 0; k < widths.size(); ++k)
    if (widths[k] == 0 || (k > 0 && widths[k] <= widths[k - 1]))
      throw InvalidArgument("kernel_concentration: widths must be positive and ascending");

  const KernelReport reference =
      h_continuous_mc(rng.split(kReferenceStream), dataset, b, reference_samples, workers);
  ConcentrationTable table;
  table.lambda_hat = reference.lambda_min;
  table.lambda_stderr = reference.lambda_stderr;
  table.reference_samples = reference_samples;

  for (std::size_t g = 0; g < widths.size(); ++g) {
    ConcentrationRow row;
    row.width = widths[g];
    std::size_t above = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      // A fresh width-m network's discrete kernel, drawn directly.
      const auto trial = h_continuous_mc(rng.split(1 + g * trials + t), dataset, b, widths[g], 1);
      row.distances.push_back(numerics::frobenius_distance(trial.h, reference.h));
      row.lambda_mins.push_back(trial.lambda_min);
      if (trial.lambda_min >= 0.75 * table.lambda_hat) ++above;
    }
    auto sorted = row.distances;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    row.median_distance = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    row.fraction_above = static_cast<double>(above) / static_cast<double>(trials);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hsrnet::ntk

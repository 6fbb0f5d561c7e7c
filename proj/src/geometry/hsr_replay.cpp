#include "hsrnet/geometry/hsr_replay.hpp"

#include <algorithm>
#include <vector>

#include "hsrnet/numerics/gaussian.hpp"
#include "hsrnet/numerics/rng.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::geometry {

ReplayReport replay_against_naive(const ReplayConfig& config) {
  numerics::Rng rng(config.seed, 0);
  HsrConfig tree_cfg = config.tree;
  tree_cfg.backend = HsrBackend::prune_tree;
  HsrConfig naive_cfg;
  naive_cfg.backend = HsrBackend::naive;

  std::vector<double> initial;
  initial.reserve(config.initial * config.dim);
  for (std::size_t k = 0; k < config.initial; ++k) {
    const auto p = numerics::gaussian_vector(rng, config.dim);
    initial.insert(initial.end(), p.begin(), p.end());
  }
  auto tree = HsrIndex::build(config.dim, initial, tree_cfg);
  auto naive = HsrIndex::build(config.dim, initial, naive_cfg);

  ReplayReport report;
  std::vector<PointId> live = tree.live_ids();
  std::vector<PointId> got, want;
  for (std::size_t op = 0; op < config.ops; ++op) {
    const double u = rng.uniform();
    if (u < config.insert_share || live.empty()) {
      std::vector<double> p;
      if (!live.empty() && rng.uniform() < 0.1) {
        const auto src = tree.point(live[static_cast<std::size_t>(rng.uniform() * live.size())]);
        p.assign(src.begin(), src.end());
      } else {
        p = numerics::gaussian_vector(rng, config.dim);
      }
      const PointId a = tree.insert(p);
      const PointId b = naive.insert(p);
      if (a != b) {
        report.ok = false;
        report.mismatch_op = op;
        report.detail = "insert returned different ids";
        break;
      }
      live.push_back(a);
      ++report.inserts;
    } else if (u < config.insert_share + config.erase_share) {
      const auto k = static_cast<std::size_t>(rng.uniform() * live.size());
      tree.erase(live[k]);
      naive.erase(live[k]);
      live[k] = live.back();
      live.pop_back();
      ++report.erases;
    } else {
      const auto a = numerics::gaussian_vector(rng, config.dim);
      double b;
      const double mode = rng.uniform();
      if (live.empty() || mode < 0.2) {
        b = 4.0 * rng.uniform_symmetric();
      } else {
        const auto x = tree.point(live[static_cast<std::size_t>(rng.uniform() * live.size())]);
        b = numerics::dot(a, x);
        if (mode >= 0.4) b += 0.1 * rng.gaussian();
      }
      const auto tc = tree.query(a, b, got);
      const auto nc = naive.query(a, b, want);
      tree.account(tc);
      report.tree_ops += tc.ops();
      report.naive_ops += nc.ops();
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      ++report.queries;
      report.reported += want.size();
      if (got != want) {
        report.ok = false;
        report.mismatch_op = op;
        report.detail = "query reported " + std::to_string(got.size()) + " points, expected " +
                        std::to_string(want.size());
        break;
      }
    }
  }
  report.tree_stats = tree.stats();
  return report;
}

}  // namespace hsrnet::geometry

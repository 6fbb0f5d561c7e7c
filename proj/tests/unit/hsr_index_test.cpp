#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hsrnet/errors.hpp"
#include "hsrnet/geometry/hsr_index.hpp"
#include "hsrnet/geometry/hsr_replay.hpp"
#include "hsrnet/numerics/gaussian.hpp"
#include "hsrnet/numerics/rng.hpp"

using namespace hsrnet;
using geometry::HsrBackend;
using geometry::HsrConfig;
using geometry::HsrIndex;
using geometry::PointId;

namespace {

std::vector<double> random_unit_points(numerics::Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> pts;
  pts.reserve(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    auto v = numerics::gaussian_vector(rng, d);
    double s = 0.0;
    for (double c : v) s += c * c;
    for (double& c : v) pts.push_back(c / std::sqrt(s));
  }
  return pts;
}

// Linear scan with the same strict predicate, written out directly.
std::set<PointId> scan(const std::vector<double>& pts, std::size_t d, const std::vector<PointId>& ids,
                       const std::vector<double>& a, double b) {
  std::set<PointId> out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) z += a[j] * pts[k * d + j];
    if (z - b > 0.0) out.insert(ids[k]);
  }
  return out;
}

std::set<PointId> as_set(const std::vector<PointId>& v) { return {v.begin(), v.end()}; }

HsrIndex three_points(HsrBackend backend) {
  HsrConfig cfg;
  cfg.backend = backend;
  return HsrIndex::build(2, std::vector<std::vector<double>>{{1, 0}, {0, 1}, {-1, 0}}, cfg);
}

}  // namespace

class BackendTest : public ::testing::TestWithParam<HsrBackend> {};

TEST_P(BackendTest, EmptyIndexReportsNothing) {
  HsrConfig cfg;
  cfg.backend = GetParam();
  auto idx = HsrIndex::build(3, std::span<const double>{}, cfg);
  EXPECT_EQ(idx.live_count(), 0u);
  EXPECT_TRUE(idx.query(std::vector<double>{1, 0, 0}, -10.0).empty());
}

TEST_P(BackendTest, ThreePointExamples) {
  auto idx = three_points(GetParam());
  EXPECT_EQ(as_set(idx.query(std::vector<double>{1, 0}, 0.5)), std::set<PointId>{0});
  EXPECT_TRUE(idx.query(std::vector<double>{1, 0}, 2.0).empty());
  EXPECT_EQ(as_set(idx.query(std::vector<double>{1, 0}, -0.5)), (std::set<PointId>{0, 1}));
}

TEST_P(BackendTest, ThresholdIsStrict) {
  auto idx = three_points(GetParam());
  // <(1,0), (1,0)> = 1 exactly, so b = 1 must not report it.
  EXPECT_TRUE(idx.query(std::vector<double>{1, 0}, 1.0).empty());
  EXPECT_EQ(as_set(idx.query(std::vector<double>{0, 1}, 0.0)), std::set<PointId>{1});
}

TEST_P(BackendTest, MixedDimensionsRejected) {
  HsrConfig cfg;
  cfg.backend = GetParam();
  EXPECT_THROW(HsrIndex::build(2, std::vector<std::vector<double>>{{1, 0}, {0, 1, 0}}, cfg),
               DimensionMismatch);
  auto idx = three_points(GetParam());
  EXPECT_THROW(idx.query(std::vector<double>{1, 0, 0}, 0.0), DimensionMismatch);
  EXPECT_THROW(idx.insert(std::vector<double>{1}), DimensionMismatch);
}

TEST_P(BackendTest, InsertIntoEmptyThenQuery) {
  HsrConfig cfg;
  cfg.backend = GetParam();
  HsrIndex idx(2, cfg);
  const auto id = idx.insert(std::vector<double>{0.6, 0.8});
  EXPECT_EQ(as_set(idx.query(std::vector<double>{0, 1}, 0.5)), std::set<PointId>{id});
}

TEST_P(BackendTest, DuplicatesGetDistinctIds) {
  HsrConfig cfg;
  cfg.backend = GetParam();
  HsrIndex idx(2, cfg);
  const auto a = idx.insert(std::vector<double>{0, 1});
  const auto b = idx.insert(std::vector<double>{0, 1});
  EXPECT_NE(a, b);
  EXPECT_EQ(as_set(idx.query(std::vector<double>{0, 1}, 0.5)), (std::set<PointId>{a, b}));
}

TEST_P(BackendTest, DeleteRemovesAndStaleIdThrows) {
  HsrConfig cfg;
  cfg.backend = GetParam();
  HsrIndex idx(2, cfg);
  const auto id = idx.insert(std::vector<double>{1, 0});
  ASSERT_EQ(idx.query(std::vector<double>{1, 0}, 0.5).size(), 1u);
  idx.erase(id);
  EXPECT_TRUE(idx.query(std::vector<double>{1, 0}, 0.5).empty());
  EXPECT_THROW(idx.erase(id), StaleId);
  EXPECT_THROW(idx.erase(12345), StaleId);
}

INSTANTIATE_TEST_SUITE_P(Backends, BackendTest,
                         ::testing::Values(HsrBackend::naive, HsrBackend::prune_tree));

TEST(HsrTree, StaticQueriesMatchLinearScan) {
  numerics::Rng rng(3, 0);
  const std::size_t n = 4096, d = 6;
  const auto pts = random_unit_points(rng, n, d);
  auto idx = HsrIndex::build(d, pts);
  std::vector<PointId> ids(n);
  for (std::size_t k = 0; k < n; ++k) ids[k] = k;
  for (int q = 0; q < 500; ++q) {
    const auto a = numerics::gaussian_vector(rng, d);
    const double b = 2.0 * rng.uniform_symmetric();
    ASSERT_EQ(as_set(idx.query(a, b)), scan(pts, d, ids, a, b)) << "query " << q;
  }
}

TEST(HsrTree, TenThousandUnitVectorsMatchNaive) {
  numerics::Rng rng(4, 0);
  const std::size_t n = 10000, d = 8;
  const auto pts = random_unit_points(rng, n, d);
  auto tree = HsrIndex::build(d, pts);
  HsrConfig naive_cfg;
  naive_cfg.backend = HsrBackend::naive;
  auto naive = HsrIndex::build(d, pts, naive_cfg);
  for (int q = 0; q < 1000; ++q) {
    const auto a = numerics::gaussian_vector(rng, d);
    const double b = 3.0 * rng.uniform();
    ASSERT_EQ(as_set(tree.query(a, b)), as_set(naive.query(a, b)));
  }
}

TEST(HsrTree, ReplayTracesMatchNaive) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    geometry::ReplayConfig rc;
    rc.initial = 500;
    rc.dim = 2 + 2 * seed;
    rc.ops = 10000;
    rc.seed = seed;
    rc.tree.leaf_capacity = 4 * seed;
    const auto rep = geometry::replay_against_naive(rc);
    EXPECT_TRUE(rep.ok) << rep.detail;
    EXPECT_GT(rep.queries, 0u);
    EXPECT_GT(rep.tree_stats.rebuilds, 0u);
  }
}

TEST(HsrTree, InjectedFaultIsCaught) {
  geometry::ReplayConfig rc;
  rc.initial = 1000;
  rc.dim = 4;
  rc.ops = 500;
  rc.tree.inject_fault = true;
  EXPECT_FALSE(geometry::replay_against_naive(rc).ok);
}

TEST(HsrTree, TombstonesStayBelowThreshold) {
  numerics::Rng rng(5, 0);
  const std::size_t d = 4;
  HsrConfig cfg;
  cfg.rebuild_fraction = 0.25;
  auto idx = HsrIndex::build(d, random_unit_points(rng, 800, d), cfg);
  auto live = idx.live_ids();
  for (int k = 0; k < 600; ++k) {
    const auto pick = static_cast<std::size_t>(rng.uniform() * live.size());
    idx.erase(live[pick]);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
    ASSERT_LE(static_cast<double>(idx.tombstone_count()),
              cfg.rebuild_fraction * static_cast<double>(idx.live_count()) + 1.0);
  }
  EXPECT_GT(idx.stats().rebuilds, 0u);
  EXPECT_EQ(idx.live_count(), 200u);
}

TEST(HsrTree, RebuildIsTransparent) {
  numerics::Rng rng(6, 0);
  const std::size_t d = 5;
  auto idx = HsrIndex::build(d, random_unit_points(rng, 1000, d));
  for (int k = 0; k < 100; ++k) idx.erase(static_cast<PointId>(3 * k));
  for (int k = 0; k < 100; ++k) idx.insert(numerics::gaussian_vector(rng, d));
  std::vector<std::vector<double>> as;
  std::vector<double> bs;
  std::vector<std::set<PointId>> before;
  for (int q = 0; q < 200; ++q) {
    as.push_back(numerics::gaussian_vector(rng, d));
    bs.push_back(rng.uniform_symmetric());
    before.push_back(as_set(idx.query(as.back(), bs.back())));
  }
  const auto ids_before = idx.live_ids();
  idx.rebuild();
  EXPECT_EQ(idx.tombstone_count(), 0u);
  auto ids_after = idx.live_ids();
  EXPECT_EQ(std::set<PointId>(ids_before.begin(), ids_before.end()),
            std::set<PointId>(ids_after.begin(), ids_after.end()));
  for (int q = 0; q < 200; ++q) EXPECT_EQ(as_set(idx.query(as[q], bs[q])), before[q]);
}

TEST(HsrTree, UpdateBatchRebuildsAtMostOnce) {
  numerics::Rng rng(7, 0);
  const std::size_t d = 3;
  auto idx = HsrIndex::build(d, random_unit_points(rng, 400, d));
  std::vector<PointId> erase;
  for (PointId k = 0; k < 300; ++k) erase.push_back(k);
  const auto fresh = random_unit_points(rng, 300, d);
  const auto before = idx.stats().rebuilds;
  const auto ids = idx.update_batch(erase, fresh);
  EXPECT_LE(idx.stats().rebuilds - before, 1u);
  ASSERT_EQ(ids.size(), 300u);
  EXPECT_EQ(ids.front(), 400u);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto p = idx.point(ids[k]);
    for (std::size_t j = 0; j < d; ++j) EXPECT_EQ(p[j], fresh[k * d + j]);
  }
  EXPECT_FALSE(idx.contains(0));
  EXPECT_EQ(idx.live_count(), 400u);
}

TEST(HsrTree, PruningBoundsAndBulkReport) {
  numerics::Rng rng(8, 0);
  const std::size_t d = 4;
  auto idx = HsrIndex::build(d, random_unit_points(rng, 2000, d));
  std::vector<PointId> out;
  const auto a = numerics::gaussian_vector(rng, d);
  double norm = 0.0;
  for (double c : a) norm += c * c;
  norm = std::sqrt(norm);

  // Half-space containing the whole sphere: everything reported in bulk.
  auto cost = idx.query(a, -2.0 * norm, out);
  EXPECT_EQ(out.size(), 2000u);
  EXPECT_EQ(cost.points_scanned, 0u);

  for (int q = 0; q < 100; ++q) {
    const auto aq = numerics::gaussian_vector(rng, d);
    cost = idx.query(aq, rng.uniform_symmetric(), out);
    EXPECT_LE(cost.nodes_visited, idx.live_count() + idx.internal_node_count());
    EXPECT_EQ(cost.points_reported, out.size());
  }
}

TEST(HsrTree, StatsAreMonotone) {
  numerics::Rng rng(9, 0);
  const std::size_t d = 3;
  auto idx = HsrIndex::build(d, random_unit_points(rng, 300, d));
  auto prev = idx.stats();
  for (int k = 0; k < 200; ++k) {
    if (k % 3 == 0) idx.insert(numerics::gaussian_vector(rng, d));
    if (k % 5 == 0) idx.erase(idx.live_ids().front());
    idx.query(numerics::gaussian_vector(rng, d), 0.3);
    const auto s = idx.stats();
    ASSERT_GE(s.nodes_visited, prev.nodes_visited);
    ASSERT_GE(s.points_scanned, prev.points_scanned);
    ASSERT_GE(s.points_reported, prev.points_reported);
    ASSERT_EQ(s.queries, prev.queries + 1);
    prev = s;
  }
}

// For points on the sphere and thresholds with a small expected report size,
// the median scan count should grow clearly slower than n in low dimension.
TEST(HsrTree, ScanCountGrowsSublinearly) {
  const std::size_t d = 3;
  std::vector<double> medians;
  for (std::size_t n : {2000u, 8000u, 32000u}) {
    numerics::Rng rng(10, n);
    auto idx = HsrIndex::build(d, random_unit_points(rng, n, d));
    std::vector<double> scanned;
    std::vector<PointId> out;
    // Cap of relative area 5/n around a random direction: k about 5.
    const double b = 1.0 - 10.0 / static_cast<double>(n);
    for (int q = 0; q < 200; ++q) {
      auto a = numerics::gaussian_vector(rng, d);
      double s = 0.0;
      for (double c : a) s += c * c;
      for (double& c : a) c /= std::sqrt(s);
      scanned.push_back(static_cast<double>(idx.query(a, b, out).ops()));
    }
    std::nth_element(scanned.begin(), scanned.begin() + 100, scanned.end());
    medians.push_back(scanned[100]);
  }
  const double slope = std::log(medians[2] / medians[0]) / std::log(16.0);
  EXPECT_LT(slope, 0.75) << medians[0] << " " << medians[1] << " " << medians[2];
}

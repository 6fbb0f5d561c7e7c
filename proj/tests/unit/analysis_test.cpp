#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hsrnet/errors.hpp"
#include "hsrnet/train/analysis.hpp"
#include "hsrnet/train/bench.hpp"

using namespace hsrnet;

TEST(ConvergenceFit, ExactGeometricTrace) {
  std::vector<double> e;
  for (int t = 0; t < 50; ++t) e.push_back(7.0 * std::pow(0.9, t));
  const auto fit = train::convergence_fit(e);
  EXPECT_NEAR(fit.rho, 0.9, 1e-9);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(ConvergenceFit, ConstantTrace) {
  const std::vector<double> e(20, 3.0);
  const auto fit = train::convergence_fit(e);
  EXPECT_EQ(fit.rho, 1.0);
  EXPECT_EQ(fit.r2, 1.0);
}

TEST(ConvergenceFit, RejectsBadTraces) {
  EXPECT_THROW(train::convergence_fit(std::vector<double>(5, 1.0)), InvalidArgument);
  std::vector<double> e(12, 1.0);
  e[4] = 0.0;
  EXPECT_THROW(train::convergence_fit(e), InvalidArgument);
}

TEST(SparsityAudit, Bounds) {
  train::TrainTrace trace;
  for (std::uint64_t t = 0; t < 5; ++t) {
    train::IterationRecord r;
    r.t = t;
    r.k_max = t == 3 ? 90 : 40;
    r.k_argmax = t == 3 ? 7 : 1;
    trace.records.push_back(r);
  }
  const auto a = train::sparsity_audit(trace, 100, 0.0);
  EXPECT_TRUE(a.ok);
  EXPECT_EQ(a.max_k, 90u);
  EXPECT_EQ(a.at_t, 3u);
  EXPECT_EQ(a.at_sample, 7u);
  EXPECT_DOUBLE_EQ(a.bound, 400.0);

  const auto tight = train::sparsity_audit(trace, 100, 2.0, 1.0);
  EXPECT_FALSE(tight.ok);
}

TEST(SparsityAudit, HugeShiftMeansNothingFires) {
  train::TrainTrace trace;
  trace.records.resize(3);
  const auto a = train::sparsity_audit(trace, 1000, 50.0);
  EXPECT_EQ(a.max_k, 0u);
  EXPECT_TRUE(a.ok);
}

TEST(DisplacementBound, Formula) {
  EXPECT_NEAR(train::displacement_bound(0.5, 100, 4, 3.0), 4.0 * 2.0 * 3.0 / (0.5 * 10.0), 1e-15);
  EXPECT_THROW(train::displacement_bound(0.0, 100, 4, 3.0), InvalidArgument);
}

TEST(LogLogSlope, PowerLaw) {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.8));
  EXPECT_NEAR(train::loglog_slope(x, y), 0.8, 1e-12);
}

TEST(Bench, RowsPerWidthAndMode) {
  train::BenchConfig c;
  c.widths = {256, 512, 1024};
  c.n = 16;
  c.iterations = 3;
  c.eta = 0.5;
  const auto rows = train::run_bench(c);
  ASSERT_EQ(rows.size(), 9u);
  std::vector<double> x, y;
  for (const auto& r : rows) {
    EXPECT_EQ(r.dense_equivalent, 16u * r.width);
    if (r.mode == train::TrainMode::dense) EXPECT_EQ(r.median_ops, 16.0 * r.width);
    if (r.mode == train::TrainMode::data_index) {
      x.push_back(static_cast<double>(r.width));
      y.push_back(r.median_ops);
    }
  }
  EXPECT_LT(train::loglog_slope(x, y), 1.0);
}

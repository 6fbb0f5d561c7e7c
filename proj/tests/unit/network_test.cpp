#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/errors.hpp"
#include "hsrnet/model/fire_index.hpp"
#include "hsrnet/model/fire_ledger.hpp"
#include "hsrnet/model/network.hpp"
#include "hsrnet/numerics/rng.hpp"
#include "oracles.hpp"

using namespace hsrnet;
using model::NetworkState;
using model::NeuronId;
using model::ShiftPolicy;

namespace {

std::vector<double> copy(std::span<const double> s) { return {s.begin(), s.end()}; }
std::vector<int> copy(std::span<const int> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(ShiftPolicy, Rules) {
  EXPECT_NEAR(ShiftPolicy::standard().resolve(1024), std::sqrt(0.4 * std::log(1024.0)), 1e-15);
  EXPECT_NEAR(ShiftPolicy::alpha(0.5).resolve(4096), std::sqrt(0.25 * std::log(4096.0)), 1e-15);
  EXPECT_EQ(ShiftPolicy::fixed(0.7).resolve(10), 0.7);
  EXPECT_THROW(ShiftPolicy::alpha(1.0).resolve(10), InvalidArgument);
}

TEST(InitNetwork, DeterministicAndWellFormed) {
  numerics::Rng a(1, 0), b(1, 0);
  const auto x = model::init_network(a, 5, 64, ShiftPolicy::standard());
  const auto y = model::init_network(b, 5, 64, ShiftPolicy::standard());
  EXPECT_EQ(copy(x.weights()), copy(y.weights()));
  EXPECT_EQ(copy(x.signs()), copy(y.signs()));
  EXPECT_EQ(x.width(), 64u);
  EXPECT_EQ(x.dim(), 5u);
  EXPECT_EQ(x.step(), 0u);
  for (int s : x.signs()) EXPECT_TRUE(s == 1 || s == -1);

  // Weights come first from the stream, then the signs.
  numerics::Rng c(1, 0);
  for (std::size_t k = 0; k < 5 * 64; ++k) ASSERT_EQ(x.weights()[k], c.gaussian());
  for (std::size_t r = 0; r < 64; ++r) ASSERT_EQ(x.sign(r), c.rademacher());
}

TEST(InitNetwork, RejectsEmptyShapes) {
  numerics::Rng rng(1, 0);
  EXPECT_THROW(model::init_network(rng, 0, 4, ShiftPolicy::standard()), InvalidArgument);
  EXPECT_THROW(model::init_network(rng, 4, 0, ShiftPolicy::standard()), InvalidArgument);
}

TEST(NetworkState, ValidatesConstruction) {
  EXPECT_THROW(NetworkState(2, 0.0, {1, 2, 3}, {1, -1}), DimensionMismatch);
  EXPECT_THROW(NetworkState(2, 0.0, {1, 2, 3, 4}, {1, 0}), InvalidArgument);
}

TEST(ShiftedRelu, Values) {
  EXPECT_EQ(model::shifted_relu(1.5, 1.0), 0.5);
  EXPECT_EQ(model::shifted_relu(1.0, 1.0), 0.0);
  EXPECT_EQ(model::shifted_relu(-3.0, -4.0), 1.0);
}

TEST(Forward, MatchesDirectSum) {
  numerics::Rng rng(2, 0);
  const auto net = model::init_network(rng, 6, 300, ShiftPolicy::fixed(0.4));
  const auto ds = data::gen_separated(rng, 10, 6, 0.3);
  const auto w = copy(net.weights());
  const auto a = copy(net.signs());
  for (std::size_t i = 0; i < ds.size(); ++i)
    EXPECT_NEAR(model::forward(net, ds.x(i)),
                oracle::network_output(w, a, 6, 0.4, ds.x(i).data()), 1e-12);
}

TEST(Forward, ActiveSubsetAgreesBitwise) {
  numerics::Rng rng(3, 0);
  const auto net = model::init_network(rng, 4, 500, ShiftPolicy::standard());
  const auto ds = data::gen_separated(rng, 8, 4, 0.3);
  const auto ledger = model::rebuild_ledger(net, ds, model::DenseScan{});
  for (model::SampleId i = 0; i < ds.size(); ++i)
    EXPECT_EQ(model::forward(net, ds.x(i), &ledger.fired_on(i)), model::forward(net, ds.x(i)));
}

TEST(Forward, RejectsBadInput) {
  numerics::Rng rng(4, 0);
  const auto net = model::init_network(rng, 2, 8, ShiftPolicy::standard());
  EXPECT_THROW(model::forward(net, std::vector<double>{1, 0, 0}), DimensionMismatch);
  EXPECT_THROW(model::forward(net, std::vector<double>{1, 1}), InvalidArgument);
}

TEST(Forward, HugeShiftSilencesNetwork) {
  numerics::Rng rng(5, 0);
  const auto net = model::init_network(rng, 3, 100, ShiftPolicy::fixed(1e6));
  EXPECT_EQ(model::forward(net, std::vector<double>{0, 0, 1}), 0.0);
}

TEST(Loss, HalfSquaredResiduals) {
  numerics::Rng rng(6, 0);
  const auto net = model::init_network(rng, 3, 50, ShiftPolicy::fixed(0.0));
  const auto ds = data::gen_separated(rng, 5, 3, 0.3);
  const auto lv = model::loss(net, ds);
  const std::vector<double> x(ds.points().begin(), ds.points().end());
  const std::vector<double> y(ds.labels().begin(), ds.labels().end());
  EXPECT_NEAR(lv.loss, oracle::half_squared_loss(copy(net.weights()), copy(net.signs()), 3, 0.0, x, y),
              1e-12);
  ASSERT_EQ(lv.residual.size(), 5u);
}

TEST(Gradient, MatchesCentralDifferences) {
  numerics::Rng rng(7, 0);
  const std::size_t d = 5, m = 200;
  const double b = 0.3, h = 1e-6;
  const auto net = model::init_network(rng, d, m, ShiftPolicy::fixed(b));
  const auto ds = data::gen_separated(rng, 12, d, 0.3);
  const auto ledger = model::rebuild_ledger(net, ds, model::DenseScan{});
  const auto g = model::gradient(net, ds, ledger);

  const std::vector<double> x(ds.points().begin(), ds.points().end());
  const std::vector<double> y(ds.labels().begin(), ds.labels().end());
  const auto w0 = copy(net.weights());
  const auto a = copy(net.signs());

  int checked = 0;
  for (std::size_t k = 0; k < g.neurons.size() && checked < 150; ++k) {
    const NeuronId r = g.neurons[k];
    bool near_kink = false;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += w0[r * d + j] * x[i * d + j];
      if (std::abs(z - b) < 10 * h) near_kink = true;
    }
    if (near_kink) continue;
    for (std::size_t j = 0; j < d; ++j) {
      auto wp = w0, wm = w0;
      wp[r * d + j] += h;
      wm[r * d + j] -= h;
      const double fd = (oracle::half_squared_loss(wp, a, d, b, x, y) -
                         oracle::half_squared_loss(wm, a, d, b, x, y)) /
                        (2 * h);
      const double an = g.row(k)[j];
      ASSERT_LE(std::abs(fd - an), 1e-4 * std::max(std::abs(an), 1e-3)) << "r=" << r << " j=" << j;
      ++checked;
    }
  }
  EXPECT_GE(checked, 100);
}

TEST(ApplyUpdate, MovesOnlyGradientRows) {
  numerics::Rng rng(8, 0);
  auto net = model::init_network(rng, 4, 100, ShiftPolicy::standard());
  const auto ds = data::gen_separated(rng, 6, 4, 0.3);
  const auto before = copy(net.weights());
  const auto ledger = model::rebuild_ledger(net, ds, model::DenseScan{});
  const auto g = model::gradient(net, ds, ledger);

  EXPECT_THROW(model::apply_update(net, g, 0.0), InvalidArgument);
  EXPECT_THROW(model::apply_update(net, g, -1.0), InvalidArgument);
  EXPECT_EQ(net.step(), 0u);

  const auto changed = model::apply_update(net, g, 0.5);
  EXPECT_EQ(net.step(), 1u);
  EXPECT_EQ(changed, g.neurons);
  std::vector<bool> moved(100, false);
  for (std::size_t k = 0; k < g.neurons.size(); ++k) {
    const NeuronId r = g.neurons[k];
    moved[r] = true;
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_EQ(net.weight(r)[j], before[r * 4 + j] - 0.5 * g.row(k)[j]);
  }
  for (NeuronId r = 0; r < 100; ++r)
    if (!moved[r])
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(net.weight(r)[j], before[r * 4 + j]);
}

TEST(ApplyUpdate, SmallStepDescends) {
  numerics::Rng rng(9, 0);
  auto net = model::init_network(rng, 8, 1024, ShiftPolicy::standard());
  const auto ds = data::gen_separated(rng, 16, 8, 0.5);
  const double before = model::loss(net, ds).loss;
  const auto ledger = model::rebuild_ledger(net, ds, model::DenseScan{});
  model::apply_update(net, model::gradient(net, ds, ledger), 1e-8);
  EXPECT_LE(model::loss(net, ds).loss, before);
}

TEST(WeightDisplacement, MaxRowDistance) {
  const NetworkState net(2, 0.0, {3, 4, 0, 1}, {1, -1});
  EXPECT_NEAR(model::weight_displacement(net, std::vector<double>{0, 0, 0, 0}), 5.0, 1e-15);
  EXPECT_THROW(model::weight_displacement(net, std::vector<double>{0, 0}), DimensionMismatch);
}

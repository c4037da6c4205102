#include <gtest/gtest.h>

#include "edgeq/crossover.hpp"
#include "edgeq/queueing.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace edgeq {
namespace {

using testing::Gen;
using testing::ScenarioShape;

TEST(LemmaEquivalence, DedicatedDeterministic) {
  Gen g(101);
  for (int i = 0; i < 1000; ++i) {
    const auto sc = testing::random_scenario(g, ScenarioShape::Dedicated);
    ASSERT_EQ(lemma1_holds(sc), testing::predictor_says_device(sc)) << i;
  }
}

TEST(LemmaEquivalence, SharedDeterministic) {
  Gen g(102);
  for (int i = 0; i < 1000; ++i) {
    const auto sc = testing::random_scenario(g, ScenarioShape::Shared);
    ASSERT_EQ(lemma2_holds(sc), testing::predictor_says_device(sc)) << i;
  }
}

TEST(LemmaEquivalence, Variable) {
  Gen g(103);
  for (int i = 0; i < 1000; ++i) {
    const auto sc = testing::random_scenario(g, ScenarioShape::Variable);
    ASSERT_EQ(lemma3_holds(sc), testing::predictor_says_device(sc)) << i;
  }
}

TEST(LemmaEquivalence, BothOutcomesAreExercised) {
  Gen g(104);
  int device = 0;
  for (int i = 0; i < 1000; ++i)
    device += testing::predictor_says_device(testing::random_scenario(g, ScenarioShape::Shared));
  EXPECT_GT(device, 100);
  EXPECT_LT(device, 900);
}

// Slower networks and heavier payloads only help the device.
TEST(Monotonicity, BandwidthAndPayload) {
  Gen g(105);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    auto sc = testing::random_scenario(
        g, g.coin() ? ScenarioShape::Shared : (g.coin() ? ScenarioShape::Dedicated : ScenarioShape::Variable));
    std::optional<double> prev;
    for (int j = 0; j < 25; ++j) {
      auto s = sc;
      s.net.bandwidth_b = sc.net.bandwidth_b * std::pow(1.3, j - 12);
      const auto d = testing::gap(s);
      if (d && prev) {
        EXPECT_GE(*d, *prev) << "bandwidth " << i << "/" << j;
        ++checked;
      }
      if (d) prev = d;
    }
    prev.reset();
    for (int j = 0; j < 25; ++j) {
      auto w = sc.w;
      const double scale = std::pow(1.3, j - 12);
      w.d_req = sc.w.d_req * scale + 1e3 * j;
      w.d_res = sc.w.d_res * scale;
      const auto d = testing::gap(testing::with_workload(sc, w));
      if (d && prev) {
        EXPECT_LE(*d, *prev) << "payload " << i << "/" << j;
        ++checked;
      }
      if (d) prev = d;
    }
  }
  EXPECT_GT(checked, 2000);
}

// Proportionally lighter work favours the device when the edge is the
// faster processor for this stream.
TEST(Monotonicity, ProportionalServiceScaling) {
  Gen g(106);
  int checked = 0;
  while (checked < 2000) {
    auto sc = testing::random_scenario(g, g.coin() ? ScenarioShape::Dedicated : ScenarioShape::Variable);
    if (sc.w.s_dev < sc.w.s_edge || sc.w.s_dev / sc.dev.k_dev < sc.w.s_edge / sc.edge.k_edge) continue;
    std::optional<double> prev;
    for (int j = 1; j <= 20; ++j) {
      const double c = j / 20.0;
      auto w = sc.w;
      w.s_dev *= c;
      w.s_edge *= c;
      w.variance_dev *= c * c;
      w.variance_edge *= c * c;
      const auto d = testing::gap(testing::with_workload(sc, w));
      if (d && prev) {
        EXPECT_GE(*d, *prev - 1e-15) << "c=" << c;
        ++checked;
      }
      if (d) prev = d;
    }
  }
}

TEST(Reductions, MixtureFormsAgreeForOneServer) {
  Gen g(107);
  for (int i = 0; i < 200; ++i) {
    auto sc = testing::random_scenario(g, ScenarioShape::Shared);
    sc.edge.k_edge = 1.0;
    auto a = sc, b = sc;
    a.options.mixture_form = MixtureForm::KFolded;
    b.options.mixture_form = MixtureForm::Literal;
    const auto ga = testing::gap(a);
    const auto gb = testing::gap(b);
    ASSERT_EQ(ga.has_value(), gb.has_value());
    if (ga) EXPECT_LE(testing::rel_err(*ga, *gb), 1e-9);
  }
}

TEST(Reductions, QueueingIdentities) {
  for (int i = 0; i < 100; ++i) {
    const double s = 0.001 + 0.01 * i;
    const double k = 1.0 + (i % 4);
    const double lambda = (0.05 + 0.9 * ((i * 37) % 100) / 100.0) * k / s;
    const QueueSpec det{lambda, ServiceDistribution::deterministic(s), k};
    const QueueSpec exp{lambda, ServiceDistribution::exponential(s), k};
    EXPECT_LE(testing::rel_err(wait_mg1({lambda, ServiceDistribution::general(s, 0.0), k}), wait_md1(det)), 1e-12);
    EXPECT_LE(testing::rel_err(wait_mg1({lambda, ServiceDistribution::general(s, s * s), k}), wait_mm1(exp)), 1e-12);
    EXPECT_LE(testing::rel_err(wait_md1(det), 0.5 * wait_mm1(exp)), 1e-12);
  }
}

}  // namespace
}  // namespace edgeq

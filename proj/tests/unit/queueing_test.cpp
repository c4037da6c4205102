#include <gtest/gtest.h>

#include "edgeq/error.hpp"
#include "edgeq/queueing.hpp"
#include "oracles.hpp"

namespace edgeq {
namespace {

using testing::Gen;
using testing::rel_err;

QueueSpec det(double lambda, double s, double k = 1.0) {
  return {lambda, ServiceDistribution::deterministic(s), k};
}
QueueSpec expo(double lambda, double s, double k = 1.0) {
  return {lambda, ServiceDistribution::exponential(s), k};
}

TEST(ServiceDistribution, Validation) {
  EXPECT_NO_THROW(ServiceDistribution::general(0.2, 0.01).validate());
  EXPECT_THROW(ServiceDistribution::general(0.0, 0.01).validate(), Error);
  EXPECT_THROW(ServiceDistribution::general(0.2, -1e-9).validate(), Error);
  ServiceDistribution bad{ServiceKind::Deterministic, 0.1, 0.01};
  EXPECT_THROW(bad.validate(), Error);
  ServiceDistribution bad_exp{ServiceKind::Exponential, 0.1, 0.011};
  EXPECT_THROW(bad_exp.validate(), Error);
  EXPECT_EQ(ServiceDistribution::exponential(0.1).variance_s2, 0.1 * 0.1);
}

TEST(QueueSpec, Validation) {
  EXPECT_THROW((QueueSpec{-1.0, ServiceDistribution::deterministic(0.1), 1.0}.validate()), Error);
  EXPECT_THROW((QueueSpec{1.0, ServiceDistribution::deterministic(0.1), 0.0}.validate()), Error);
  EXPECT_DOUBLE_EQ(det(1.0, 0.1, 2.5).effective_rate(), 25.0);
}

TEST(Utilization, Examples) {
  EXPECT_EQ(utilization(det(0.0, 0.1)), 0.0);
  EXPECT_DOUBLE_EQ(utilization(det(5.0, 0.1)), 0.5);
  EXPECT_DOUBLE_EQ(utilization(det(5.0, 0.1, 2.0)), 0.25);
  // No upper bound enforced.
  EXPECT_DOUBLE_EQ(utilization(det(20.0, 0.1)), 2.0);
}

TEST(Stability, Margin) {
  EXPECT_TRUE(is_stable(det(9.0, 0.1)));
  EXPECT_FALSE(is_stable(det(10.0, 0.1)));
  EXPECT_FALSE(is_stable(det(10.0 * (1.0 - 1e-10), 0.1)));
  EXPECT_TRUE(is_stable(det(10.0 * (1.0 - 1e-8), 0.1)));
}

TEST(WaitMM1, Examples) {
  EXPECT_EQ(wait_mm1(expo(0.0, 0.1)), 0.0);
  EXPECT_NEAR(wait_mm1(expo(5.0, 0.1)), 1.0 / 5 - 1.0 / 10, 1e-15);
  try {
    wait_mm1(expo(10.0, 0.1));
    FAIL() << "expected Unstable";
  } catch (const UnstableError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unstable);
    EXPECT_DOUBLE_EQ(e.utilization(), 1.0);
  }
}

TEST(WaitMD1, Examples) {
  EXPECT_EQ(wait_md1(det(0.0, 0.1)), 0.0);
  EXPECT_NEAR(wait_md1(det(5.0, 0.1)), 0.05, 1e-15);
  EXPECT_NEAR(wait_md1(det(5.0, 0.1, 2.0)), 0.5 * (1.0 / 15 - 1.0 / 20), 1e-15);
  EXPECT_THROW(wait_md1(expo(5.0, 0.1)), Error);
  try {
    wait_md1(expo(5.0, 0.1));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongDistribution);
  }
  EXPECT_THROW(wait_md1(det(10.0, 0.1)), UnstableError);
}

TEST(WaitMG1, Examples) {
  EXPECT_NEAR(wait_mg1({5.0, ServiceDistribution::general(0.1, 0.0), 1.0}), 0.05, 1e-15);
  EXPECT_NEAR(wait_mg1({5.0, ServiceDistribution::general(0.1, 0.01), 1.0}), 0.1, 1e-15);
  EXPECT_NEAR(wait_mg1({2.0, ServiceDistribution::general(0.2, 0.01), 1.0}), 0.5 / 6.0, 1e-15);
  EXPECT_THROW(wait_mg1({6.0, ServiceDistribution::general(0.2, 0.01), 1.0}), UnstableError);
}

TEST(WaitGG1Bound, Examples) {
  const InterarrivalDistribution dd{0.2, 0.0};
  EXPECT_EQ(wait_gg1_upper_bound(5.0, dd, ServiceDistribution::deterministic(0.1), 1.0), 0.0);
  const InterarrivalDistribution ee{0.2, 0.04};
  const double b = wait_gg1_upper_bound(5.0, ee, ServiceDistribution::exponential(0.1), 1.0);
  EXPECT_NEAR(b, 5.0 * (1.0 / 25 + 1.0 / 100) / (2.0 * 0.5), 1e-15);
  EXPECT_GE(b, wait_mm1(expo(5.0, 0.1)));
  try {
    wait_gg1_upper_bound(5.0, InterarrivalDistribution{0.25, 0.0},
                         ServiceDistribution::deterministic(0.1), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Inconsistent);
  }
  EXPECT_THROW(wait_gg1_upper_bound(10.0, InterarrivalDistribution{0.1, 0.0},
                                    ServiceDistribution::deterministic(0.1), 1.0),
               UnstableError);
}

TEST(Waits, MatchTextbookForms) {
  Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    const double s = g.log_uniform(1e-4, 10.0);
    const double k = g.log_uniform(0.2, 64.0);
    const double rho = g.uniform(0.0, 0.99);
    const double lambda = rho * k / s;
    const double mu = k / s;
    EXPECT_LE(rel_err(wait_mm1(expo(lambda, s, k)), testing::mm1_wait(lambda, mu)), 1e-9);
    EXPECT_LE(rel_err(wait_md1(det(lambda, s, k)), testing::md1_wait(lambda, mu)), 1e-9);
    const double var = g.log_uniform(1e-3, 10.0) * s * s;
    const QueueSpec q{lambda, ServiceDistribution::general(s, var), k};
    EXPECT_LE(rel_err(wait_mg1(q), testing::pk_wait_folded(lambda, s, var, k)), 1e-9);
  }
}

// Monotone in lambda, nonincreasing in k, zero at lambda = 0.
TEST(Waits, MonotoneProperties) {
  Gen g(12);
  for (int i = 0; i < 500; ++i) {
    const double s = g.log_uniform(1e-3, 1.0);
    const double k = g.log_uniform(0.5, 8.0);
    const double var = g.uniform(0.0, 3.0) * s * s;
    const auto at = [&](double lambda, double kk) {
      return wait_mg1({lambda, ServiceDistribution::general(s, var), kk});
    };
    double prev = 0.0;
    EXPECT_EQ(at(0.0, k), 0.0);
    for (double rho = 0.05; rho < 0.99; rho += 0.05) {
      const double w = at(rho * k / s, k);
      EXPECT_GE(w, prev);
      prev = w;
      EXPECT_LE(at(rho * k / s, k * 1.5), w);
    }
  }
}

}  // namespace
}  // namespace edgeq

#include "edgeq/queueing.hpp"

#include <cmath>
#include <string>

#include "edgeq/error.hpp"

namespace edgeq {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

// Returns utilization after refusing anything past the stability margin.
double checked_utilization(const QueueSpec& q) {
  q.validate();
  const double rho = utilization(q);
  if (rho >= 1.0 - kStabilityMargin) throw UnstableError("queue", rho);
  return rho;
}

}  // namespace

ServiceDistribution ServiceDistribution::deterministic(double mean_s) {
  return {ServiceKind::Deterministic, mean_s, 0.0};
}

ServiceDistribution ServiceDistribution::exponential(double mean_s) {
  return {ServiceKind::Exponential, mean_s, mean_s * mean_s};
}

ServiceDistribution ServiceDistribution::general(double mean_s, double variance_s2) {
  return {ServiceKind::General, mean_s, variance_s2};
}

void ServiceDistribution::validate() const {
  require(std::isfinite(mean_s) && mean_s > 0.0, "service mean must be positive");
  require(std::isfinite(variance_s2) && variance_s2 >= 0.0,
          "service variance must be nonnegative");
  if (kind == ServiceKind::Deterministic)
    require(variance_s2 == 0.0, "deterministic service must have zero variance");
  if (kind == ServiceKind::Exponential)
    require(variance_s2 == mean_s * mean_s,
            "exponential service variance must equal mean squared");
}

void QueueSpec::validate() const {
  require(std::isfinite(lambda) && lambda >= 0.0, "arrival rate must be nonnegative");
  require(std::isfinite(k) && k > 0.0, "parallelism must be positive");
  service.validate();
}

void InterarrivalDistribution::validate() const {
  require(std::isfinite(mean_a) && mean_a > 0.0, "interarrival mean must be positive");
  require(std::isfinite(variance_a2) && variance_a2 >= 0.0,
          "interarrival variance must be nonnegative");
}

double utilization(const QueueSpec& q) {
  return q.lambda * q.service.mean_s / q.k;
}

bool is_stable(const QueueSpec& q) {
  return utilization(q) < 1.0 - kStabilityMargin;
}

double wait_mm1(const QueueSpec& q) {
  checked_utilization(q);
  if (q.lambda == 0.0) return 0.0;
  const double mu = q.effective_rate();
  return q.lambda / (mu * (mu - q.lambda));
}

double wait_md1(const QueueSpec& q) {
  if (q.service.kind != ServiceKind::Deterministic)
    throw Error(ErrorCode::WrongDistribution, "M/D/1 wait requires deterministic service");
  return 0.5 * wait_mm1(q);
}

double wait_mg1(const QueueSpec& q) {
  const double rho = checked_utilization(q);
  if (q.lambda == 0.0) return 0.0;
  const double mu = q.effective_rate();
  const double var_eff = q.service.variance_s2 / (q.k * q.k);
  return (rho + q.lambda * mu * var_eff) / (2.0 * (mu - q.lambda));
}

double wait_gg1_upper_bound(double lambda, const InterarrivalDistribution& inter,
                            const ServiceDistribution& service, double k) {
  inter.validate();
  const QueueSpec q{lambda, service, k};
  const double rho = checked_utilization(q);
  if (std::abs(lambda * inter.mean_a - 1.0) > kRateConsistencyTolerance)
    throw Error(ErrorCode::Inconsistent,
                "arrival rate disagrees with the interarrival mean");
  const double var_s_eff = service.variance_s2 / (k * k);
  return lambda * (inter.variance_a2 + var_s_eff) / (2.0 * (1.0 - rho));
}

}  // namespace edgeq

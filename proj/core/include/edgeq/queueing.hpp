#pragma once

// Closed-form expected-wait evaluators for single-queue FCFS stations.
//
// Parallelism k is a positive real folded into the service rate: a station
// with mean service time s and parallelism k serves at mu_eff = k / s, and
// its effective service time has mean s/k and variance Var[s]/k^2.
// All times are seconds and all rates are 1/second.

namespace edgeq {

enum class ServiceKind { Deterministic, Exponential, General };

struct ServiceDistribution {
  ServiceKind kind = ServiceKind::Deterministic;
  double mean_s = 0.0;
  double variance_s2 = 0.0;

  static ServiceDistribution deterministic(double mean_s);
  static ServiceDistribution exponential(double mean_s);
  static ServiceDistribution general(double mean_s, double variance_s2);

  // Throws InvalidArgument on a violated invariant.
  void validate() const;
};

struct QueueSpec {
  double lambda = 0.0;
  ServiceDistribution service;
  double k = 1.0;

  double effective_rate() const { return k / service.mean_s; }
  void validate() const;
};

struct InterarrivalDistribution {
  double mean_a = 0.0;
  double variance_a2 = 0.0;

  void validate() const;
};

// Utilization at or above 1 - kStabilityMargin is refused as unstable.
inline constexpr double kStabilityMargin = 1e-9;
// |lambda * mean_a - 1| above this is an inconsistent G/G/1 input.
inline constexpr double kRateConsistencyTolerance = 1e-9;

double utilization(const QueueSpec& q);

// True when utilization(q) < 1 - kStabilityMargin.
bool is_stable(const QueueSpec& q);

// M/M/1 mean wait: lambda / (mu (mu - lambda)) with mu = k / mean_s.
// The service kind is not consulted.
double wait_mm1(const QueueSpec& q);

// M/D/1 mean wait, half the M/M/1 value at the same rates.
double wait_md1(const QueueSpec& q);

// M/G/1 Pollaczek-Khinchine mean wait over the k-folded service moments.
double wait_mg1(const QueueSpec& q);

// Marshall upper bound on the G/G/1 mean wait. The service variance is
// folded by k like the other evaluators.
double wait_gg1_upper_bound(double lambda, const InterarrivalDistribution& inter,
                            const ServiceDistribution& service, double k);

}  // namespace edgeq

#pragma once

// Runtime parameter estimation and the per-epoch offloading decision.

#include <cstdint>
#include <optional>
#include <vector>

#include "edgeq/error.hpp"
#include "edgeq/latency_model.hpp"
#include "edgeq/queueing.hpp"
#include "edgeq/rng.hpp"
#include "edgeq/scenario.hpp"

namespace edgeq {

// Count of timestamps in (now - window, now] divided by window.
template <class Range>
double estimate_arrival_rate(const Range& timestamps, double now, double window) {
  if (!(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  std::size_t n = 0;
  for (double t : timestamps)
    if (t > now - window && t <= now) ++n;
  return static_cast<double>(n) / window;
}

struct EdgeLoad {
  // Arrival rate of the other tenants, excluding this device.
  double lambda_edge = 0.0;
  // 1 / s_mean: per-request service rate of that background work.
  double mu_edge = 0.0;
  double s_mean = 0.0;
  double s_var = 0.0;
};

struct EstimatorState {
  double window = 5.0;
  double lambda_dev = 0.0;
  double bandwidth_estimate = 0.0;
  std::vector<EdgeLoad> per_edge_load;
};

struct EstimatorConfig {
  enum class Mode {
    // Windowed counts and completion logs from the simulated measurements.
    Measured,
    // Script ground truth, exact.
    Oracle,
  };

  Mode mode = Mode::Measured;
  double window = 5.0;
  // Log-normal multiplicative sigma on the bandwidth reading; 0 is exact.
  double bandwidth_noise = 0.0;
  std::uint64_t noise_seed = 0x5eed;
};

// Refreshes the estimate from one epoch's measurements. Service moments
// fall back to the previous estimate when the window holds no completions.
EstimatorState refresh_estimate(const EpochContext& ctx, const EstimatorConfig& config,
                                const EstimatorState* previous, Rng& noise);

struct LatencyObservation {
  double lambda = 0.0;
  double mean_latency = 0.0;
};

// Parallelism k in [k_min, k_max] minimizing the summed squared relative
// error of s + wait(lambda; s, k) against the observations, by golden-section
// search to 1e-4 relative tolerance. Candidate k values that leave an
// observation unstable are excluded from the bracket. Throws Degenerate
// when the observations cannot constrain k.
double fit_parallelism_k(const std::vector<LatencyObservation>& observations,
                         const ServiceDistribution& service, double k_min = 0.05,
                         double k_max = 256.0);

struct ManagerOptions {
  // Adds the device's own rate to each edge's background load when
  // predicting the offload latency. Off reproduces the literal algorithm,
  // which uses the observed edge load as is.
  bool self_load = true;
  MixtureForm mixture_form = MixtureForm::KFolded;
  // Added to every strategy other than the current one.
  double switch_penalty = 0.0;
};

struct Decision {
  double epoch = 0.0;
  Strategy strategy;
  // +inf marks an unstable strategy.
  double predicted_device = 0.0;
  std::vector<double> predicted_edges;
};

// Edge states for the predictors: tenants[0] is the device, the remaining
// entries describe the estimated background load.
std::vector<EdgeServerState> edge_states_from(const EstimatorState& est, const WorkloadSpec& w,
                                              const std::vector<double>& k_edges,
                                              bool self_load);

// Picks OnDevice unless some edge predicts strictly lower latency (beyond
// the tie tolerance); among edges the lowest index wins ties. Throws
// AllUnstable when every strategy is unstable.
Decision decide(const EstimatorState& est, const DeviceSpec& dev, const WorkloadSpec& w,
                const std::vector<EdgeServerState>& edges, const std::vector<NetworkPath>& nets,
                const ManagerOptions& options = {},
                std::optional<Strategy> current = std::nullopt);

struct ManagerConfig {
  EstimatorConfig estimator;
  ManagerOptions decision;
  ScenarioRunOptions run;
};

struct DecisionRecord {
  Decision decision;
  EstimatorState inputs;
};

struct AdaptiveResult {
  Timeline timeline;
  std::vector<DecisionRecord> decisions;
};

// Runs the script with the estimator and decide() installed as the epoch
// policy.
AdaptiveResult run_adaptive(const ScenarioScript& script, const ManagerConfig& config = {});

}  // namespace edgeq

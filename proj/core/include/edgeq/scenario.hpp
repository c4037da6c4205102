#pragma once

// Scripted dynamic scenarios: bandwidth and load change at scripted times
// while a policy picks the execution strategy once per epoch.

#include <cstdint>
#include <deque>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "edgeq/latency_model.hpp"

namespace edgeq {

struct Strategy {
  enum class Kind { OnDevice, Offload };

  Kind kind = Kind::OnDevice;
  std::size_t edge = 0;

  static Strategy on_device() { return {}; }
  static Strategy offload(std::size_t edge) { return {Kind::Offload, edge}; }
  bool operator==(const Strategy&) const = default;
};

// "device" or "E<n>" with 1-based n.
std::string to_string(const Strategy& s);

struct EdgeSetup {
  double k_edge = 1.0;
  // Co-located tenants; the scripted device is not listed here.
  std::vector<Tenant> tenants;
};

struct ScenarioEvent {
  enum class Kind { SetBandwidth, SetDeviceLambda, SetTenantLambda, AddTenant, RemoveTenant };

  double t = 0.0;
  Kind kind = Kind::SetBandwidth;
  // Bandwidth in bits/s or an arrival rate, depending on kind.
  double value = 0.0;
  std::size_t edge = 0;
  std::size_t tenant = 0;
  // AddTenant payload.
  Tenant added;
};

struct ScenarioScript {
  DeviceSpec dev;
  WorkloadSpec w;
  double bandwidth_b = 0.0;
  std::vector<EdgeSetup> edges;
  std::vector<ScenarioEvent> events;
  double horizon = 0.0;
  std::uint64_t seed = 1;
  double epoch_length = 1.0;
  // Strategy in force before the first decision.
  Strategy initial = Strategy::on_device();

  // Throws MalformedScript: unsorted events, negative values, bad indices,
  // or a horizon that does not extend past the last event.
  void validate() const;
};

// Raw runtime measurements, as a device-side manager would collect them.
// Entries older than the retention window are pruned.
struct MeasurementLog {
  struct EdgeLog {
    // Arrival instants at the edge processor, all tenants.
    std::deque<double> arrivals;
    // Arrival instants of this device's own offloaded requests.
    std::deque<double> own_arrivals;
    // (completion time, service demand in seconds) of other tenants' work.
    std::deque<std::pair<double, double>> completions;
  };

  std::deque<double> device_arrivals;
  std::vector<EdgeLog> edges;
};

// Ground truth at an epoch boundary, for oracle estimators and reports.
struct TrueState {
  double lambda_dev = 0.0;
  double bandwidth_b = 0.0;
  std::vector<EdgeSetup> edges;
};

struct EpochContext {
  double now = 0.0;
  double epoch_length = 1.0;
  Strategy current;
  const MeasurementLog& log;
  const TrueState& truth;
  const ScenarioScript& script;
};

struct PolicyDecision {
  Strategy strategy;
  double predicted_device = 0.0;
  std::vector<double> predicted_edges;
};

using PolicyHook = std::function<PolicyDecision(const EpochContext&)>;

struct TimelineEntry {
  double epoch = 0.0;
  Strategy strategy;
  // Mean latency of device requests that arrived during this epoch; NaN
  // when none arrived.
  double observed_mean = 0.0;
  std::uint64_t observed_count = 0;
  // NaN without a policy hook.
  double predicted_device = 0.0;
  std::vector<double> predicted_edges;
};

struct Timeline {
  std::vector<TimelineEntry> entries;
  std::size_t edge_count = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t completions = 0;
  std::uint64_t in_flight = 0;
};

struct ScenarioRunOptions {
  // Simulated time before t = 0 that fills the measurement windows.
  double preroll = 5.0;
  double retention = 120.0;
  std::size_t queue_bound = 1'000'000;
  bool fixed_time_nic = false;
};

// Events apply at their timestamps; with a hook installed the hook runs at
// every epoch boundary after that boundary's events and its strategy routes
// the device's subsequent arrivals. Arrivals stop at max(horizon,
// min_horizon) and in-flight requests drain.
Timeline run_scenario_script(const ScenarioScript& script, const PolicyHook& hook,
                             double min_horizon = 0.0, const ScenarioRunOptions& options = {});

// epoch_s, strategy, observed_ms, pred_device_ms, pred_edge_E<n>_ms...
void write_timeline_csv(std::ostream& out, const Timeline& timeline);

}  // namespace edgeq

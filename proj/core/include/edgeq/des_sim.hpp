#pragma once

// Seeded discrete-event simulation of the device / NIC / edge queueing
// network. Every run is single-threaded and a pure function of its inputs
// and seed; it is the reference the closed-form predictors are checked
// against.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edgeq/latency_model.hpp"
#include "edgeq/queueing.hpp"
#include "edgeq/sampler.hpp"

namespace edgeq {

enum class ServerMode {
  // One server occupied for service / k per request; each request still
  // takes its full service time to complete.
  AggregatedRate,
  // round(k) parallel servers, each at the full service time.
  DiscreteServers,
};

struct StationConfig {
  ServiceDistribution service;
  ServerMode server_mode = ServerMode::AggregatedRate;
  double k = 1.0;
  // Family used for ServiceKind::General.
  SampleFamily general_family = SampleFamily::TwoPoint;
};

struct ArrivalProcess {
  enum class Kind { Poisson, Renewal };

  Kind kind = Kind::Poisson;
  double rate = 0.0;
  // Renewal interarrival moments and family.
  double mean_a = 0.0;
  double variance_a2 = 0.0;
  SampleFamily family = SampleFamily::Exponential;
  std::uint64_t seed = 1;

  static ArrivalProcess poisson(double rate, std::uint64_t seed);
  static ArrivalProcess renewal(SampleFamily family, double mean_a, double variance_a2,
                                std::uint64_t seed);
  double arrival_rate() const { return kind == Kind::Poisson ? rate : 1.0 / mean_a; }
};

struct SimOptions {
  std::uint64_t seed = 1;
  // Fraction of min_completions discarded before measurement starts.
  double warmup_fraction = 0.1;
  int batches = 30;
  std::size_t queue_bound = 1'000'000;
  // Processor stations; NICs are always single-server.
  ServerMode server_mode = ServerMode::AggregatedRate;
  SampleFamily general_family = SampleFamily::TwoPoint;
  // NIC service times fixed at D/B instead of exponential with mean D/B.
  bool fixed_time_nic = false;
  bool record_trace = false;
  std::size_t trace_limit = 100'000;
  // Name of a station whose arrival instants are recorded (post warm-up).
  std::string record_arrivals_at;
  std::size_t arrival_record_limit = 1'000'000;
};

struct StationReport {
  std::string name;
  std::uint64_t samples = 0;
  double mean_wait = 0.0;
  double wait_stderr = 0.0;
  double wait_ci95 = 0.0;
  double mean_sojourn = 0.0;
  // Time-average number of jobs at the station.
  double mean_in_station = 0.0;
  double arrival_rate = 0.0;
  // Busy server fraction.
  double utilization = 0.0;

  // |L - lambda W| / (lambda W); 0 for an idle station.
  double little_error() const;
};

struct TraceRecord {
  std::uint64_t request_id = 0;
  int tenant_id = 0;
  double arrival_s = 0.0;
  double departure_s = 0.0;
  std::string path;
  // Indexed like SimReport::stations; nullopt when the station was skipped.
  std::vector<std::optional<double>> waits;
};

struct SimReport {
  // Measured completions of the tagged (device) stream.
  std::uint64_t completions = 0;
  double mean_latency = 0.0;
  double latency_stddev = 0.0;
  double latency_stderr = 0.0;
  double ci95_halfwidth = 0.0;
  std::vector<double> mean_wait_per_station;
  std::vector<StationReport> stations;
  // Length of the measurement window in simulated seconds.
  double measured_time = 0.0;
  // Counters over the whole run for the conservation check.
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t in_flight = 0;
  std::vector<TraceRecord> trace;
  std::vector<double> recorded_arrivals;

  const StationReport* station(const std::string& name) const;
  double max_little_error() const;
};

// Station names used by the network builders.
inline constexpr const char* kSimDevice = "device";
inline constexpr const char* kSimRequestNic = "request_nic";
inline constexpr const char* kSimEdge = "edge";
inline constexpr const char* kSimResponseNic = "response_nic";

// Single FCFS station. A zero arrival rate is simulated as one isolated
// arrival, which reports a single zero-wait completion.
SimReport simulate_station(const ArrivalProcess& arrivals, const StationConfig& station,
                           std::uint64_t min_completions, const SimOptions& options = {});

SimReport simulate_on_device(const DeviceSpec& dev, const WorkloadSpec& w,
                             std::uint64_t min_completions, const SimOptions& options = {});

// Device NIC -> edge processor -> edge NIC. tenants[0] is the device, whose
// requests cross the request NIC; the other tenants arrive directly at the
// edge processor and share the response NIC.
SimReport simulate_edge_offload(const DeviceSpec& dev, const EdgeServerState& edge,
                                const NetworkPath& net, const WorkloadSpec& w,
                                std::uint64_t min_completions, const SimOptions& options = {});

// Device processor (partial) -> NIC (intermediate payload) -> edge processor
// (partial) -> edge NIC. Stages with no work are skipped.
SimReport simulate_split(const DeviceSpec& dev, const EdgeServerState& edge,
                         const NetworkPath& net, const SplitPoint& sp, const WorkloadSpec& w,
                         std::uint64_t min_completions, const SimOptions& options = {});

// Per-request CSV: request_id, tenant_id, arrival_s, departure_s, path and
// one wait_<station>_s column per station.
void write_trace_csv(std::ostream& out, const SimReport& report);

}  // namespace edgeq

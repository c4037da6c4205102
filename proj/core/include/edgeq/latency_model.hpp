#pragma once

// End-to-end latency predictors for on-device processing, edge offloading
// and device/edge split processing.
//
// Units are canonical throughout: seconds, 1/second, bits and bits/second.

#include <cstddef>
#include <vector>

#include "edgeq/queueing.hpp"

namespace edgeq {

enum class WorkloadKind {
  // Fixed work per request (DNN inference); processors are M/D/1.
  Deterministic,
  // Input-dependent work (RNN, LLM); processors are M/M/1.
  Variable,
};

struct WorkloadSpec {
  double s_dev = 0.0;
  double s_edge = 0.0;
  WorkloadKind kind = WorkloadKind::Deterministic;
  // Service-time variances; only consulted for Variable workloads and by
  // the simulator. Zero for Deterministic.
  double variance_dev = 0.0;
  double variance_edge = 0.0;
  double d_req = 0.0;
  double d_res = 0.0;

  static WorkloadSpec deterministic(double s_dev, double s_edge, double d_req, double d_res);
  // Variances default to the exponential value mean^2.
  static WorkloadSpec variable(double s_dev, double s_edge, double d_req, double d_res);
  static WorkloadSpec variable(double s_dev, double s_edge, double d_req, double d_res,
                               double variance_dev, double variance_edge);

  // Per-request service distribution on each side.
  ServiceDistribution device_service() const;
  ServiceDistribution edge_service() const;

  void validate() const;
};

// Device-to-edge path. NIC service rates are derived on demand so they can
// never go stale after a bandwidth or payload change.
struct NetworkPath {
  double bandwidth_b = 0.0;

  // bandwidth / payload; infinite for an empty payload.
  double nic_rate(double payload_bits) const;
  double transmission_time(double payload_bits) const;
  double mu_net_req(const WorkloadSpec& w) const { return nic_rate(w.d_req); }
  double mu_net_res(const WorkloadSpec& w) const { return nic_rate(w.d_res); }

  static NetworkPath from_mbps(double mbps) { return {mbps * 1e6}; }
  void validate() const;
};

struct DeviceSpec {
  double k_dev = 1.0;
  double lambda_dev = 0.0;

  void validate() const;
};

struct Tenant {
  double lambda = 0.0;
  double s = 0.0;
  double var = 0.0;
};

// Accelerator shared by every tenant that offloads to it. By convention
// tenants[0] is the stream of the device under evaluation.
struct EdgeServerState {
  double k_edge = 1.0;
  std::vector<Tenant> tenants;

  // One tenant: the device itself.
  static EdgeServerState dedicated(double k_edge, const DeviceSpec& dev, const WorkloadSpec& w);
  // The device followed by the given co-located tenants.
  static EdgeServerState shared(double k_edge, const DeviceSpec& dev, const WorkloadSpec& w,
                                const std::vector<Tenant>& others);

  double lambda_edge() const;
  // Arrival-weighted mean service time; 0 when there is no load.
  double s_edge_mix() const;
  // Mixture second moment sum_i (lambda_i / lambda_edge) (var_i + s_i^2).
  double e_s2_mix() const;
  double var_mix() const;
  // lambda_edge * s_edge_mix, without the parallelism factor.
  double rho_edge() const;

  bool multi_tenant() const { return tenants.size() > 1; }
  void validate() const;
};

struct SplitPoint {
  double s_dev_partial = 0.0;
  double s_edge_partial = 0.0;
  double d_inter = 0.0;

  void validate() const;
};

// How the multi-tenant M/G/1 edge wait treats parallelism.
enum class MixtureForm {
  // mu_eff = k / s_mix with service moments folded by k; reduces exactly to
  // the M/D/1 and M/M/1 waits.
  KFolded,
  // (rho + lambda k mu Var) / (2 (k mu - lambda)) with rho = lambda / mu and
  // unscaled Var, as printed for the multi-tenant inequality.
  Literal,
};

struct ModelOptions {
  MixtureForm mixture_form = MixtureForm::KFolded;
};

struct EdgeOffloadBreakdown {
  double request_nic_wait = 0.0;
  double request_transmission = 0.0;
  double edge_wait = 0.0;
  double edge_service = 0.0;
  double response_nic_wait = 0.0;
  double response_transmission = 0.0;

  double total() const;
};

struct SplitBreakdown {
  double device_wait = 0.0;
  double device_service = 0.0;
  double inter_nic_wait = 0.0;
  double inter_transmission = 0.0;
  double edge_wait = 0.0;
  double edge_service = 0.0;
  double response_nic_wait = 0.0;
  double response_transmission = 0.0;

  double total() const;
};

// Names used in UnstableError::stage().
inline constexpr const char* kStageDevice = "device processor";
inline constexpr const char* kStageRequestNic = "request NIC";
inline constexpr const char* kStageEdge = "edge processor";
inline constexpr const char* kStageResponseNic = "response NIC";

// Mean queueing wait at the device processor: M/D/1 for Deterministic
// workloads, M/M/1 for Variable ones.
double device_processing_wait(const DeviceSpec& dev, const WorkloadSpec& w);

// Mean queueing wait at the edge processor over its full tenant set.
// Variable workloads use M/M/1 on the mixture mean; a single zero-variance
// tenant uses M/D/1; anything else uses the M/G/1 mixture.
double edge_processing_wait(const EdgeServerState& edge, WorkloadKind kind,
                            const ModelOptions& options = {});

// FCFS M/M/1 NIC wait for the given payload direction; 0 for empty payloads.
double nic_wait(double lambda, const NetworkPath& net, double payload_bits, const char* stage);

double predict_on_device(const DeviceSpec& dev, const WorkloadSpec& w);

EdgeOffloadBreakdown edge_offload_breakdown(const DeviceSpec& dev, const EdgeServerState& edge,
                                            const NetworkPath& net, const WorkloadSpec& w,
                                            const ModelOptions& options = {});

double predict_edge_offload(const DeviceSpec& dev, const EdgeServerState& edge,
                            const NetworkPath& net, const WorkloadSpec& w,
                            const ModelOptions& options = {});

// Edge state seen by a split request: tenants[0] carries the partial edge
// work, or is dropped when the split leaves nothing to compute remotely.
EdgeServerState split_edge_state(const EdgeServerState& edge, const SplitPoint& sp,
                                 const WorkloadSpec& w);

// True when the split sends nothing to the edge and reduces to local work.
bool split_is_local(const SplitPoint& sp);

SplitBreakdown split_breakdown(const DeviceSpec& dev, const EdgeServerState& edge,
                               const NetworkPath& net, const SplitPoint& sp,
                               const WorkloadSpec& w, const ModelOptions& options = {});

double predict_split(const DeviceSpec& dev, const EdgeServerState& edge, const NetworkPath& net,
                     const SplitPoint& sp, const WorkloadSpec& w,
                     const ModelOptions& options = {});

}  // namespace edgeq

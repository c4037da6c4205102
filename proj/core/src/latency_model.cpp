#include "edgeq/latency_model.hpp"

#include <cmath>
#include <limits>

#include "edgeq/error.hpp"

namespace edgeq {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

template <class F>
double staged(const char* stage, F&& eval) {
  try {
    return eval();
  } catch (const UnstableError& e) {
    throw UnstableError(stage, e.utilization());
  }
}

double processor_wait(double lambda, double s, double k, WorkloadKind kind, const char* stage) {
  if (lambda == 0.0 || s == 0.0) return 0.0;
  return staged(stage, [&] {
    if (kind == WorkloadKind::Variable)
      return wait_mm1({lambda, ServiceDistribution::exponential(s), k});
    return wait_md1({lambda, ServiceDistribution::deterministic(s), k});
  });
}

}  // namespace

WorkloadSpec WorkloadSpec::deterministic(double s_dev, double s_edge, double d_req, double d_res) {
  return {s_dev, s_edge, WorkloadKind::Deterministic, 0.0, 0.0, d_req, d_res};
}

WorkloadSpec WorkloadSpec::variable(double s_dev, double s_edge, double d_req, double d_res) {
  return variable(s_dev, s_edge, d_req, d_res, s_dev * s_dev, s_edge * s_edge);
}

WorkloadSpec WorkloadSpec::variable(double s_dev, double s_edge, double d_req, double d_res,
                                    double variance_dev, double variance_edge) {
  return {s_dev, s_edge, WorkloadKind::Variable, variance_dev, variance_edge, d_req, d_res};
}

ServiceDistribution WorkloadSpec::device_service() const {
  if (kind == WorkloadKind::Deterministic) return ServiceDistribution::deterministic(s_dev);
  if (variance_dev == s_dev * s_dev) return ServiceDistribution::exponential(s_dev);
  return ServiceDistribution::general(s_dev, variance_dev);
}

ServiceDistribution WorkloadSpec::edge_service() const {
  if (kind == WorkloadKind::Deterministic) return ServiceDistribution::deterministic(s_edge);
  if (variance_edge == s_edge * s_edge) return ServiceDistribution::exponential(s_edge);
  return ServiceDistribution::general(s_edge, variance_edge);
}

void WorkloadSpec::validate() const {
  require(std::isfinite(s_dev) && s_dev > 0.0, "s_dev must be positive");
  require(std::isfinite(s_edge) && s_edge > 0.0, "s_edge must be positive");
  require(nonneg(d_req) && nonneg(d_res), "payload sizes must be nonnegative");
  require(nonneg(variance_dev) && nonneg(variance_edge), "variances must be nonnegative");
  if (kind == WorkloadKind::Deterministic)
    require(variance_dev == 0.0 && variance_edge == 0.0,
            "deterministic workloads carry no service variance");
}

double NetworkPath::nic_rate(double payload_bits) const {
  if (payload_bits == 0.0) return std::numeric_limits<double>::infinity();
  return bandwidth_b / payload_bits;
}

double NetworkPath::transmission_time(double payload_bits) const {
  return payload_bits / bandwidth_b;
}

void NetworkPath::validate() const {
  require(std::isfinite(bandwidth_b) && bandwidth_b > 0.0, "bandwidth must be positive");
}

void DeviceSpec::validate() const {
  require(std::isfinite(k_dev) && k_dev > 0.0, "k_dev must be positive");
  require(nonneg(lambda_dev), "lambda_dev must be nonnegative");
}

EdgeServerState EdgeServerState::dedicated(double k_edge, const DeviceSpec& dev,
                                           const WorkloadSpec& w) {
  return shared(k_edge, dev, w, {});
}

EdgeServerState EdgeServerState::shared(double k_edge, const DeviceSpec& dev,
                                        const WorkloadSpec& w, const std::vector<Tenant>& others) {
  EdgeServerState edge;
  edge.k_edge = k_edge;
  edge.tenants.reserve(others.size() + 1);
  edge.tenants.push_back({dev.lambda_dev, w.s_edge, w.edge_service().variance_s2});
  edge.tenants.insert(edge.tenants.end(), others.begin(), others.end());
  return edge;
}

double EdgeServerState::lambda_edge() const {
  double sum = 0.0;
  for (const auto& t : tenants) sum += t.lambda;
  return sum;
}

double EdgeServerState::s_edge_mix() const {
  const double total = lambda_edge();
  if (total == 0.0) return 0.0;
  double mix = 0.0;
  for (const auto& t : tenants) mix += (t.lambda / total) * t.s;
  return mix;
}

double EdgeServerState::e_s2_mix() const {
  const double total = lambda_edge();
  if (total == 0.0) return 0.0;
  double m2 = 0.0;
  for (const auto& t : tenants) m2 += (t.lambda / total) * (t.var + t.s * t.s);
  return m2;
}

double EdgeServerState::var_mix() const {
  const double mean = s_edge_mix();
  // Cancellation can leave a tiny negative residue for identical tenants.
  return std::max(0.0, e_s2_mix() - mean * mean);
}

double EdgeServerState::rho_edge() const { return lambda_edge() * s_edge_mix(); }

void EdgeServerState::validate() const {
  require(std::isfinite(k_edge) && k_edge > 0.0, "k_edge must be positive");
  for (const auto& t : tenants) {
    require(nonneg(t.lambda), "tenant arrival rate must be nonnegative");
    require(std::isfinite(t.s) && t.s > 0.0, "tenant service time must be positive");
    require(nonneg(t.var), "tenant service variance must be nonnegative");
  }
}

void SplitPoint::validate() const {
  require(nonneg(s_dev_partial) && nonneg(s_edge_partial) && nonneg(d_inter),
          "split point values must be nonnegative");
}

double EdgeOffloadBreakdown::total() const {
  return request_nic_wait + request_transmission + edge_wait + edge_service + response_nic_wait +
         response_transmission;
}

double SplitBreakdown::total() const {
  return device_wait + device_service + inter_nic_wait + inter_transmission + edge_wait +
         edge_service + response_nic_wait + response_transmission;
}

double device_processing_wait(const DeviceSpec& dev, const WorkloadSpec& w) {
  return processor_wait(dev.lambda_dev, w.s_dev, dev.k_dev, w.kind, kStageDevice);
}

double edge_processing_wait(const EdgeServerState& edge, WorkloadKind kind,
                            const ModelOptions& options) {
  const double lambda = edge.lambda_edge();
  if (lambda == 0.0) return 0.0;
  const double s = edge.s_edge_mix();
  const double k = edge.k_edge;

  if (kind == WorkloadKind::Variable)
    return processor_wait(lambda, s, k, kind, kStageEdge);
  if (edge.tenants.size() == 1 && edge.tenants.front().var == 0.0)
    return processor_wait(lambda, s, k, kind, kStageEdge);

  const double var = edge.var_mix();
  if (options.mixture_form == MixtureForm::KFolded)
    return staged(kStageEdge, [&] { return wait_mg1({lambda, ServiceDistribution::general(s, var), k}); });

  const double rho_eff = lambda * s / k;
  if (rho_eff >= 1.0 - kStabilityMargin) throw UnstableError(kStageEdge, rho_eff);
  const double mu = 1.0 / s;
  return (edge.rho_edge() + lambda * k * mu * var) / (2.0 * (k * mu - lambda));
}

double nic_wait(double lambda, const NetworkPath& net, double payload_bits, const char* stage) {
  if (payload_bits == 0.0 || lambda == 0.0) return 0.0;
  return staged(stage, [&] {
    return wait_mm1({lambda, ServiceDistribution::exponential(payload_bits / net.bandwidth_b), 1.0});
  });
}

double predict_on_device(const DeviceSpec& dev, const WorkloadSpec& w) {
  dev.validate();
  w.validate();
  return device_processing_wait(dev, w) + w.s_dev;
}

EdgeOffloadBreakdown edge_offload_breakdown(const DeviceSpec& dev, const EdgeServerState& edge,
                                            const NetworkPath& net, const WorkloadSpec& w,
                                            const ModelOptions& options) {
  dev.validate();
  edge.validate();
  net.validate();
  w.validate();
  EdgeOffloadBreakdown b;
  b.request_nic_wait = nic_wait(dev.lambda_dev, net, w.d_req, kStageRequestNic);
  b.request_transmission = net.transmission_time(w.d_req);
  b.edge_wait = edge_processing_wait(edge, w.kind, options);
  b.edge_service = w.s_edge;
  b.response_nic_wait = nic_wait(edge.lambda_edge(), net, w.d_res, kStageResponseNic);
  b.response_transmission = net.transmission_time(w.d_res);
  return b;
}

double predict_edge_offload(const DeviceSpec& dev, const EdgeServerState& edge,
                            const NetworkPath& net, const WorkloadSpec& w,
                            const ModelOptions& options) {
  return edge_offload_breakdown(dev, edge, net, w, options).total();
}

bool split_is_local(const SplitPoint& sp) {
  return sp.s_edge_partial == 0.0 && sp.d_inter == 0.0;
}

EdgeServerState split_edge_state(const EdgeServerState& edge, const SplitPoint& sp,
                                 const WorkloadSpec& w) {
  EdgeServerState out = edge;
  if (out.tenants.empty()) return out;
  if (sp.s_edge_partial == 0.0) {
    out.tenants.erase(out.tenants.begin());
    return out;
  }
  auto& self = out.tenants.front();
  self.s = sp.s_edge_partial;
  const double scale = sp.s_edge_partial / w.s_edge;
  self.var = w.variance_edge * scale * scale;
  return out;
}

SplitBreakdown split_breakdown(const DeviceSpec& dev, const EdgeServerState& edge,
                               const NetworkPath& net, const SplitPoint& sp,
                               const WorkloadSpec& w, const ModelOptions& options) {
  dev.validate();
  edge.validate();
  net.validate();
  sp.validate();
  w.validate();

  SplitBreakdown b;
  b.device_wait =
      processor_wait(dev.lambda_dev, sp.s_dev_partial, dev.k_dev, w.kind, kStageDevice);
  b.device_service = sp.s_dev_partial;
  if (split_is_local(sp)) return b;

  b.inter_nic_wait = nic_wait(dev.lambda_dev, net, sp.d_inter, kStageRequestNic);
  b.inter_transmission = net.transmission_time(sp.d_inter);
  if (sp.s_edge_partial > 0.0) {
    b.edge_wait = edge_processing_wait(split_edge_state(edge, sp, w), w.kind, options);
    b.edge_service = sp.s_edge_partial;
  }
  // Results return over the shared edge NIC, which also carries the other
  // tenants' responses.
  b.response_nic_wait = nic_wait(edge.lambda_edge(), net, w.d_res, kStageResponseNic);
  b.response_transmission = net.transmission_time(w.d_res);
  return b;
}

double predict_split(const DeviceSpec& dev, const EdgeServerState& edge, const NetworkPath& net,
                     const SplitPoint& sp, const WorkloadSpec& w, const ModelOptions& options) {
  return split_breakdown(dev, edge, net, sp, w, options).total();
}

}  // namespace edgeq

#include "edgeq/crossover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgeq/error.hpp"

namespace edgeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectRelTol = 1e-6;

void check_rate(double lambda, double mu, const char* stage) {
  if (lambda >= (1.0 - kStabilityMargin) * mu) throw UnstableError(stage, lambda / mu);
}

// lambda / (mu (mu - lambda)) for an M/M/1 NIC; 0 for an empty payload.
double nic_term(double lambda, double bandwidth, double payload, const char* stage) {
  if (payload == 0.0 || lambda == 0.0) return 0.0;
  const double mu = bandwidth / payload;
  check_rate(lambda, mu, stage);
  return lambda / (mu * (mu - lambda));
}

// 1/(k mu - lambda) - 1/(k mu), the M/M/1 processor wait.
double mm1_term(double lambda, double s, double k, const char* stage) {
  if (lambda == 0.0) return 0.0;
  const double kmu = k / s;
  check_rate(lambda, kmu, stage);
  return 1.0 / (kmu - lambda) - 1.0 / kmu;
}

double md1_term(double lambda, double s, double k, const char* stage) {
  return 0.5 * mm1_term(lambda, s, k, stage);
}

double mg1_term(const EdgeServerState& edge, MixtureForm form) {
  const double lambda = edge.lambda_edge();
  if (lambda == 0.0) return 0.0;
  const double s = edge.s_edge_mix();
  const double var = edge.var_mix();
  const double k = edge.k_edge;
  const double mu = 1.0 / s;
  check_rate(lambda, k * mu, kStageEdge);
  if (form == MixtureForm::KFolded) {
    const double rho = lambda / (k * mu);
    return (rho + lambda * k * mu * (var / (k * k))) / (2.0 * (k * mu - lambda));
  }
  const double rho = lambda / mu;
  return (rho + lambda * k * mu * var) / (2.0 * (k * mu - lambda));
}

// Terms shared by every inequality: both NIC waits and the transmission
// time of request plus result.
double network_terms(const Scenario& sc) {
  const double b = sc.net.bandwidth_b;
  return nic_term(sc.dev.lambda_dev, b, sc.w.d_req, kStageRequestNic) +
         nic_term(sc.edge.lambda_edge(), b, sc.w.d_res, kStageResponseNic) +
         (sc.w.d_req + sc.w.d_res) / b;
}

void validate(const Scenario& sc) {
  sc.dev.validate();
  sc.edge.validate();
  sc.net.validate();
  sc.w.validate();
}

double lemma1_rhs(const Scenario& sc) {
  const auto& e = sc.edge;
  return network_terms(sc) + md1_term(e.lambda_edge(), e.s_edge_mix(), e.k_edge, kStageEdge) -
         md1_term(sc.dev.lambda_dev, sc.w.s_dev, sc.dev.k_dev, kStageDevice);
}

double lemma2_rhs(const Scenario& sc) {
  const auto& e = sc.edge;
  // A lone zero-variance tenant is the dedicated case.
  const bool dedicated = e.tenants.size() == 1 && e.tenants.front().var == 0.0;
  const double edge_term = dedicated
                               ? md1_term(e.lambda_edge(), e.s_edge_mix(), e.k_edge, kStageEdge)
                               : mg1_term(e, sc.options.mixture_form);
  return network_terms(sc) + edge_term -
         md1_term(sc.dev.lambda_dev, sc.w.s_dev, sc.dev.k_dev, kStageDevice);
}

double lemma3_rhs(const Scenario& sc) {
  const auto& e = sc.edge;
  return network_terms(sc) + mm1_term(e.lambda_edge(), e.s_edge_mix(), e.k_edge, kStageEdge) -
         mm1_term(sc.dev.lambda_dev, sc.w.s_dev, sc.dev.k_dev, kStageDevice);
}

bool holds(const Scenario& sc, double rhs) {
  return (sc.w.s_dev - sc.w.s_edge) - rhs < kTieTolerance;
}

enum class Winner { Device, Edge };

std::optional<Winner> winner_at(const Scenario& sc, SweepParam param, double value) {
  const auto gap = latency_gap(sc, param, value);
  if (!gap) return std::nullopt;
  return *gap < kTieTolerance ? Winner::Device : Winner::Edge;
}

}  // namespace

bool lemma1_holds(const Scenario& sc) {
  validate(sc);
  if (sc.edge.multi_tenant())
    throw Error(ErrorCode::MultiTenant, "shared edge: use the multi-tenant inequality");
  if (sc.w.kind != WorkloadKind::Deterministic)
    throw Error(ErrorCode::WrongDistribution, "dedicated inequality needs deterministic service");
  return holds(sc, lemma1_rhs(sc));
}

bool lemma2_holds(const Scenario& sc) {
  validate(sc);
  if (sc.w.kind != WorkloadKind::Deterministic)
    throw Error(ErrorCode::WrongDistribution, "multi-tenant inequality needs deterministic service");
  return holds(sc, lemma2_rhs(sc));
}

bool lemma3_holds(const Scenario& sc) {
  validate(sc);
  if (sc.w.kind != WorkloadKind::Variable)
    throw Error(ErrorCode::WrongDistribution, "variable-service inequality needs variable service");
  return holds(sc, lemma3_rhs(sc));
}

double lemma_rhs(const Scenario& sc) {
  validate(sc);
  if (sc.w.kind == WorkloadKind::Variable) return lemma3_rhs(sc);
  return lemma2_rhs(sc);
}

bool device_wins(const Scenario& sc) {
  double t_dev = kInf;
  double t_edge = kInf;
  try {
    t_dev = predict_on_device(sc.dev, sc.w);
  } catch (const UnstableError&) {
  }
  try {
    t_edge = predict_edge_offload(sc.dev, sc.edge, sc.net, sc.w, sc.options);
  } catch (const UnstableError&) {
  }
  if (std::isinf(t_dev) && std::isinf(t_edge))
    throw Error(ErrorCode::AllUnstable, "both strategies are unstable");
  if (std::isinf(t_edge)) return true;
  if (std::isinf(t_dev)) return false;
  return t_dev - t_edge < kTieTolerance;
}

Scenario apply_param(const Scenario& sc, SweepParam param, double value) {
  Scenario out = sc;
  switch (param) {
    case SweepParam::Bandwidth:
      out.net.bandwidth_b = value;
      break;
    case SweepParam::Lambda:
      out.dev.lambda_dev = value;
      if (!out.edge.tenants.empty()) out.edge.tenants.front().lambda = value;
      break;
    case SweepParam::TenantCount: {
      if (sc.edge.tenants.empty())
        throw Error(ErrorCode::InvalidArgument, "tenant sweep needs a device tenant");
      const auto m = static_cast<long>(std::lround(value));
      if (m < 1) throw Error(ErrorCode::InvalidArgument, "tenant count must be at least 1");
      out.edge.tenants.assign(static_cast<std::size_t>(m), sc.edge.tenants.front());
      break;
    }
    case SweepParam::SDev:
      out.w.s_dev = value;
      break;
  }
  return out;
}

std::optional<double> latency_gap(const Scenario& sc, SweepParam param, double value) {
  const Scenario s = apply_param(sc, param, value);
  double t_dev = kInf;
  double t_edge = kInf;
  try {
    t_dev = predict_on_device(s.dev, s.w);
  } catch (const UnstableError&) {
  }
  try {
    t_edge = predict_edge_offload(s.dev, s.edge, s.net, s.w, s.options);
  } catch (const UnstableError&) {
  }
  if (std::isinf(t_dev) && std::isinf(t_edge)) return std::nullopt;
  if (std::isinf(t_dev)) return kInf;
  if (std::isinf(t_edge)) return -kInf;
  return t_dev - t_edge;
}

CrossoverResult find_crossovers(const Scenario& sc, SweepParam param, Interval range,
                                int resolution) {
  if (!(range.lo <= range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi))
    throw Error(ErrorCode::InvalidArgument, "sweep range must be a finite ordered interval");

  const bool integral = param == SweepParam::TenantCount;
  std::vector<double> grid;
  if (integral) {
    for (double m = std::ceil(range.lo); m <= std::floor(range.hi); m += 1.0) grid.push_back(m);
  } else if (resolution < 2 || range.lo == range.hi) {
    grid.push_back(range.lo);
  } else {
    grid.reserve(static_cast<std::size_t>(resolution));
    const double step = (range.hi - range.lo) / (resolution - 1);
    for (int i = 0; i < resolution; ++i)
      grid.push_back(i + 1 == resolution ? range.hi : range.lo + step * i);
  }

  std::vector<std::optional<Winner>> winners;
  winners.reserve(grid.size());
  for (double v : grid) winners.push_back(winner_at(sc, param, v));

  CrossoverResult result;
  result.swept_param = param;
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!winners[i]) continue;
    if (!any) result.feasible_range.lo = grid[i];
    result.feasible_range.hi = grid[i];
    any = true;
  }
  if (!any) throw Error(ErrorCode::EmptyFeasibleRange, "no stable strategy anywhere in range");

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!winners[i] || !winners[i + 1] || *winners[i] == *winners[i + 1]) continue;
    const Winner left = *winners[i];
    double lo = grid[i];
    double hi = grid[i + 1];
    if (integral) {
      while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        const auto w = winner_at(sc, param, mid);
        if (!w) break;
        (*w == left ? lo : hi) = mid;
      }
    } else {
      for (int iter = 0; iter < 200; ++iter) {
        if (hi - lo <= kBisectRelTol * std::max(std::abs(lo), std::abs(hi))) break;
        const double mid = 0.5 * (lo + hi);
        const auto w = winner_at(sc, param, mid);
        if (!w) break;
        (*w == left ? lo : hi) = mid;
      }
    }
    Crossing c;
    c.value = integral ? hi : 0.5 * (lo + hi);
    c.direction = left == Winner::Edge ? CrossDirection::ToDevice : CrossDirection::ToEdge;
    c.lo = grid[i];
    c.hi = grid[i + 1];
    result.crossings.push_back(c);
  }
  return result;
}

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Bandwidth: return "bandwidth";
    case SweepParam::Lambda: return "lambda";
    case SweepParam::TenantCount: return "tenants";
    case SweepParam::SDev: return "s_dev";
  }
  return "?";
}

const char* to_string(CrossDirection d) {
  return d == CrossDirection::ToDevice ? "to_device" : "to_edge";
}

}  // namespace edgeq

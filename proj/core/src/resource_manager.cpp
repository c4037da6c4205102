#include "edgeq/resource_manager.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgeq/crossover.hpp"

namespace edgeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double var = 0.0;
};

template <class It>
Moments moments(It first, It last) {
  Moments m;
  double sum = 0.0;
  double sum2 = 0.0;
  for (auto it = first; it != last; ++it) {
    sum += it->second;
    sum2 += it->second * it->second;
    ++m.n;
  }
  if (m.n == 0) return m;
  m.mean = sum / static_cast<double>(m.n);
  m.var = std::max(0.0, sum2 / static_cast<double>(m.n) - m.mean * m.mean);
  return m;
}

EdgeLoad aggregate(const std::vector<Tenant>& tenants) {
  EdgeServerState st;
  st.tenants = tenants;
  EdgeLoad load;
  load.lambda_edge = st.lambda_edge();
  load.s_mean = st.s_edge_mix();
  load.s_var = st.var_mix();
  load.mu_edge = load.s_mean > 0.0 ? 1.0 / load.s_mean : 0.0;
  return load;
}

double noisy(double value, double sigma, Rng& rng) {
  if (sigma <= 0.0) return value;
  return value * std::exp(sigma * rng.normal());
}

}  // namespace

EstimatorState refresh_estimate(const EpochContext& ctx, const EstimatorConfig& config,
                                const EstimatorState* previous, Rng& noise) {
  if (!(config.window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  EstimatorState est;
  est.window = config.window;
  est.bandwidth_estimate = noisy(ctx.truth.bandwidth_b, config.bandwidth_noise, noise);

  if (config.mode == EstimatorConfig::Mode::Oracle) {
    est.lambda_dev = ctx.truth.lambda_dev;
    for (const auto& e : ctx.truth.edges) est.per_edge_load.push_back(aggregate(e.tenants));
    return est;
  }

  const double now = ctx.now;
  const double W = config.window;
  est.lambda_dev = estimate_arrival_rate(ctx.log.device_arrivals, now, W);
  const auto& w = ctx.script.w;
  for (std::size_t e = 0; e < ctx.log.edges.size(); ++e) {
    const auto& log = ctx.log.edges[e];
    EdgeLoad load;
    const double total = estimate_arrival_rate(log.arrivals, now, W);
    const double own = estimate_arrival_rate(log.own_arrivals, now, W);
    load.lambda_edge = std::max(0.0, total - own);

    const auto in_window = std::find_if(log.completions.begin(), log.completions.end(),
                                        [&](const auto& c) { return c.first > now - W; });
    Moments m = moments(in_window, log.completions.end());
    if (m.n > 0) {
      load.s_mean = m.mean;
      load.s_var = m.var;
    } else if (previous && e < previous->per_edge_load.size() &&
               previous->per_edge_load[e].s_mean > 0.0) {
      load.s_mean = previous->per_edge_load[e].s_mean;
      load.s_var = previous->per_edge_load[e].s_var;
    } else if ((m = moments(log.completions.begin(), log.completions.end())).n > 0) {
      load.s_mean = m.mean;
      load.s_var = m.var;
    } else {
      load.s_mean = w.s_edge;
      load.s_var = w.kind == WorkloadKind::Variable ? w.variance_edge : 0.0;
    }
    load.mu_edge = 1.0 / load.s_mean;
    est.per_edge_load.push_back(load);
  }
  return est;
}

double fit_parallelism_k(const std::vector<LatencyObservation>& observations,
                         const ServiceDistribution& service, double k_min, double k_max) {
  service.validate();
  if (observations.size() < 3)
    throw Error(ErrorCode::Degenerate, "need at least 3 observations");
  if (!(k_min > 0.0) || !(k_max > k_min)) throw Error(ErrorCode::InvalidArgument, "bad k range");

  double max_load = 0.0;
  std::vector<double> lambdas;
  for (const auto& o : observations) {
    if (!(o.lambda >= 0.0) || !(o.mean_latency > 0.0))
      throw Error(ErrorCode::InvalidArgument, "invalid observation");
    max_load = std::max(max_load, o.lambda * service.mean_s);
    lambdas.push_back(o.lambda);
  }
  std::sort(lambdas.begin(), lambdas.end());
  const auto distinct = std::unique(lambdas.begin(), lambdas.end()) - lambdas.begin();
  if (distinct < 3) throw Error(ErrorCode::Degenerate, "need 3 distinct arrival rates");
  if (max_load * 1e6 < service.mean_s)
    throw Error(ErrorCode::Degenerate, "arrival rates too low to constrain k");

  double lo = std::max(k_min, max_load / (1.0 - kStabilityMargin) * (1.0 + 1e-9));
  double hi = k_max;
  if (!(hi > lo)) throw Error(ErrorCode::Degenerate, "no stable k in range");

  const auto objective = [&](double k) {
    double sum = 0.0;
    for (const auto& o : observations) {
      const QueueSpec q{o.lambda, service, k};
      double wait = 0.0;
      switch (service.kind) {
        case ServiceKind::Deterministic: wait = wait_md1(q); break;
        case ServiceKind::Exponential: wait = wait_mm1(q); break;
        case ServiceKind::General: wait = wait_mg1(q); break;
      }
      const double rel = (service.mean_s + wait - o.mean_latency) / o.mean_latency;
      sum += rel * rel;
    }
    return sum;
  };

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-4 * 0.5 * (a + b)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<EdgeServerState> edge_states_from(const EstimatorState& est, const WorkloadSpec& w,
                                              const std::vector<double>& k_edges,
                                              bool self_load) {
  if (k_edges.size() != est.per_edge_load.size())
    throw Error(ErrorCode::InvalidArgument, "edge count mismatch");
  const double var_edge = w.kind == WorkloadKind::Variable ? w.variance_edge : 0.0;
  std::vector<EdgeServerState> out;
  for (std::size_t e = 0; e < k_edges.size(); ++e) {
    const auto& load = est.per_edge_load[e];
    EdgeServerState st;
    st.k_edge = k_edges[e];
    st.tenants.push_back(Tenant{self_load ? est.lambda_dev : 0.0, w.s_edge, var_edge});
    if (load.lambda_edge > 0.0) st.tenants.push_back(Tenant{load.lambda_edge, load.s_mean, load.s_var});
    out.push_back(std::move(st));
  }
  return out;
}

Decision decide(const EstimatorState& est, const DeviceSpec& dev, const WorkloadSpec& w,
                const std::vector<EdgeServerState>& edges, const std::vector<NetworkPath>& nets,
                const ManagerOptions& options, std::optional<Strategy> current) {
  if (edges.size() != nets.size()) throw Error(ErrorCode::InvalidArgument, "one path per edge");
  DeviceSpec d = dev;
  d.lambda_dev = est.lambda_dev;
  const ModelOptions model{options.mixture_form};

  const auto penalty = [&](const Strategy& s) {
    return current && !(*current == s) ? options.switch_penalty : 0.0;
  };

  Decision out;
  try {
    out.predicted_device = predict_on_device(d, w);
  } catch (const UnstableError&) {
    out.predicted_device = kInf;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    double t = kInf;
    try {
      t = predict_edge_offload(d, edges[e], nets[e], w, model);
    } catch (const UnstableError&) {
    }
    out.predicted_edges.push_back(t);
  }

  const double dev_cost = out.predicted_device + penalty(Strategy::on_device());
  std::optional<std::size_t> best;
  double best_cost = kInf;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double cost = out.predicted_edges[e] + penalty(Strategy::offload(e));
    if (cost < best_cost) {
      best_cost = cost;
      best = e;
    }
  }
  if (std::isinf(dev_cost) && !best) throw Error(ErrorCode::AllUnstable, "no stable strategy");
  if (best && !(dev_cost - best_cost < kTieTolerance))
    out.strategy = Strategy::offload(*best);
  else
    out.strategy = Strategy::on_device();
  return out;
}

AdaptiveResult run_adaptive(const ScenarioScript& script, const ManagerConfig& config) {
  AdaptiveResult result;
  std::vector<double> k_edges;
  for (const auto& e : script.edges) k_edges.push_back(e.k_edge);
  Rng noise(config.estimator.noise_seed ^ script.seed, 0);
  std::optional<EstimatorState> previous;

  const PolicyHook hook = [&](const EpochContext& ctx) {
    EstimatorState est =
        refresh_estimate(ctx, config.estimator, previous ? &*previous : nullptr, noise);
    const auto edges = edge_states_from(est, script.w, k_edges, config.decision.self_load);
    const std::vector<NetworkPath> nets(edges.size(), NetworkPath{est.bandwidth_estimate});
    Decision d = decide(est, script.dev, script.w, edges, nets, config.decision, ctx.current);
    d.epoch = ctx.now;
    result.decisions.push_back(DecisionRecord{d, est});
    previous = std::move(est);
    return PolicyDecision{d.strategy, d.predicted_device, d.predicted_edges};
  };

  result.timeline = run_scenario_script(script, hook, 0.0, config.run);
  return result;
}

}  // namespace edgeq

#pragma once

#include <vector>

#include "edgeq/crossover.hpp"
#include "edgeq/error.hpp"
#include "edgeq/latency_model.hpp"
#include "oracles.hpp"

namespace edgeq::testing {

enum class ScenarioShape { Dedicated, Shared, Variable };

inline bool both_stable(const Scenario& sc) {
  try {
    predict_on_device(sc.dev, sc.w);
    predict_edge_offload(sc.dev, sc.edge, sc.net, sc.w, sc.options);
    return true;
  } catch (const UnstableError&) {
    return false;
  }
}

// Scenario with both strategies stable. Ranges span both winners.
inline Scenario random_scenario(Gen& g, ScenarioShape shape, double max_rho = 0.95) {
  for (;;) {
    Scenario sc;
    const double s_dev = g.log_uniform(1e-3, 0.2);
    const double s_edge = g.log_uniform(1e-3, 0.2);
    const double d_req = g.coin(0.1) ? 0.0 : g.log_uniform(1e3, 1e6);
    const double d_res = g.coin(0.1) ? 0.0 : g.log_uniform(1e2, 1e5);
    if (shape == ScenarioShape::Variable) {
      const double cv2_dev = g.uniform(0.0, 2.0);
      const double cv2_edge = g.uniform(0.0, 2.0);
      sc.w = g.coin() ? WorkloadSpec::variable(s_dev, s_edge, d_req, d_res)
                      : WorkloadSpec::variable(s_dev, s_edge, d_req, d_res, cv2_dev * s_dev * s_dev,
                                               cv2_edge * s_edge * s_edge);
    } else {
      sc.w = WorkloadSpec::deterministic(s_dev, s_edge, d_req, d_res);
    }
    sc.dev.k_dev = g.uniform(0.5, 4.0);
    sc.dev.lambda_dev = g.uniform(0.01, max_rho) * sc.dev.k_dev / s_dev;
    sc.net.bandwidth_b = g.log_uniform(1e5, 1e9);
    const double k_edge = g.uniform(0.5, 8.0);
    if (shape == ScenarioShape::Shared) {
      std::vector<Tenant> others;
      const int n = g.integer(1, 6);
      for (int i = 0; i < n; ++i) {
        const double s = g.log_uniform(1e-3, 0.2);
        others.push_back({g.log_uniform(0.01, 50.0), s, g.coin() ? 0.0 : g.uniform(0.0, 1.0) * s * s});
      }
      sc.edge = EdgeServerState::shared(k_edge, sc.dev, sc.w, others);
      sc.options.mixture_form = g.coin() ? MixtureForm::KFolded : MixtureForm::Literal;
    } else {
      sc.edge = EdgeServerState::dedicated(k_edge, sc.dev, sc.w);
    }
    if (both_stable(sc)) return sc;
  }
}

inline bool predictor_says_device(const Scenario& sc) {
  return predict_on_device(sc.dev, sc.w) -
             predict_edge_offload(sc.dev, sc.edge, sc.net, sc.w, sc.options) <
         kTieTolerance;
}

// T_dev - T_edge, or nullopt when either side is unstable.
inline std::optional<double> gap(const Scenario& sc) {
  try {
    return predict_on_device(sc.dev, sc.w) -
           predict_edge_offload(sc.dev, sc.edge, sc.net, sc.w, sc.options);
  } catch (const UnstableError&) {
    return std::nullopt;
  }
}

// Edge state with the device's own tenant refreshed after a workload edit.
inline Scenario with_workload(Scenario sc, const WorkloadSpec& w) {
  sc.w = w;
  sc.edge.tenants.front() =
      Tenant{sc.dev.lambda_dev, w.s_edge, w.kind == WorkloadKind::Variable ? w.variance_edge : 0.0};
  return sc;
}

}  // namespace edgeq::testing

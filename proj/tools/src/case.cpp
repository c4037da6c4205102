#include <cmath>
#include <limits>
#include <vector>

#include <json.hpp>

#include "edgeq/cli/commands.hpp"
#include "edgeq/resource_manager.hpp"
#include "format.hpp"

namespace edgeq::cli {

namespace {

using nlohmann::ordered_json;

ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

double predicted_for(const TimelineEntry& e) {
  if (e.strategy.kind == Strategy::Kind::OnDevice) return e.predicted_device;
  return e.strategy.edge < e.predicted_edges.size() ? e.predicted_edges[e.strategy.edge]
                                                    : std::numeric_limits<double>::quiet_NaN();
}

struct Phase {
  Strategy strategy;
  double start = 0.0;
  double end = 0.0;
  double observed_sum = 0.0;
  std::uint64_t observed_count = 0;
  double predicted_sum = 0.0;
  std::size_t predicted_count = 0;
};

}  // namespace

int cmd_case(const ScriptFile& file, const CaseOptions& options, std::ostream& timeline,
             std::ostream& summary, std::ostream* decisions) {
  ScenarioScript script = file.script;
  if (options.epoch) script.epoch_length = *options.epoch;
  if (options.seed) script.seed = *options.seed;

  const AdaptiveResult result = run_adaptive(script, file.manager);
  write_timeline_csv(timeline, result.timeline);

  std::vector<Phase> phases;
  for (const auto& e : result.timeline.entries) {
    if (phases.empty() || !(phases.back().strategy == e.strategy))
      phases.push_back(Phase{e.strategy, e.epoch, e.epoch});
    Phase& p = phases.back();
    p.end = e.epoch + script.epoch_length;
    if (e.observed_count > 0) {
      p.observed_sum += e.observed_mean * static_cast<double>(e.observed_count);
      p.observed_count += e.observed_count;
    }
    const double pred = predicted_for(e);
    if (std::isfinite(pred)) {
      p.predicted_sum += pred;
      ++p.predicted_count;
    }
  }
  if (!phases.empty()) phases.back().end = std::max(phases.back().end, script.horizon);

  summary << "switches:";
  if (phases.size() <= 1) summary << " none";
  for (std::size_t i = 1; i < phases.size(); ++i)
    summary << " t=" << num(phases[i].start) << "->" << to_string(phases[i].strategy);
  summary << '\n';
  summary << "phase,start_s,end_s,strategy,observed_ms,predicted_ms,rel_error\n";
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const Phase& p = phases[i];
    const double obs = p.observed_count ? p.observed_sum / static_cast<double>(p.observed_count)
                                        : std::numeric_limits<double>::quiet_NaN();
    const double pred = p.predicted_count ? p.predicted_sum / static_cast<double>(p.predicted_count)
                                          : std::numeric_limits<double>::quiet_NaN();
    summary << i + 1 << ',' << num(p.start) << ',' << num(p.end) << ',' << to_string(p.strategy)
            << ',' << ms(obs) << ',' << ms(pred) << ',' << num(std::abs(obs - pred) / pred, "%.4f")
            << '\n';
  }

  if (decisions) {
    ordered_json log = ordered_json::array();
    for (const auto& rec : result.decisions) {
      ordered_json edges = ordered_json::array();
      for (const auto& l : rec.inputs.per_edge_load)
        edges.push_back({{"lambda_edge", l.lambda_edge},
                         {"mu_edge", l.mu_edge},
                         {"s_mean_s", l.s_mean},
                         {"s_var_s2", l.s_var}});
      ordered_json predicted_edges = ordered_json::array();
      for (double t : rec.decision.predicted_edges) predicted_edges.push_back(finite_or_null(t));
      log.push_back({{"epoch_s", rec.decision.epoch},
                     {"inputs",
                      {{"lambda_dev", rec.inputs.lambda_dev},
                       {"bandwidth_bps", rec.inputs.bandwidth_estimate},
                       {"window_s", rec.inputs.window},
                       {"edges", std::move(edges)}}},
                     {"predicted",
                      {{"device_s", finite_or_null(rec.decision.predicted_device)},
                       {"edges_s", std::move(predicted_edges)}}},
                     {"strategy", to_string(rec.decision.strategy)}});
    }
    *decisions << log.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace edgeq::cli

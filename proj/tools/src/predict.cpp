#include <functional>
#include <optional>

#include <json.hpp>

#include "edgeq/cli/commands.hpp"
#include "edgeq/crossover.hpp"
#include "edgeq/error.hpp"
#include "format.hpp"

namespace edgeq::cli {

namespace {

using nlohmann::ordered_json;

struct Outcome {
  std::optional<double> latency;
  std::string unstable_stage;
  double utilization = 0.0;
};

template <class F>
Outcome evaluate(F&& f) {
  Outcome o;
  try {
    o.latency = f();
  } catch (const UnstableError& e) {
    o.unstable_stage = e.stage();
    o.utilization = e.utilization();
  }
  return o;
}

const char* lemma_name(const Scenario& sc) {
  if (sc.w.kind == WorkloadKind::Variable) return "lemma3";
  return sc.edge.multi_tenant() ? "lemma2" : "lemma1";
}

std::optional<bool> lemma_verdict(const Scenario& sc) {
  try {
    if (sc.w.kind == WorkloadKind::Variable) return lemma3_holds(sc);
    return sc.edge.multi_tenant() ? lemma2_holds(sc) : lemma1_holds(sc);
  } catch (const UnstableError&) {
    return std::nullopt;
  }
}

ordered_json outcome_json(const Outcome& o) {
  ordered_json j;
  if (o.latency) {
    j["latency_s"] = *o.latency;
  } else {
    j["latency_s"] = nullptr;
    j["unstable_stage"] = o.unstable_stage;
    j["utilization"] = o.utilization;
  }
  return j;
}

std::string outcome_text(const Outcome& o) {
  if (o.latency) return ms(*o.latency) + " ms";
  return "unstable (" + o.unstable_stage + ", utilization " + num(o.utilization, "%.4f") + ")";
}

}  // namespace

int cmd_predict(const Config& c, const PredictOptions& options, std::ostream& out) {
  bool any_unstable = false;
  const Outcome dev = evaluate([&] { return predict_on_device(c.dev, c.w); });
  any_unstable |= !dev.latency;

  ordered_json root;
  root["device"] = outcome_json(dev);
  std::string text = "device     T_dev   = " + outcome_text(dev) + "\n";

  ordered_json edges = ordered_json::array();
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    const Scenario sc{c.dev, c.edge_state(e), c.path(e), c.w, c.options};
    const Outcome res = evaluate([&] {
      return edge_offload_breakdown(sc.dev, sc.edge, sc.net, sc.w, sc.options).total();
    });
    any_unstable |= !res.latency;
    const std::string label = "E" + std::to_string(e + 1);

    ordered_json j{{"edge", label}, {"tenants", sc.edge.tenants.size()}};
    j.update(outcome_json(res));
    text += "edge " + label + std::string(label.size() < 6 ? 6 - label.size() : 0, ' ') +
            "T_edge  = " + outcome_text(res) + "\n";
    if (res.latency) {
      const auto b = edge_offload_breakdown(sc.dev, sc.edge, sc.net, sc.w, sc.options);
      j["breakdown"] = {{"request_nic_wait_s", b.request_nic_wait},
                        {"request_transmission_s", b.request_transmission},
                        {"edge_wait_s", b.edge_wait},
                        {"edge_service_s", b.edge_service},
                        {"response_nic_wait_s", b.response_nic_wait},
                        {"response_transmission_s", b.response_transmission}};
      text += "           request NIC wait " + ms(b.request_nic_wait) + " ms, transmission " +
              ms(b.request_transmission) + " ms\n";
      text += "           edge wait " + ms(b.edge_wait) + " ms, service " + ms(b.edge_service) +
              " ms\n";
      text += "           response NIC wait " + ms(b.response_nic_wait) + " ms, transmission " +
              ms(b.response_transmission) + " ms\n";
    }
    const auto verdict = lemma_verdict(sc);
    j["lemma"] = lemma_name(sc);
    j["lemma_holds"] = verdict ? ordered_json(*verdict) : ordered_json(nullptr);
    std::string winner = "none (both unstable)";
    try {
      winner = device_wins(sc) ? "device" : label;
    } catch (const Error&) {
    }
    j["winner"] = winner;
    text += "           " + std::string(lemma_name(sc)) + " " +
            (verdict ? (*verdict ? "holds" : "does not hold") : "n/a (unstable)") +
            "; winner " + winner + "\n";
    edges.push_back(std::move(j));
  }
  root["edges"] = std::move(edges);

  ordered_json splits = ordered_json::array();
  for (std::size_t i = 0; i < c.split_points.size(); ++i) {
    const auto& sp = c.split_points[i];
    const auto edge = c.edge_state(0);
    const auto net = c.path(0);
    const Outcome res = evaluate([&] { return predict_split(c.dev, edge, net, sp, c.w, c.options); });
    any_unstable |= !res.latency;
    ordered_json j{{"split", i + 1},
                   {"s_dev_partial_s", sp.s_dev_partial},
                   {"s_edge_partial_s", sp.s_edge_partial},
                   {"d_inter_bits", sp.d_inter}};
    j.update(outcome_json(res));
    text += "split " + std::to_string(i + 1) + "    T_split = " + outcome_text(res) + "\n";
    splits.push_back(std::move(j));
  }
  root["splits"] = std::move(splits);

  if (options.json)
    out << root.dump(2) << '\n';
  else
    out << text;
  return any_unstable ? kExitUnstable : kExitOk;
}

}  // namespace edgeq::cli

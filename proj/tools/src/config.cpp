#include "edgeq/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "edgeq/error.hpp"

namespace edgeq::cli {

namespace {

constexpr double kMs = 1e-3;
constexpr double kMs2 = 1e-6;
constexpr double kKb = 1e3;
constexpr double kMbps = 1e6;

class Reader {
 public:
  explicit Reader(std::string name) : name_(std::move(name)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key,
                         const std::string& what) const {
    std::ostringstream os;
    os << name_;
    if (node.IsDefined() && node.Mark().line >= 0)
      os << ':' << node.Mark().line + 1 << ':' << node.Mark().column + 1;
    os << ": " << key << ": " << what;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& key) const {
    if (!node.IsMap()) fail(node, key, "expected a mapping");
  }

  void only_keys(const YAML::Node& node, const std::string& where,
                 std::initializer_list<const char*> allowed) const {
    require_map(node, where);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, join(where, key), "unknown key");
    }
  }

  double number(const YAML::Node& parent, const std::string& where, const char* key) const {
    const YAML::Node n = parent[key];
    if (!n) fail(parent, join(where, key), "missing required key");
    return as_number(n, join(where, key));
  }

  double number_or(const YAML::Node& parent, const std::string& where, const char* key,
                   double fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    return as_number(n, join(where, key));
  }

  double nonneg(const YAML::Node& parent, const std::string& where, const char* key) const {
    const double v = number(parent, where, key);
    if (v < 0.0) fail(parent[key], join(where, key), "must be >= 0");
    return v;
  }

  double positive(const YAML::Node& parent, const std::string& where, const char* key) const {
    const double v = number(parent, where, key);
    if (!(v > 0.0)) fail(parent[key], join(where, key), "must be > 0");
    return v;
  }

  double nonneg_or(const YAML::Node& parent, const std::string& where, const char* key,
                   double fallback) const {
    const double v = number_or(parent, where, key, fallback);
    if (v < 0.0) fail(parent[key], join(where, key), "must be >= 0");
    return v;
  }

  double positive_or(const YAML::Node& parent, const std::string& where, const char* key,
                     double fallback) const {
    const double v = number_or(parent, where, key, fallback);
    if (!(v > 0.0)) fail(parent[key], join(where, key), "must be > 0");
    return v;
  }

  std::string text(const YAML::Node& parent, const std::string& where, const char* key,
                   const std::string& fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    if (!n.IsScalar()) fail(n, join(where, key), "expected a string");
    return n.as<std::string>();
  }

  bool flag(const YAML::Node& parent, const std::string& where, const char* key,
            bool fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, join(where, key), "expected true or false");
    }
  }

  std::uint64_t count(const YAML::Node& parent, const std::string& where, const char* key,
                      std::uint64_t fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      const auto v = n.as<long long>();
      if (v < 0) fail(n, join(where, key), "must be >= 0");
      return static_cast<std::uint64_t>(v);
    } catch (const YAML::Exception&) {
      fail(n, join(where, key), "expected an integer");
    }
  }

  static std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }

 private:
  double as_number(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key, "expected a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, key, "must be finite");
      return v;
    } catch (const YAML::Exception&) {
      fail(n, key, "expected a number");
    }
  }

  std::string name_;
};

YAML::Node load(const std::string& text, const std::string& name) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << name << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": syntax: " << e.msg;
    throw ConfigError(os.str());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WorkloadSpec parse_workload(const Reader& r, const YAML::Node& n) {
  r.only_keys(n, "workload",
              {"service", "s_dev_ms", "s_edge_ms", "var_dev_ms2", "var_edge_ms2", "d_req_kb",
               "d_res_kb"});
  const std::string service = r.text(n, "workload", "service", "deterministic");
  const double s_dev = r.positive(n, "workload", "s_dev_ms") * kMs;
  const double s_edge = r.positive(n, "workload", "s_edge_ms") * kMs;
  const double d_req = r.nonneg_or(n, "workload", "d_req_kb", 0.0) * kKb;
  const double d_res = r.nonneg_or(n, "workload", "d_res_kb", 0.0) * kKb;
  if (service == "deterministic") {
    for (const char* key : {"var_dev_ms2", "var_edge_ms2"})
      if (n[key]) r.fail(n[key], std::string("workload.") + key, "only valid for variable service");
    return WorkloadSpec::deterministic(s_dev, s_edge, d_req, d_res);
  }
  if (service == "variable") {
    const double var_dev = r.nonneg_or(n, "workload", "var_dev_ms2", s_dev * s_dev / kMs2) * kMs2;
    const double var_edge =
        r.nonneg_or(n, "workload", "var_edge_ms2", s_edge * s_edge / kMs2) * kMs2;
    return WorkloadSpec::variable(s_dev, s_edge, d_req, d_res, var_dev, var_edge);
  }
  r.fail(n["service"], "workload.service", "expected deterministic or variable");
}

DeviceSpec parse_device(const Reader& r, const YAML::Node& n) {
  r.only_keys(n, "device", {"lambda", "k_dev"});
  DeviceSpec d;
  d.lambda_dev = r.nonneg(n, "device", "lambda");
  d.k_dev = r.positive_or(n, "device", "k_dev", 1.0);
  return d;
}

void parse_tenants(const Reader& r, const YAML::Node& n, const std::string& where,
                   std::vector<Tenant>& out) {
  if (!n) return;
  if (!n.IsSequence()) r.fail(n, where, "expected a list");
  for (std::size_t i = 0; i < n.size(); ++i) {
    const YAML::Node t = n[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    r.only_keys(t, at, {"lambda", "s_ms", "var_ms2", "count"});
    Tenant tenant;
    tenant.lambda = r.nonneg(t, at, "lambda");
    tenant.s = r.positive(t, at, "s_ms") * kMs;
    tenant.var = r.nonneg_or(t, at, "var_ms2", 0.0) * kMs2;
    const auto copies = r.count(t, at, "count", 1);
    for (std::uint64_t c = 0; c < copies; ++c) out.push_back(tenant);
  }
}

EdgeConfig parse_edge(const Reader& r, const YAML::Node& n, const std::string& where) {
  r.only_keys(n, where, {"k_edge", "bandwidth_mbps", "tenants"});
  EdgeConfig e;
  e.k_edge = r.positive_or(n, where, "k_edge", 1.0);
  e.bandwidth_b = n["bandwidth_mbps"] ? r.positive(n, where, "bandwidth_mbps") * kMbps : 0.0;
  parse_tenants(r, n["tenants"], where + ".tenants", e.tenants);
  return e;
}

// Shared by configs and scripts: workload, device, network, edge(s).
void parse_common(const Reader& r, const YAML::Node& root, Config& c) {
  if (!root["workload"]) r.fail(root, "workload", "missing required key");
  if (!root["device"]) r.fail(root, "device", "missing required key");
  if (!root["network"]) r.fail(root, "network", "missing required key");
  c.w = parse_workload(r, root["workload"]);
  c.dev = parse_device(r, root["device"]);
  r.only_keys(root["network"], "network", {"bandwidth_mbps"});
  c.bandwidth_b = r.positive(root["network"], "network", "bandwidth_mbps") * kMbps;

  if (root["edge"] && root["edges"]) r.fail(root["edges"], "edges", "give either edge or edges");
  if (const YAML::Node e = root["edge"]) {
    c.edges.push_back(parse_edge(r, e, "edge"));
  } else if (const YAML::Node es = root["edges"]) {
    if (!es.IsSequence() || es.size() == 0) r.fail(es, "edges", "expected a non-empty list");
    for (std::size_t i = 0; i < es.size(); ++i)
      c.edges.push_back(parse_edge(r, es[i], "edges[" + std::to_string(i) + "]"));
  } else {
    c.edges.push_back(EdgeConfig{});
  }
  for (auto& e : c.edges)
    if (e.bandwidth_b == 0.0) e.bandwidth_b = c.bandwidth_b;

  if (const YAML::Node o = root["options"]) {
    r.only_keys(o, "options", {"mixture_form"});
    const std::string form = r.text(o, "options", "mixture_form", "k_folded");
    if (form == "k_folded")
      c.options.mixture_form = MixtureForm::KFolded;
    else if (form == "literal")
      c.options.mixture_form = MixtureForm::Literal;
    else
      r.fail(o["mixture_form"], "options.mixture_form", "expected k_folded or literal");
  }
}

void check_model(const Reader& r, const YAML::Node& root, const Config& c) {
  try {
    c.w.validate();
    c.dev.validate();
  } catch (const Error& e) {
    r.fail(root, "workload", e.what());
  }
}

std::size_t one_based(const Reader& r, const YAML::Node& parent, const std::string& where,
                      const char* key) {
  const auto v = r.count(parent, where, key, 0);
  if (v == 0) r.fail(parent[key] ? parent[key] : parent, Reader::join(where, key),
                     "expected an index >= 1");
  return static_cast<std::size_t>(v - 1);
}

ScenarioEvent parse_event(const Reader& r, const YAML::Node& n, const std::string& where) {
  r.require_map(n, where);
  ScenarioEvent ev;
  ev.t = r.nonneg(n, where, "t");
  int kinds = 0;
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    const std::string at = Reader::join(where, key);
    const YAML::Node v = kv.second;
    if (key == "t") continue;
    ++kinds;
    if (key == "set_bandwidth_mbps") {
      ev.kind = ScenarioEvent::Kind::SetBandwidth;
      ev.value = r.positive(n, where, "set_bandwidth_mbps") * kMbps;
    } else if (key == "set_device_lambda") {
      ev.kind = ScenarioEvent::Kind::SetDeviceLambda;
      ev.value = r.nonneg(n, where, "set_device_lambda");
    } else if (key == "set_tenant_lambda") {
      r.only_keys(v, at, {"edge", "tenant", "lambda"});
      ev.kind = ScenarioEvent::Kind::SetTenantLambda;
      ev.edge = one_based(r, v, at, "edge");
      ev.tenant = one_based(r, v, at, "tenant");
      ev.value = r.nonneg(v, at, "lambda");
    } else if (key == "add_tenant") {
      r.only_keys(v, at, {"edge", "lambda", "s_ms", "var_ms2"});
      ev.kind = ScenarioEvent::Kind::AddTenant;
      ev.edge = one_based(r, v, at, "edge");
      ev.added.lambda = r.nonneg(v, at, "lambda");
      ev.added.s = r.positive(v, at, "s_ms") * kMs;
      ev.added.var = r.nonneg_or(v, at, "var_ms2", 0.0) * kMs2;
    } else if (key == "remove_tenant") {
      r.only_keys(v, at, {"edge", "tenant"});
      ev.kind = ScenarioEvent::Kind::RemoveTenant;
      ev.edge = one_based(r, v, at, "edge");
      ev.tenant = one_based(r, v, at, "tenant");
    } else {
      r.fail(kv.first, at, "unknown event");
    }
  }
  if (kinds != 1) r.fail(n, where, "expected exactly one action besides t");
  return ev;
}

Strategy parse_strategy(const Reader& r, const YAML::Node& parent, std::size_t edges) {
  const std::string s = r.text(parent, "", "initial", "device");
  if (s == "device") return Strategy::on_device();
  if (s.size() >= 2 && s[0] == 'E') {
    try {
      std::size_t used = 0;
      const long idx = std::stol(s.substr(1), &used);
      if (used + 1 == s.size() && idx >= 1 && static_cast<std::size_t>(idx) <= edges)
        return Strategy::offload(static_cast<std::size_t>(idx - 1));
    } catch (const std::exception&) {
    }
  }
  r.fail(parent["initial"], "initial", "expected device or E<n> naming a configured edge");
}

}  // namespace

EdgeServerState Config::edge_state(std::size_t e) const {
  return EdgeServerState::shared(edges.at(e).k_edge, dev, w, edges.at(e).tenants);
}

NetworkPath Config::path(std::size_t e) const { return NetworkPath{edges.at(e).bandwidth_b}; }

Config parse_config_text(const std::string& text, const std::string& name) {
  const Reader r(name);
  const YAML::Node root = load(text, name);
  r.only_keys(root, "", {"workload", "device", "network", "edge", "edges", "split_points",
                         "options"});
  Config c;
  parse_common(r, root, c);
  if (const YAML::Node sps = root["split_points"]) {
    if (!sps.IsSequence()) r.fail(sps, "split_points", "expected a list");
    for (std::size_t i = 0; i < sps.size(); ++i) {
      const std::string at = "split_points[" + std::to_string(i) + "]";
      r.only_keys(sps[i], at, {"s_dev_ms", "s_edge_ms", "d_inter_kb"});
      SplitPoint sp;
      sp.s_dev_partial = r.nonneg(sps[i], at, "s_dev_ms") * kMs;
      sp.s_edge_partial = r.nonneg(sps[i], at, "s_edge_ms") * kMs;
      sp.d_inter = r.nonneg(sps[i], at, "d_inter_kb") * kKb;
      c.split_points.push_back(sp);
    }
  }
  check_model(r, root, c);
  return c;
}

Config parse_config(const std::string& path) { return parse_config_text(slurp(path), path); }

ScriptFile parse_script_text(const std::string& text, const std::string& name) {
  const Reader r(name);
  const YAML::Node root = load(text, name);
  r.only_keys(root, "", {"workload", "device", "network", "edge", "edges", "options",
                         "horizon_s", "seed", "epoch_s", "initial", "events", "manager"});
  Config c;
  parse_common(r, root, c);
  check_model(r, root, c);

  ScriptFile f;
  auto& s = f.script;
  s.dev = c.dev;
  s.w = c.w;
  s.bandwidth_b = c.bandwidth_b;
  for (const auto& e : c.edges) {
    if (e.bandwidth_b != c.bandwidth_b)
      r.fail(root, "edges", "per-edge bandwidth is not supported in scripts");
    s.edges.push_back(EdgeSetup{e.k_edge, e.tenants});
  }
  s.horizon = r.positive(root, "", "horizon_s");
  s.seed = r.count(root, "", "seed", 1);
  s.epoch_length = r.positive_or(root, "", "epoch_s", 1.0);
  s.initial = parse_strategy(r, root, s.edges.size());

  if (const YAML::Node evs = root["events"]) {
    if (!evs.IsSequence()) r.fail(evs, "events", "expected a list");
    for (std::size_t i = 0; i < evs.size(); ++i)
      s.events.push_back(parse_event(r, evs[i], "events[" + std::to_string(i) + "]"));
  }

  auto& m = f.manager;
  m.decision.mixture_form = c.options.mixture_form;
  if (const YAML::Node mg = root["manager"]) {
    r.only_keys(mg, "manager", {"window_s", "self_load", "bandwidth_noise", "switch_penalty_ms",
                                "estimator", "preroll_s"});
    m.estimator.window = r.positive_or(mg, "manager", "window_s", m.estimator.window);
    m.estimator.bandwidth_noise = r.nonneg_or(mg, "manager", "bandwidth_noise", 0.0);
    m.decision.self_load = r.flag(mg, "manager", "self_load", true);
    m.decision.switch_penalty = r.nonneg_or(mg, "manager", "switch_penalty_ms", 0.0) * kMs;
    m.run.preroll = r.nonneg_or(mg, "manager", "preroll_s", m.run.preroll);
    const std::string est = r.text(mg, "manager", "estimator", "measured");
    if (est == "measured")
      m.estimator.mode = EstimatorConfig::Mode::Measured;
    else if (est == "oracle")
      m.estimator.mode = EstimatorConfig::Mode::Oracle;
    else
      r.fail(mg["estimator"], "manager.estimator", "expected measured or oracle");
  }

  try {
    s.validate();
  } catch (const Error& e) {
    r.fail(root["events"] ? root["events"] : root, "events", e.what());
  }
  return f;
}

ScriptFile parse_script(const std::string& path) { return parse_script_text(slurp(path), path); }

}  // namespace edgeq::cli

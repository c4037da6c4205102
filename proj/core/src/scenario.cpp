#include "edgeq/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "edgeq/error.hpp"
#include "network.hpp"

namespace edgeq {

using detail::Hop;
using detail::Network;
using detail::Route;
using detail::SourceSpec;
using detail::StationSpec;

std::string to_string(const Strategy& s) {
  if (s.kind == Strategy::Kind::OnDevice) return "device";
  return "E" + std::to_string(s.edge + 1);
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedScript, what);
}

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void ScenarioScript::validate() const {
  try {
    dev.validate();
    w.validate();
  } catch (const Error& e) {
    malformed(e.what());
  }
  if (!(bandwidth_b > 0.0) || !std::isfinite(bandwidth_b)) malformed("bandwidth must be positive");
  if (!(epoch_length > 0.0)) malformed("epoch length must be positive");
  if (initial.kind == Strategy::Kind::Offload && initial.edge >= edges.size())
    malformed("initial strategy names a missing edge");

  std::vector<std::size_t> counts;
  for (const auto& e : edges) {
    if (!(e.k_edge > 0.0)) malformed("k_edge must be positive");
    for (const auto& t : e.tenants)
      if (!nonneg(t.lambda) || !(t.s > 0.0) || !nonneg(t.var)) malformed("invalid tenant");
    counts.push_back(e.tenants.size());
  }

  double last = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    const std::string where = "event " + std::to_string(i) + ": ";
    if (!nonneg(ev.t)) malformed(where + "negative time");
    if (ev.t < last) malformed(where + "events are not sorted by time");
    last = ev.t;
    switch (ev.kind) {
      case ScenarioEvent::Kind::SetBandwidth:
        if (!(ev.value > 0.0) || !std::isfinite(ev.value)) malformed(where + "bandwidth must be positive");
        break;
      case ScenarioEvent::Kind::SetDeviceLambda:
        if (!nonneg(ev.value)) malformed(where + "negative rate");
        break;
      case ScenarioEvent::Kind::SetTenantLambda:
        if (!nonneg(ev.value)) malformed(where + "negative rate");
        if (ev.edge >= counts.size() || ev.tenant >= counts[ev.edge]) malformed(where + "no such tenant");
        break;
      case ScenarioEvent::Kind::AddTenant:
        if (ev.edge >= counts.size()) malformed(where + "no such edge");
        if (!nonneg(ev.added.lambda) || !(ev.added.s > 0.0) || !nonneg(ev.added.var))
          malformed(where + "invalid tenant");
        ++counts[ev.edge];
        break;
      case ScenarioEvent::Kind::RemoveTenant:
        if (ev.edge >= counts.size() || ev.tenant >= counts[ev.edge]) malformed(where + "no such tenant");
        --counts[ev.edge];
        break;
    }
  }
  if (!(horizon > last) || !std::isfinite(horizon)) malformed("horizon must extend past the last event");
}

namespace {

struct EdgeStations {
  int request_nic = -1;
  int processor = -1;
  int response_nic = -1;
};

class ScenarioRun {
 public:
  ScenarioRun(const ScenarioScript& script, const PolicyHook& hook, double horizon,
              const ScenarioRunOptions& options)
      : script_(script),
        hook_(hook),
        options_(options),
        horizon_(horizon),
        offset_(options.preroll),
        net_(script.seed, options.queue_bound) {
    truth_.lambda_dev = script.dev.lambda_dev;
    truth_.bandwidth_b = script.bandwidth_b;
    truth_.edges = script.edges;
    log_.edges.resize(script.edges.size());
    current_ = script.initial;
    build();
  }

  Timeline run() {
    const double length = script_.epoch_length;
    const auto n_epochs = static_cast<std::size_t>(std::ceil(horizon_ / length - 1e-12));
    sums_.assign(n_epochs, 0.0);
    counts_.assign(n_epochs, 0);

    for (const auto& ev : script_.events) net_.at(offset_ + ev.t, [this, &ev] { apply(ev); });
    for (std::size_t k = 0; k < n_epochs; ++k)
      net_.at(offset_ + k * length, [this, k] { epoch(k); });
    net_.at(offset_ + horizon_, [this] { stop_arrivals(); });

    net_.start();
    net_.run(nullptr);

    Timeline tl;
    tl.edge_count = script_.edges.size();
    tl.entries = std::move(entries_);
    for (std::size_t k = 0; k < tl.entries.size() && k < n_epochs; ++k) {
      tl.entries[k].observed_count = counts_[k];
      tl.entries[k].observed_mean = counts_[k] ? sums_[k] / static_cast<double>(counts_[k]) : kNaN;
    }
    tl.arrivals = net_.arrivals();
    tl.completions = net_.completions();
    tl.in_flight = net_.in_flight();
    return tl;
  }

 private:
  static std::string suffix(std::size_t e) { return "_E" + std::to_string(e + 1); }

  void build() {
    const auto& w = script_.w;
    StationSpec dev;
    dev.name = "device";
    dev.divisor = script_.dev.k_dev;
    device_station_ = net_.add_station(dev);

    for (std::size_t e = 0; e < script_.edges.size(); ++e) {
      EdgeStations st;
      if (w.d_req > 0.0) {
        StationSpec s;
        s.name = "request_nic" + suffix(e);
        s.nic = true;
        s.bandwidth = script_.bandwidth_b;
        st.request_nic = net_.add_station(s);
      }
      StationSpec p;
      p.name = "edge" + suffix(e);
      p.divisor = script_.edges[e].k_edge;
      st.processor = net_.add_station(p);
      if (w.d_res > 0.0) {
        StationSpec s;
        s.name = "response_nic" + suffix(e);
        s.nic = true;
        s.bandwidth = script_.bandwidth_b;
        st.response_nic = net_.add_station(s);
      }
      edge_stations_.push_back(st);
    }

    const Sampler nic_shape =
        options_.fixed_time_nic ? Sampler::deterministic() : Sampler::exponential();
    SourceSpec device;
    device.tagged = true;
    device.rate = script_.dev.lambda_dev;
    const bool variable = w.kind == WorkloadKind::Variable;
    device.routes.push_back(Route{Hop{device_station_,
                                      variable ? Sampler::for_moments(w.s_dev, w.variance_dev)
                                               : Sampler::deterministic(),
                                      w.s_dev}});
    for (const auto& st : edge_stations_) {
      Route r;
      if (st.request_nic >= 0) r.push_back(Hop{st.request_nic, nic_shape, w.d_req});
      r.push_back(Hop{st.processor,
                      variable ? Sampler::for_moments(w.s_edge, w.variance_edge)
                               : Sampler::deterministic(),
                      w.s_edge});
      if (st.response_nic >= 0) r.push_back(Hop{st.response_nic, nic_shape, w.d_res});
      device.routes.push_back(std::move(r));
    }
    device.route = route_of(current_);
    device_source_ = net_.add_source(std::move(device));

    tenant_sources_.resize(script_.edges.size());
    for (std::size_t e = 0; e < script_.edges.size(); ++e)
      for (const auto& t : script_.edges[e].tenants) add_tenant_source(e, t);

    net_.record_waits = false;
    net_.on_source_arrival = [this](int source, double t) {
      if (source == device_source_) log_.device_arrivals.push_back(t - offset_);
    };
    net_.on_station_arrival = [this](int station, const detail::Job& job, double t) {
      const int e = edge_of(station);
      if (e < 0) return;
      log_.edges[e].arrivals.push_back(t - offset_);
      if (job.source == device_source_) log_.edges[e].own_arrivals.push_back(t - offset_);
    };
    net_.on_service_done = [this](int station, const detail::Job& job, double demand, double t) {
      const int e = edge_of(station);
      if (e < 0 || job.source == device_source_) return;
      log_.edges[e].completions.emplace_back(t - offset_, demand);
    };
    net_.on_complete = [this](const detail::Job& job, double) {
      if (job.source != device_source_) return;
      const double arrival = job.t_arrival - offset_;
      if (arrival < 0.0) return;
      const auto k = static_cast<std::size_t>(arrival / script_.epoch_length);
      if (k >= sums_.size()) return;
      sums_[k] += net_.now() - job.t_arrival;
      ++counts_[k];
    };
  }

  int route_of(const Strategy& s) const {
    return s.kind == Strategy::Kind::OnDevice ? 0 : 1 + static_cast<int>(s.edge);
  }

  int edge_of(int station) const {
    for (std::size_t e = 0; e < edge_stations_.size(); ++e)
      if (edge_stations_[e].processor == station) return static_cast<int>(e);
    return -1;
  }

  void add_tenant_source(std::size_t e, const Tenant& t) {
    const auto& st = edge_stations_[e];
    SourceSpec src;
    src.tenant = static_cast<int>(tenant_sources_[e].size()) + 1;
    src.rate = t.lambda;
    Route r{Hop{st.processor, Sampler::for_moments(t.s, t.var), t.s}};
    const Sampler nic_shape =
        options_.fixed_time_nic ? Sampler::deterministic() : Sampler::exponential();
    if (st.response_nic >= 0) r.push_back(Hop{st.response_nic, nic_shape, script_.w.d_res});
    src.routes = {std::move(r)};
    tenant_sources_[e].push_back(net_.add_source(std::move(src)));
  }

  void apply(const ScenarioEvent& ev) {
    if (stopped_) return;
    switch (ev.kind) {
      case ScenarioEvent::Kind::SetBandwidth:
        truth_.bandwidth_b = ev.value;
        for (const auto& st : edge_stations_) {
          if (st.request_nic >= 0) net_.set_bandwidth(st.request_nic, ev.value);
          if (st.response_nic >= 0) net_.set_bandwidth(st.response_nic, ev.value);
        }
        break;
      case ScenarioEvent::Kind::SetDeviceLambda:
        truth_.lambda_dev = ev.value;
        net_.set_rate(device_source_, ev.value);
        break;
      case ScenarioEvent::Kind::SetTenantLambda:
        truth_.edges[ev.edge].tenants[ev.tenant].lambda = ev.value;
        net_.set_rate(tenant_sources_[ev.edge][ev.tenant], ev.value);
        break;
      case ScenarioEvent::Kind::AddTenant:
        truth_.edges[ev.edge].tenants.push_back(ev.added);
        add_tenant_source(ev.edge, ev.added);
        break;
      case ScenarioEvent::Kind::RemoveTenant: {
        auto& tenants = truth_.edges[ev.edge].tenants;
        tenants.erase(tenants.begin() + static_cast<std::ptrdiff_t>(ev.tenant));
        auto& sources = tenant_sources_[ev.edge];
        net_.set_rate(sources[ev.tenant], 0.0);
        sources.erase(sources.begin() + static_cast<std::ptrdiff_t>(ev.tenant));
        break;
      }
    }
  }

  void prune(double now) {
    const double cutoff = now - options_.retention;
    const auto drop = [cutoff](std::deque<double>& d) {
      while (!d.empty() && d.front() < cutoff) d.pop_front();
    };
    drop(log_.device_arrivals);
    for (auto& e : log_.edges) {
      drop(e.arrivals);
      drop(e.own_arrivals);
      while (!e.completions.empty() && e.completions.front().first < cutoff) e.completions.pop_front();
    }
  }

  void epoch(std::size_t k) {
    const double now = static_cast<double>(k) * script_.epoch_length;
    prune(now);
    TimelineEntry entry;
    entry.epoch = now;
    entry.predicted_device = kNaN;
    if (hook_) {
      const EpochContext ctx{now, script_.epoch_length, current_, log_, truth_, script_};
      PolicyDecision d = hook_(ctx);
      if (d.strategy.kind == Strategy::Kind::Offload && d.strategy.edge >= edge_stations_.size())
        throw Error(ErrorCode::InvalidArgument, "policy chose a missing edge");
      current_ = d.strategy;
      net_.set_route(device_source_, route_of(current_));
      entry.predicted_device = d.predicted_device;
      entry.predicted_edges = std::move(d.predicted_edges);
    }
    entry.strategy = current_;
    entries_.push_back(std::move(entry));
  }

  void stop_arrivals() {
    stopped_ = true;
    net_.set_rate(device_source_, 0.0);
    for (const auto& edge : tenant_sources_)
      for (int s : edge) net_.set_rate(s, 0.0);
  }

  const ScenarioScript& script_;
  const PolicyHook& hook_;
  ScenarioRunOptions options_;
  double horizon_;
  double offset_;
  Network net_;
  TrueState truth_;
  MeasurementLog log_;
  Strategy current_;
  bool stopped_ = false;
  int device_station_ = -1;
  int device_source_ = -1;
  std::vector<EdgeStations> edge_stations_;
  std::vector<std::vector<int>> tenant_sources_;
  std::vector<TimelineEntry> entries_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

Timeline run_scenario_script(const ScenarioScript& script, const PolicyHook& hook,
                             double min_horizon, const ScenarioRunOptions& options) {
  script.validate();
  if (!(options.preroll >= 0.0)) throw Error(ErrorCode::InvalidArgument, "preroll must be >= 0");
  ScenarioRun run(script, hook, std::max(script.horizon, min_horizon), options);
  return run.run();
}

void write_timeline_csv(std::ostream& out, const Timeline& timeline) {
  out << "epoch_s,strategy,observed_ms,pred_device_ms";
  for (std::size_t e = 0; e < timeline.edge_count; ++e) out << ",pred_edge_E" << e + 1 << "_ms";
  out << '\n';
  char buf[64];
  const auto num = [&](double v) -> const char* {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return "inf";
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
  };
  for (const auto& e : timeline.entries) {
    out << num(e.epoch) << ',' << to_string(e.strategy) << ',';
    out << num(e.observed_mean * 1e3) << ',' << num(e.predicted_device * 1e3);
    for (std::size_t i = 0; i < timeline.edge_count; ++i)
      out << ',' << (i < e.predicted_edges.size() ? num(e.predicted_edges[i] * 1e3) : "");
    out << '\n';
  }
}

}  // namespace edgeq

#include "edgeq/des_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "edgeq/error.hpp"
#include "edgeq/stats.hpp"
#include "network.hpp"

namespace edgeq {

using detail::Hop;
using detail::Network;
using detail::Route;
using detail::SourceSpec;
using detail::StationSpec;

ArrivalProcess ArrivalProcess::poisson(double rate, std::uint64_t seed) {
  ArrivalProcess a;
  a.kind = Kind::Poisson;
  a.rate = rate;
  a.mean_a = rate > 0.0 ? 1.0 / rate : 0.0;
  a.variance_a2 = a.mean_a * a.mean_a;
  a.seed = seed;
  return a;
}

ArrivalProcess ArrivalProcess::renewal(SampleFamily family, double mean_a, double variance_a2,
                                       std::uint64_t seed) {
  ArrivalProcess a;
  a.kind = Kind::Renewal;
  a.family = family;
  a.mean_a = mean_a;
  a.variance_a2 = variance_a2;
  a.rate = 1.0 / mean_a;
  a.seed = seed;
  return a;
}

double StationReport::little_error() const {
  const double lw = arrival_rate * mean_sojourn;
  if (lw <= 0.0) return 0.0;
  return std::abs(mean_in_station - lw) / lw;
}

const StationReport* SimReport::station(const std::string& name) const {
  for (const auto& s : stations)
    if (s.name == name) return &s;
  return nullptr;
}

double SimReport::max_little_error() const {
  double worst = 0.0;
  for (const auto& s : stations) worst = std::max(worst, s.little_error());
  return worst;
}

namespace {

void require_stable(const char* station, double rho) {
  if (rho >= 1.0 - kStabilityMargin) throw UnstableError(station, rho);
}

StationSpec processor(const char* name, double k, const SimOptions& opt) {
  StationSpec s;
  s.name = name;
  if (opt.server_mode == ServerMode::AggregatedRate) {
    s.aggregated = true;
    s.divisor = k;
  } else {
    s.aggregated = false;
    s.servers = std::max(1, static_cast<int>(std::lround(k)));
  }
  return s;
}

StationSpec nic(const char* name, double bandwidth) {
  StationSpec s;
  s.name = name;
  s.nic = true;
  s.bandwidth = bandwidth;
  return s;
}

Sampler nic_shape(const SimOptions& opt) {
  return opt.fixed_time_nic ? Sampler::deterministic() : Sampler::exponential();
}

Sampler processor_shape(WorkloadKind kind, double mean, double variance, const SimOptions& opt) {
  if (kind == WorkloadKind::Deterministic) return Sampler::deterministic();
  return Sampler::for_moments(mean, variance, opt.general_family);
}

// Runs until `min_completions` tagged completions have been measured after
// the warm-up, then assembles the report.
SimReport run_measured(Network& net, std::uint64_t min_completions, const SimOptions& opt) {
  min_completions = std::max<std::uint64_t>(min_completions, 1);
  const auto warmup = static_cast<std::uint64_t>(
      std::ceil(opt.warmup_fraction * static_cast<double>(min_completions)));

  std::vector<std::string> names;
  for (std::size_t s = 0; s < net.station_count(); ++s)
    names.push_back(net.station_spec(static_cast<int>(s)).name);
  int record_station = -1;
  for (std::size_t s = 0; s < names.size(); ++s)
    if (!opt.record_arrivals_at.empty() && names[s] == opt.record_arrivals_at)
      record_station = static_cast<int>(s);

  SimReport report;
  std::vector<double> latencies;
  latencies.reserve(min_completions);
  std::uint64_t tagged_done = 0;
  bool measuring = warmup == 0;
  net.start();
  if (measuring) net.reset_stats();

  net.on_complete = [&](const detail::Job& job, double t) {
    const SourceSpec& src = net.source_spec(job.source);
    if (opt.record_trace && report.trace.size() < opt.trace_limit) {
      TraceRecord rec;
      rec.request_id = job.id;
      rec.tenant_id = src.tenant;
      rec.arrival_s = job.t_arrival;
      rec.departure_s = t;
      rec.waits.assign(names.size(), std::nullopt);
      const Route& route = src.routes[job.route];
      for (std::size_t h = 0; h < route.size(); ++h) {
        if (h) rec.path += '>';
        rec.path += names[route[h].station];
        rec.waits[route[h].station] = job.wait[h];
      }
      report.trace.push_back(std::move(rec));
    }
    if (!src.tagged) return;
    ++tagged_done;
    if (measuring) {
      latencies.push_back(t - job.t_arrival);
    } else if (tagged_done >= warmup) {
      measuring = true;
      net.reset_stats();
    }
  };
  if (record_station >= 0) {
    net.on_station_arrival = [&](int station, const detail::Job&, double t) {
      if (station == record_station && measuring &&
          report.recorded_arrivals.size() < opt.arrival_record_limit)
        report.recorded_arrivals.push_back(t);
    };
  }

  net.run([&] { return latencies.size() >= min_completions; });
  net.settle();
  net.on_complete = nullptr;
  net.on_station_arrival = nullptr;

  const BatchStats lat = batch_means(latencies, opt.batches);
  report.completions = latencies.size();
  report.mean_latency = lat.mean;
  report.latency_stddev = lat.stddev;
  report.latency_stderr = lat.stderr_mean;
  report.ci95_halfwidth = lat.ci95;
  report.measured_time = net.now() - net.window_start();
  report.arrivals = net.arrivals();
  report.departures = net.completions();
  report.in_flight = net.in_flight();

  const double window = report.measured_time;
  for (std::size_t s = 0; s < names.size(); ++s) {
    const auto& st = net.stats(static_cast<int>(s));
    const auto& spec = net.station_spec(static_cast<int>(s));
    const BatchStats w = batch_means(st.waits, opt.batches);
    StationReport r;
    r.name = names[s];
    r.samples = st.departures;
    r.mean_wait = w.mean;
    r.wait_stderr = w.stderr_mean;
    r.wait_ci95 = w.ci95;
    r.mean_sojourn = st.departures ? st.sum_sojourn / static_cast<double>(st.departures) : 0.0;
    if (window > 0.0) {
      const int servers = spec.aggregated ? 1 : spec.servers;
      r.mean_in_station = st.area_jobs / window;
      r.arrival_rate = static_cast<double>(st.arrivals) / window;
      r.utilization = st.area_busy / (window * servers);
    }
    report.mean_wait_per_station.push_back(r.mean_wait);
    report.stations.push_back(std::move(r));
  }
  return report;
}

}  // namespace

SimReport simulate_station(const ArrivalProcess& arrivals, const StationConfig& station,
                           std::uint64_t min_completions, const SimOptions& options) {
  station.service.validate();
  if (!(station.k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  const double rate = arrivals.arrival_rate();
  require_stable("station", rate * station.service.mean_s / station.k);

  SimOptions opt = options;
  opt.server_mode = station.server_mode;
  opt.general_family = station.general_family;
  const Sampler shape = Sampler::for_service(station.service, station.general_family);

  if (arrivals.kind == ArrivalProcess::Kind::Poisson && arrivals.rate == 0.0) {
    // One isolated request: it finds the station empty.
    Rng rng(arrivals.seed, 1);
    const double demand = shape.draw(rng, station.service.mean_s);
    SimReport r;
    r.completions = 1;
    r.mean_latency = demand;
    r.arrivals = r.departures = 1;
    StationReport s;
    s.name = "station";
    s.samples = 1;
    r.stations.push_back(s);
    r.mean_wait_per_station.push_back(0.0);
    return r;
  }

  Network net(arrivals.seed, opt.queue_bound);
  const int st = net.add_station(processor("station", station.k, opt));
  SourceSpec src;
  src.tagged = true;
  if (arrivals.kind == ArrivalProcess::Kind::Poisson) {
    src.rate = arrivals.rate;
  } else {
    if (!(arrivals.mean_a > 0.0) || arrivals.variance_a2 < 0.0)
      throw Error(ErrorCode::InvalidArgument, "invalid renewal interarrival moments");
    src.renewal = true;
    const double scv = arrivals.variance_a2 / (arrivals.mean_a * arrivals.mean_a);
    src.interarrival = Sampler(arrivals.family, scv);
    src.interarrival_mean = arrivals.mean_a;
  }
  src.routes = {Route{Hop{st, shape, station.service.mean_s}}};
  net.add_source(std::move(src));
  return run_measured(net, min_completions, opt);
}

SimReport simulate_on_device(const DeviceSpec& dev, const WorkloadSpec& w,
                             std::uint64_t min_completions, const SimOptions& options) {
  dev.validate();
  w.validate();
  StationConfig cfg;
  cfg.service = w.device_service();
  cfg.server_mode = options.server_mode;
  cfg.k = dev.k_dev;
  cfg.general_family = options.general_family;
  SimReport r = simulate_station(ArrivalProcess::poisson(dev.lambda_dev, options.seed), cfg,
                                 min_completions, options);
  for (auto& s : r.stations) s.name = kSimDevice;
  for (auto& t : r.trace) t.path = kSimDevice;
  return r;
}

namespace {

// Background tenants: Poisson at the edge processor, then the response NIC.
void add_background(Network& net, const EdgeServerState& edge, int edge_station, int response_nic,
                    double d_res, const SimOptions& opt) {
  for (std::size_t i = 1; i < edge.tenants.size(); ++i) {
    const Tenant& t = edge.tenants[i];
    if (t.lambda == 0.0) continue;
    SourceSpec src;
    src.tenant = static_cast<int>(i);
    src.rate = t.lambda;
    Route route{Hop{edge_station, Sampler::for_moments(t.s, t.var, opt.general_family), t.s}};
    if (response_nic >= 0) route.push_back(Hop{response_nic, nic_shape(opt), d_res});
    src.routes = {std::move(route)};
    net.add_source(std::move(src));
  }
}

double background_load(const EdgeServerState& edge) {
  double load = 0.0;
  for (std::size_t i = 1; i < edge.tenants.size(); ++i)
    load += edge.tenants[i].lambda * edge.tenants[i].s;
  return load;
}

double background_rate(const EdgeServerState& edge) {
  double rate = 0.0;
  for (std::size_t i = 1; i < edge.tenants.size(); ++i) rate += edge.tenants[i].lambda;
  return rate;
}

void require_device_rate(const DeviceSpec& dev) {
  if (!(dev.lambda_dev > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tandem simulation needs a positive device rate");
}

}  // namespace

SimReport simulate_edge_offload(const DeviceSpec& dev, const EdgeServerState& edge,
                                const NetworkPath& net_path, const WorkloadSpec& w,
                                std::uint64_t min_completions, const SimOptions& options) {
  SplitPoint sp;
  sp.s_dev_partial = 0.0;
  sp.s_edge_partial = w.s_edge;
  sp.d_inter = w.d_req;
  return simulate_split(dev, edge, net_path, sp, w, min_completions, options);
}

SimReport simulate_split(const DeviceSpec& dev, const EdgeServerState& edge,
                         const NetworkPath& net_path, const SplitPoint& sp, const WorkloadSpec& w,
                         std::uint64_t min_completions, const SimOptions& options) {
  dev.validate();
  edge.validate();
  net_path.validate();
  sp.validate();
  w.validate();
  require_device_rate(dev);

  const bool local = split_is_local(sp);
  const double bg_rate = background_rate(edge);
  const bool uses_edge = !local && sp.s_edge_partial > 0.0;
  const bool edge_present = uses_edge || bg_rate > 0.0;
  const double total_res_rate = (local ? 0.0 : dev.lambda_dev) + bg_rate;

  const double b = net_path.bandwidth_b;
  if (sp.s_dev_partial > 0.0) require_stable(kSimDevice, dev.lambda_dev * sp.s_dev_partial / dev.k_dev);
  if (!local && sp.d_inter > 0.0) require_stable(kSimRequestNic, dev.lambda_dev * sp.d_inter / b);
  if (edge_present)
    require_stable(kSimEdge,
                   ((uses_edge ? dev.lambda_dev * sp.s_edge_partial : 0.0) + background_load(edge)) /
                       edge.k_edge);
  if (w.d_res > 0.0 && total_res_rate > 0.0)
    require_stable(kSimResponseNic, total_res_rate * w.d_res / b);

  Network net(options.seed, options.queue_bound);
  const int device = sp.s_dev_partial > 0.0 ? net.add_station(processor(kSimDevice, dev.k_dev, options)) : -1;
  const int req_nic = !local && sp.d_inter > 0.0 ? net.add_station(nic(kSimRequestNic, b)) : -1;
  const int edge_st = edge_present ? net.add_station(processor(kSimEdge, edge.k_edge, options)) : -1;
  const int res_nic =
      w.d_res > 0.0 && total_res_rate > 0.0 ? net.add_station(nic(kSimResponseNic, b)) : -1;

  Route route;
  // Partial work keeps the workload's coefficient of variation.
  const double var_dev = w.variance_dev * (sp.s_dev_partial / w.s_dev) * (sp.s_dev_partial / w.s_dev);
  const double var_edge =
      w.variance_edge * (sp.s_edge_partial / w.s_edge) * (sp.s_edge_partial / w.s_edge);
  if (device >= 0)
    route.push_back(Hop{device, processor_shape(w.kind, sp.s_dev_partial, var_dev, options),
                        sp.s_dev_partial});
  if (req_nic >= 0) route.push_back(Hop{req_nic, nic_shape(options), sp.d_inter});
  if (uses_edge)
    route.push_back(Hop{edge_st, processor_shape(w.kind, sp.s_edge_partial, var_edge, options),
                        sp.s_edge_partial});
  if (!local && res_nic >= 0) route.push_back(Hop{res_nic, nic_shape(options), w.d_res});

  SourceSpec src;
  src.tagged = true;
  src.rate = dev.lambda_dev;
  src.routes = {std::move(route)};
  net.add_source(std::move(src));
  // Background responses carry the same result payload.
  if (edge_st >= 0) add_background(net, edge, edge_st, res_nic, w.d_res, options);
  return run_measured(net, min_completions, options);
}

void write_trace_csv(std::ostream& out, const SimReport& report) {
  out << "request_id,tenant_id,arrival_s,departure_s,path";
  for (const auto& s : report.stations) out << ",wait_" << s.name << "_s";
  out << '\n';
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
  };
  for (const auto& r : report.trace) {
    out << r.request_id << ',' << r.tenant_id << ',' << num(r.arrival_s) << ','
        << num(r.departure_s) << ',' << r.path;
    for (const auto& w : r.waits) {
      out << ',';
      if (w) out << num(*w);
    }
    out << '\n';
  }
}

}  // namespace edgeq

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "edgeq/cli/commands.hpp"
#include "edgeq/des_sim.hpp"
#include "edgeq/error.hpp"
#include "format.hpp"

namespace edgeq::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// File units to the library's canonical units.
double to_model(SweepParam p, double v) {
  switch (p) {
    case SweepParam::Bandwidth: return v * 1e6;
    case SweepParam::SDev: return v * 1e-3;
    case SweepParam::Lambda:
    case SweepParam::TenantCount: return v;
  }
  return v;
}

double from_model(SweepParam p, double v) {
  switch (p) {
    case SweepParam::Bandwidth: return v / 1e6;
    case SweepParam::SDev: return v * 1e3;
    case SweepParam::Lambda:
    case SweepParam::TenantCount: return v;
  }
  return v;
}

struct Row {
  double value = 0.0;
  bool grid = false;
  std::string crossing;
};

template <class F>
double or_inf(F&& f) {
  try {
    return f();
  } catch (const UnstableError&) {
    return kInf;
  }
}

}  // namespace

std::optional<SweepParam> parse_sweep_param(const std::string& name) {
  for (auto p : {SweepParam::Bandwidth, SweepParam::Lambda, SweepParam::TenantCount,
                 SweepParam::SDev})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

int cmd_sweep(const Config& c, const SweepOptions& o, std::ostream& out) {
  if (o.edge >= c.edges.size()) throw Error(ErrorCode::InvalidArgument, "no such edge");
  if (!(o.lo <= o.hi)) throw Error(ErrorCode::InvalidArgument, "range must satisfy lo <= hi");
  if (o.points < 1) throw Error(ErrorCode::InvalidArgument, "points must be >= 1");

  Scenario base{c.dev, c.edge_state(o.edge), c.path(o.edge), c.w, c.options};
  // Tenant sweeps replicate the device's own stream.
  if (o.param == SweepParam::TenantCount) base.edge.tenants.resize(1);

  const double lo = to_model(o.param, o.lo);
  const double hi = to_model(o.param, o.hi);

  std::vector<double> grid;
  if (o.param == SweepParam::TenantCount) {
    for (double m = std::max(1.0, std::ceil(lo)); m <= std::floor(hi); m += 1.0) grid.push_back(m);
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "tenant range holds no integer >= 1");
  } else if (o.points == 1 || lo == hi) {
    grid.push_back(lo);
  } else {
    for (int i = 0; i < o.points; ++i)
      grid.push_back(i + 1 == o.points ? hi : lo + (hi - lo) * i / (o.points - 1));
  }

  const auto crossings = find_crossovers(base, o.param, Interval{lo, hi},
                                         std::max<int>(o.points, 2) * 4);

  std::map<double, Row> rows;
  for (double v : grid) rows[v] = Row{v, true, ""};
  for (const auto& x : crossings.crossings) {
    auto& row = rows[x.value];
    row.value = x.value;
    row.crossing = to_string(x.direction);
  }

  out << "param_value,pred_device_ms,pred_edge_ms";
  if (o.simulate) out << ",sim_device_ms,sim_edge_ms,ci_ms";
  out << ",crossing\n";

  SimOptions sim;
  sim.seed = o.seed;
  for (const auto& [v, row] : rows) {
    const Scenario sc = apply_param(base, o.param, v);
    const double t_dev = or_inf([&] { return predict_on_device(sc.dev, sc.w); });
    const double t_edge =
        or_inf([&] { return predict_edge_offload(sc.dev, sc.edge, sc.net, sc.w, sc.options); });
    out << num(from_model(o.param, v)) << ',' << num(t_dev * 1e3) << ',' << num(t_edge * 1e3);
    if (o.simulate) {
      if (row.grid) {
        double ci = 0.0;
        const double s_dev = std::isinf(t_dev) ? kInf : or_inf([&] {
          const auto r = simulate_on_device(sc.dev, sc.w, o.min_completions, sim);
          ci = std::max(ci, r.ci95_halfwidth);
          return r.mean_latency;
        });
        const double s_edge = std::isinf(t_edge) ? kInf : or_inf([&] {
          const auto r = simulate_edge_offload(sc.dev, sc.edge, sc.net, sc.w, o.min_completions, sim);
          ci = std::max(ci, r.ci95_halfwidth);
          return r.mean_latency;
        });
        out << ',' << num(s_dev * 1e3) << ',' << num(s_edge * 1e3) << ',' << num(ci * 1e3);
      } else {
        out << ",,,";
      }
    }
    out << ',' << row.crossing << '\n';
  }
  return kExitOk;
}

}  // namespace edgeq::cli

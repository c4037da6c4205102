#include <algorithm>
#include <cmath>
#include <vector>

#include "edgeq/cli/commands.hpp"
#include "edgeq/des_sim.hpp"
#include "edgeq/error.hpp"
#include "format.hpp"

namespace edgeq::cli {

namespace {

constexpr double kMeanService = 0.1;
constexpr double kGeneralScv = 0.5;

const char* kind_name(ServiceKind k) {
  switch (k) {
    case ServiceKind::Deterministic: return "deterministic";
    case ServiceKind::Exponential: return "exponential";
    case ServiceKind::General: return "general";
  }
  return "?";
}

ServiceDistribution service_of(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::Deterministic: return ServiceDistribution::deterministic(kMeanService);
    case ServiceKind::Exponential: return ServiceDistribution::exponential(kMeanService);
    case ServiceKind::General: break;
  }
  return ServiceDistribution::general(kMeanService, kGeneralScv * kMeanService * kMeanService);
}

double exact_wait(const QueueSpec& q) {
  switch (q.service.kind) {
    case ServiceKind::Deterministic: return wait_md1(q);
    case ServiceKind::Exponential: return wait_mm1(q);
    case ServiceKind::General: break;
  }
  return wait_mg1(q);
}

struct Cell {
  QueueSpec q;
  SimReport report;
};

std::vector<Cell> run_matrix(const ValidateOptions& o) {
  std::vector<Cell> cells;
  for (ServiceKind kind : {ServiceKind::Deterministic, ServiceKind::Exponential, ServiceKind::General})
    for (double k : {1.0, 2.0, 4.0})
      for (double rho : {0.2, 0.5, 0.8}) {
        const QueueSpec q{rho * k / kMeanService, service_of(kind), k};
        SimOptions so;
        so.seed = o.seed;
        StationConfig st{q.service, ServerMode::AggregatedRate, k};
        cells.push_back(
            Cell{q, simulate_station(ArrivalProcess::poisson(q.lambda, o.seed), st, o.min_completions, so)});
      }
  return cells;
}

int suite_default(const ValidateOptions& o, std::ostream& out) {
  out << "kind,k,rho,sim_wait_s,model_wait_s,rel_error,ci95_s,tolerance_s,pass\n";
  double ape_sum = 0.0;
  int failures = 0;
  const auto cells = run_matrix(o);
  for (const auto& c : cells) {
    const auto& st = c.report.stations.front();
    const double exact = exact_wait(c.q);
    const double err = std::abs(st.mean_wait - exact);
    const double tol = std::max(0.01 * exact, 3.0 * st.wait_ci95);
    const bool pass = err <= tol;
    failures += !pass;
    ape_sum += err / exact;
    out << kind_name(c.q.service.kind) << ',' << num(c.q.k) << ',' << num(utilization(c.q)) << ','
        << num(st.mean_wait) << ',' << num(exact) << ',' << num(err / exact, "%.5f") << ','
        << num(st.wait_ci95) << ',' << num(tol) << ',' << (pass ? "yes" : "no") << '\n';
  }
  const double mape = ape_sum / static_cast<double>(cells.size());
  out << "cells " << cells.size() << ", failures " << failures << ", MAPE "
      << num(100.0 * mape, "%.3f") << "%\n";
  return failures == 0 && mape <= 0.05 ? kExitOk : kExitAcceptance;
}

int suite_gg1(const ValidateOptions& o, std::ostream& out) {
  struct Shape {
    const char* name;
    SampleFamily family;
    double scv;
  };
  const Shape arrivals[] = {{"deterministic", SampleFamily::Deterministic, 0.0},
                            {"exponential", SampleFamily::Exponential, 1.0},
                            {"two_point", SampleFamily::TwoPoint, 0.5},
                            {"hyperexp", SampleFamily::HyperExponential, 4.0}};
  const Shape services[] = {{"deterministic", SampleFamily::Deterministic, 0.0},
                            {"exponential", SampleFamily::Exponential, 1.0},
                            {"two_point", SampleFamily::TwoPoint, 0.5},
                            {"hyperexp", SampleFamily::HyperExponential, 3.0}};
  out << "arrivals,service,rho,sim_wait_s,stderr_s,bound_s,pass\n";
  int failures = 0;
  int cells = 0;
  for (const auto& a : arrivals)
    for (const auto& s : services)
      for (double rho : {0.5, 0.8}) {
        const double lambda = rho / kMeanService;
        const double mean_a = 1.0 / lambda;
        const InterarrivalDistribution inter{mean_a, a.scv * mean_a * mean_a};
        const double var_s = s.scv * kMeanService * kMeanService;
        ServiceDistribution service = ServiceDistribution::general(kMeanService, var_s);
        if (s.family == SampleFamily::Deterministic) service = ServiceDistribution::deterministic(kMeanService);
        if (s.family == SampleFamily::Exponential) service = ServiceDistribution::exponential(kMeanService);
        const double bound = wait_gg1_upper_bound(lambda, inter, service, 1.0);

        SimOptions so;
        so.seed = o.seed;
        StationConfig st{service, ServerMode::AggregatedRate, 1.0, s.family};
        const auto arr = ArrivalProcess::renewal(a.family, inter.mean_a, inter.variance_a2, o.seed);
        const auto r = simulate_station(arr, st, o.min_completions, so);
        const auto& w = r.stations.front();
        const bool pass = bound >= w.mean_wait - 3.0 * w.wait_stderr;
        failures += !pass;
        ++cells;
        out << a.name << ',' << s.name << ',' << num(rho) << ',' << num(w.mean_wait) << ','
            << num(w.wait_stderr) << ',' << num(bound) << ',' << (pass ? "yes" : "no") << '\n';
      }
  out << "cells " << cells << ", failures " << failures << '\n';
  return failures == 0 ? kExitOk : kExitAcceptance;
}

int suite_little(const ValidateOptions& o, std::ostream& out) {
  out << "run,station,L,lambda_W,rel_error,pass\n";
  int failures = 0;
  int checked = 0;
  const auto check = [&](const std::string& run, const SimReport& r) {
    for (const auto& st : r.stations) {
      if (st.samples == 0) continue;
      const bool pass = st.little_error() <= 0.03;
      failures += !pass;
      ++checked;
      out << run << ',' << st.name << ',' << num(st.mean_in_station) << ','
          << num(st.arrival_rate * st.mean_sojourn) << ',' << num(st.little_error(), "%.5f") << ','
          << (pass ? "yes" : "no") << '\n';
    }
  };
  for (const auto& c : run_matrix(o))
    check(std::string(kind_name(c.q.service.kind)) + "_k" + num(c.q.k) + "_rho" +
              num(utilization(c.q)),
          c.report);

  SimOptions so;
  so.seed = o.seed;
  const DeviceSpec dev{1.0, 2.0};
  const auto w = WorkloadSpec::deterministic(0.1, 0.05, 1e6, 1e3);
  const NetworkPath net{5e6};
  check("tandem_dedicated",
        simulate_edge_offload(dev, EdgeServerState::dedicated(1.0, dev, w), net, w, o.min_completions, so));
  check("tandem_shared",
        simulate_edge_offload(dev, EdgeServerState::shared(1.0, dev, w, {{6.0, 0.05, 0.0}, {4.0, 0.02, 4e-4}}),
                              net, w, o.min_completions, so));
  check("split",
        simulate_split(dev, EdgeServerState::dedicated(1.0, dev, w), net, SplitPoint{0.05, 0.03, 4e5}, w,
                       o.min_completions, so));
  out << "stations " << checked << ", failures " << failures << '\n';
  return failures == 0 ? kExitOk : kExitAcceptance;
}

}  // namespace

int cmd_validate(const ValidateOptions& o, std::ostream& out) {
  if (o.suite == "default") return suite_default(o, out);
  if (o.suite == "gg1") return suite_gg1(o, out);
  if (o.suite == "little") return suite_little(o, out);
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + o.suite + "' (default, gg1, little)");
}

}  // namespace edgeq::cli

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every tolerance is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "edgeq/cli/commands.hpp"
#include "edgeq/cli/config.hpp"
#include "edgeq/crossover.hpp"
#include "edgeq/des_sim.hpp"
#include "edgeq/error.hpp"
#include "edgeq/queueing.hpp"
#include "edgeq/resource_manager.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace {

using namespace edgeq;
using testing::Gen;
using testing::rel_err;

constexpr std::uint64_t kMatrixCompletions = 1'000'000;
constexpr double kMatrixRelTol = 0.01;
constexpr double kMatrixCiFactor = 3.0;
constexpr int kTandemScenarios = 20;
constexpr std::uint64_t kTandemCompletions = 300'000;
constexpr double kTandemRelTol = 0.05;
constexpr int kLemmaScenarios = 1000;
constexpr double kReductionTol = 1e-12;
constexpr int kMonotoneGridPoints = 10'000;
constexpr int kRenewalPairs = 50;
constexpr std::uint64_t kRenewalCompletions = 200'000;
constexpr double kBoundStderrFactor = 3.0;
constexpr std::size_t kKsSamples = 100'000;
constexpr double kKsMinPvalue = 0.01;
constexpr double kKsRateTol = 0.01;
constexpr double kSwitchSlackEpochs = 1.0;
constexpr std::uint64_t kStraddleCompletions = 400'000;
constexpr double kLittleTol = 0.03;

std::string fixture(const std::string& name) { return std::string(EDGEQ_FIXTURES_DIR) + "/" + name; }

// Little's law residuals of every simulation run by the criteria.
struct LittleLedger {
  int stations = 0;
  double worst = 0.0;
  std::string worst_name;

  void add(const std::string& run, const SimReport& r) {
    for (const auto& st : r.stations) {
      if (st.samples == 0) continue;
      ++stations;
      if (st.little_error() > worst) {
        worst = st.little_error();
        worst_name = run + "/" + st.name;
      }
    }
  }
};

LittleLedger little;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// 1. Station means against the closed forms.
Outcome matrix() {
  const double s = 0.1;
  int failures = 0;
  int cells = 0;
  double worst = 0.0;
  for (ServiceKind kind : {ServiceKind::Deterministic, ServiceKind::Exponential, ServiceKind::General})
    for (double k : {1.0, 2.0, 4.0})
      for (double rho : {0.2, 0.5, 0.8}) {
        const double lambda = rho * k / s;
        const double var = kind == ServiceKind::Deterministic ? 0.0
                           : kind == ServiceKind::Exponential ? s * s
                                                              : 0.5 * s * s;
        const ServiceDistribution svc = kind == ServiceKind::Deterministic ? ServiceDistribution::deterministic(s)
                                        : kind == ServiceKind::Exponential ? ServiceDistribution::exponential(s)
                                                                           : ServiceDistribution::general(s, var);
        const QueueSpec q{lambda, svc, k};
        const double lib = kind == ServiceKind::Deterministic ? wait_md1(q)
                           : kind == ServiceKind::Exponential ? wait_mm1(q)
                                                              : wait_mg1(q);
        const double oracle = testing::pk_wait_folded(lambda, s, var, k);
        SimOptions o;
        o.seed = 1000 + cells;
        const auto r = simulate_station(ArrivalProcess::poisson(lambda, o.seed),
                                        {svc, ServerMode::AggregatedRate, k}, kMatrixCompletions, o);
        little.add("matrix", r);
        const auto& st = r.stations.front();
        const double tol = std::max(kMatrixRelTol * oracle, kMatrixCiFactor * st.wait_ci95);
        const bool ok = std::abs(st.mean_wait - oracle) <= tol && rel_err(lib, oracle) <= 1e-12 &&
                        r.completions >= kMatrixCompletions;
        failures += !ok;
        worst = std::max(worst, rel_err(st.mean_wait, oracle));
        ++cells;
      }
  return {failures == 0, std::to_string(cells) + " cells, " + std::to_string(failures) +
                             " outside max(1%, 3 CI), worst rel error " + fmt("%.4f", worst)};
}

// 2. Tandem and split predictions against simulation.
Outcome tandem() {
  Gen g(2024);
  int failures = 0;
  int checks = 0;
  double worst = 0.0;
  for (int i = 0; i < kTandemScenarios; ++i) {
    const bool variable = i % 4 == 3;
    const double s_dev = g.log_uniform(0.005, 0.1);
    const double s_edge = g.log_uniform(0.002, 0.05);
    const DeviceSpec dev{g.uniform(1.0, 3.0), 0.0};
    const double lambda = g.uniform(0.1, 0.6) * dev.k_dev / s_dev;
    const DeviceSpec d{dev.k_dev, lambda};
    const double b = g.log_uniform(5e6, 1e8);
    // Request NIC load up to 0.5, response NIC load kept light.
    const double d_req = g.uniform(0.05, 0.5) * b / lambda;
    const double d_res = g.uniform(0.0, 0.05) * b / lambda;
    const auto w = variable ? WorkloadSpec::variable(s_dev, s_edge, d_req, d_res)
                            : WorkloadSpec::deterministic(s_dev, s_edge, d_req, d_res);
    const double k_edge = g.uniform(1.0, 4.0);
    std::vector<Tenant> others;
    const int n = g.integer(0, 3);
    double edge_rho = lambda * s_edge / k_edge;
    if (edge_rho > 0.6) {
      --i;
      continue;
    }
    for (int t = 0; t < n; ++t) {
      const double s = variable ? s_edge : g.log_uniform(0.002, 0.05);
      const double room = std::max(0.0, 0.7 - edge_rho);
      const double lt = g.uniform(0.0, room / (n - t)) * k_edge / s;
      edge_rho += lt * s / k_edge;
      others.push_back({lt, s, variable ? s * s : (g.coin() ? 0.0 : g.uniform(0.0, 1.0) * s * s)});
    }
    const auto edge = EdgeServerState::shared(k_edge, d, w, others);
    const NetworkPath net{b};
    // The response NIC carries every tenant's results.
    if (edge.lambda_edge() * d_res / b > 0.3) {
      --i;
      continue;
    }
    SimOptions o;
    o.seed = 500 + i;
    const double pred = predict_edge_offload(d, edge, net, w);
    const auto r = simulate_edge_offload(d, edge, net, w, kTandemCompletions, o);
    little.add("tandem", r);
    const double e1 = rel_err(pred, r.mean_latency);

    const double f = g.uniform(0.2, 0.8);
    const SplitPoint sp{f * s_dev, (1.0 - f) * s_edge, g.uniform(0.1, 1.0) * d_req};
    const double pred_split = predict_split(d, edge, net, sp, w);
    const auto rs = simulate_split(d, edge, net, sp, w, kTandemCompletions, o);
    little.add("split", rs);
    const double e2 = rel_err(pred_split, rs.mean_latency);
    failures += (e1 > kTandemRelTol) + (e2 > kTandemRelTol);
    checks += 2;
    worst = std::max({worst, e1, e2});
  }
  return {failures == 0, std::to_string(checks) + " comparisons over " + std::to_string(kTandemScenarios) +
                             " scenarios, " + std::to_string(failures) + " above 5%, worst " +
                             fmt("%.4f", worst)};
}

// 3. Lemma verdicts against predictor comparisons.
Outcome lemmas() {
  using testing::ScenarioShape;
  Gen g(3);
  int mismatches = 0;
  const std::pair<ScenarioShape, bool (*)(const Scenario&)> cases[] = {
      {ScenarioShape::Dedicated, lemma1_holds},
      {ScenarioShape::Shared, lemma2_holds},
      {ScenarioShape::Variable, lemma3_holds}};
  for (const auto& [shape, lemma] : cases)
    for (int i = 0; i < kLemmaScenarios; ++i) {
      const auto sc = testing::random_scenario(g, shape);
      mismatches += lemma(sc) != testing::predictor_says_device(sc);
    }
  return {mismatches == 0, "3 x " + std::to_string(kLemmaScenarios) + " scenarios, " +
                               std::to_string(mismatches) + " mismatches"};
}

// 4. Closed-form reductions.
Outcome reductions() {
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double s = 0.001 * std::pow(1.8, i);
      const double k = 0.5 + 0.5 * (j % 5);
      const double lambda = (0.02 + 0.96 * j / 9.0) * k / s;
      const QueueSpec det{lambda, ServiceDistribution::deterministic(s), k};
      const QueueSpec exp{lambda, ServiceDistribution::exponential(s), k};
      worst = std::max({worst, rel_err(wait_mg1({lambda, ServiceDistribution::general(s, 0.0), k}), wait_md1(det)),
                        rel_err(wait_mg1({lambda, ServiceDistribution::general(s, s * s), k}), wait_mm1(exp)),
                        rel_err(wait_md1(det), 0.5 * wait_mm1(exp))});
      ++points;
    }
  return {worst <= kReductionTol, std::to_string(points) + " points, worst rel error " + fmt("%.3g", worst)};
}

// 5. Monotone grids: bandwidth, payload and proportional service scaling.
Outcome monotonicity() {
  using testing::ScenarioShape;
  Gen g(5);
  int points = 0;
  int violations = 0;
  const auto walk = [&](const std::function<Scenario(double)>& at, int n, double sign) {
    std::optional<double> prev;
    for (int j = 0; j < n; ++j) {
      const auto d = testing::gap(at(j));
      if (d && prev) {
        ++points;
        violations += sign * (*d - *prev) < -1e-15;
      }
      if (d) prev = d;
    }
  };
  while (points < kMonotoneGridPoints) {
    const ScenarioShape shape = static_cast<ScenarioShape>(g.integer(0, 2));
    const auto sc = testing::random_scenario(g, shape);
    walk([&](double j) { auto s = sc; s.net.bandwidth_b *= std::pow(1.25, j - 10); return s; }, 21, +1.0);
    walk([&](double j) {
      auto w = sc.w;
      w.d_req = w.d_req * std::pow(1.25, j - 10) + 500.0 * j;
      w.d_res = w.d_res * std::pow(1.25, j - 10);
      return testing::with_workload(sc, w);
    }, 21, -1.0);
    if (shape != ScenarioShape::Shared && sc.w.s_dev >= sc.w.s_edge &&
        sc.w.s_dev / sc.dev.k_dev >= sc.w.s_edge / sc.edge.k_edge)
      walk([&](double j) {
        const double c = (j + 1) / 21.0;
        auto w = sc.w;
        w.s_dev *= c;
        w.s_edge *= c;
        w.variance_dev *= c * c;
        w.variance_edge *= c * c;
        return testing::with_workload(sc, w);
      }, 21, +1.0);
  }
  return {violations == 0, std::to_string(points) + " grid steps, " + std::to_string(violations) + " violations"};
}

// 6. Upper bound against renewal simulations.
Outcome marshall() {
  Gen g(6);
  const SampleFamily families[] = {SampleFamily::Deterministic, SampleFamily::Exponential,
                                   SampleFamily::TwoPoint, SampleFamily::HyperExponential};
  const auto scv_for = [&](SampleFamily f) {
    switch (f) {
      case SampleFamily::Deterministic: return 0.0;
      case SampleFamily::Exponential: return 1.0;
      case SampleFamily::TwoPoint: return g.uniform(0.1, 3.0);
      case SampleFamily::HyperExponential: return g.uniform(1.2, 5.0);
    }
    return 1.0;
  };
  int failures = 0;
  double min_slack = 1e300;
  for (int i = 0; i < kRenewalPairs; ++i) {
    const SampleFamily fa = families[g.integer(0, 3)];
    const SampleFamily fs = families[g.integer(0, 3)];
    const double scv_a = scv_for(fa);
    const double scv_s = scv_for(fs);
    const double s = g.log_uniform(0.01, 1.0);
    const double k = g.coin() ? 1.0 : g.uniform(1.0, 4.0);
    const double rho = g.uniform(0.3, 0.85);
    const double mean_a = s / (k * rho);
    const InterarrivalDistribution inter{mean_a, scv_a * mean_a * mean_a};
    const ServiceDistribution svc = fs == SampleFamily::Deterministic ? ServiceDistribution::deterministic(s)
                                    : fs == SampleFamily::Exponential ? ServiceDistribution::exponential(s)
                                                                      : ServiceDistribution::general(s, scv_s * s * s);
    const double bound = wait_gg1_upper_bound(1.0 / mean_a, inter, svc, k);
    const double oracle = testing::marshall_bound(1.0 / mean_a, inter.variance_a2, s, svc.variance_s2, k);
    SimOptions o;
    o.seed = 600 + i;
    const auto r = simulate_station(ArrivalProcess::renewal(fa, mean_a, inter.variance_a2, o.seed),
                                    {svc, ServerMode::AggregatedRate, k, fs}, kRenewalCompletions, o);
    little.add("renewal", r);
    const auto& st = r.stations.front();
    const double slack = bound - (st.mean_wait - kBoundStderrFactor * st.wait_stderr);
    const bool ok = slack >= 0.0 && rel_err(bound, oracle) <= 1e-12;
    failures += !ok;
    if (bound > 0.0) min_slack = std::min(min_slack, slack / bound);
  }
  return {failures == 0, std::to_string(kRenewalPairs) + " pairs, " + std::to_string(failures) +
                             " violations, min relative slack " + fmt("%.4f", min_slack)};
}

// 7. Exponentiality of the merged stream at the edge.
Outcome superposition() {
  const DeviceSpec dev{1.0, 4.0};
  const auto w = WorkloadSpec::deterministic(0.1, 0.02, 2e4, 1e3);
  const auto edge = EdgeServerState::shared(1.0, dev, w, {{6.0, 0.02, 0.0}, {2.5, 0.03, 1e-4}});
  const double total = edge.lambda_edge();
  SimOptions o;
  o.seed = 7;
  o.record_arrivals_at = kSimEdge;
  o.arrival_record_limit = kKsSamples + 1;
  const auto r = simulate_edge_offload(dev, edge, {1e7}, w, 150'000, o);
  little.add("superposition", r);
  std::vector<double> gaps;
  for (std::size_t i = 1; i < r.recorded_arrivals.size(); ++i)
    gaps.push_back(r.recorded_arrivals[i] - r.recorded_arrivals[i - 1]);
  if (gaps.size() < kKsSamples) return {false, "only " + std::to_string(gaps.size()) + " gaps recorded"};
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  const double rate_err = rel_err(1.0 / mean, total);
  const double p = testing::kolmogorov_pvalue(testing::ks_statistic_exponential(gaps, total), gaps.size());
  return {p > kKsMinPvalue && rate_err <= kKsRateTol,
          std::to_string(gaps.size()) + " gaps, KS p=" + fmt("%.4f", p) + ", rate error " + fmt("%.5f", rate_err)};
}

struct Phase {
  double start, end;
  Strategy expected;
};

// Every epoch of a phase runs the expected strategy, except the epoch right
// after a scripted event; switches land within one epoch of the events.
Outcome check_timeline(const AdaptiveResult& r, double epoch, const std::vector<Phase>& phases,
                       const std::vector<double>& switch_times) {
  std::string detail;
  bool ok = true;
  for (const auto& ph : phases) {
    const double from = ph.start > 0.0 ? ph.start + kSwitchSlackEpochs * epoch : 0.0;
    int match = 0, total = 0;
    for (const auto& e : r.timeline.entries)
      if (e.epoch >= from && e.epoch < ph.end) {
        ++total;
        match += e.strategy == ph.expected;
      }
    ok = ok && total > 0 && match == total;
    detail += to_string(ph.expected) + " " + std::to_string(match) + "/" + std::to_string(total) + "; ";
  }
  std::vector<double> switches;
  for (std::size_t i = 1; i < r.timeline.entries.size(); ++i)
    if (!(r.timeline.entries[i].strategy == r.timeline.entries[i - 1].strategy))
      switches.push_back(r.timeline.entries[i].epoch);
  ok = ok && switches.size() == switch_times.size();
  detail += "switches at";
  for (std::size_t i = 0; i < switches.size(); ++i) {
    detail += " " + fmt("%g", switches[i]);
    if (i < switch_times.size()) ok = ok && std::abs(switches[i] - switch_times[i]) <= kSwitchSlackEpochs * epoch;
  }
  return {ok, detail};
}

// 8. Bandwidth-driven adaptation.
Outcome case_one() {
  const auto file = cli::parse_script(fixture("case1.script"));
  const auto r = run_adaptive(file.script, file.manager);
  const auto off = Strategy::offload(0);
  auto out = check_timeline(r, file.script.epoch_length, {{0, 20, off}, {20, 40, off}, {40, 60, Strategy::on_device()}, {60, 80, off}},
                            {40.0, 60.0});
  // Predicted offload latency above the device prediction in the slow phase.
  double pred_edge = 0.0, pred_dev = 0.0;
  int n = 0;
  for (const auto& d : r.decisions)
    if (d.decision.epoch >= 42 && d.decision.epoch < 60) {
      pred_edge += d.decision.predicted_edges[0];
      pred_dev += d.decision.predicted_device;
      ++n;
    }
  pred_edge /= std::max(n, 1);
  pred_dev /= std::max(n, 1);
  out.pass = out.pass && n > 0 && pred_edge > pred_dev;
  out.detail += "; 2 Mbps phase predicted offload " + fmt("%.1f", 1e3 * pred_edge) + " ms vs device " +
                fmt("%.1f", 1e3 * pred_dev) + " ms";
  return out;
}

// 9. Load-driven adaptation across two edges.
Outcome case_two() {
  const auto file = cli::parse_script(fixture("case2.script"));
  const auto r = run_adaptive(file.script, file.manager);
  return check_timeline(r, file.script.epoch_length,
                        {{0, 80, Strategy::offload(0)}, {80, 160, Strategy::offload(1)},
                         {160, 240, Strategy::on_device()}},
                        {80.0, 160.0});
}

// 10. Tenant-count crossover with simulated straddle.
Outcome tenant_crossover() {
  const auto c = cli::parse_config(fixture("inception-like.yaml"));
  Scenario sc{c.dev, c.edge_state(0), c.path(0), c.w, c.options};
  const auto res = find_crossovers(sc, SweepParam::TenantCount, {1, 40}, 160);
  if (res.crossings.size() != 1 || res.crossings[0].direction != CrossDirection::ToDevice)
    return {false, std::to_string(res.crossings.size()) + " crossings"};
  const double at = res.crossings[0].value;
  SimOptions o;
  o.seed = 10;
  const auto dev = simulate_on_device(c.dev, c.w, kStraddleCompletions, o);
  little.add("straddle_device", dev);
  const auto sim_edge = [&](double n) {
    const auto s = apply_param(sc, SweepParam::TenantCount, n);
    const auto r = simulate_edge_offload(s.dev, s.edge, s.net, s.w, kStraddleCompletions, o);
    little.add("straddle_edge", r);
    return r;
  };
  const auto before = sim_edge(at - 1);
  const auto after = sim_edge(at);
  const bool straddle = before.mean_latency + 3 * before.latency_stderr < dev.mean_latency &&
                        after.mean_latency - 3 * after.latency_stderr > dev.mean_latency;
  return {at == 18.0 && straddle,
          "crossing at " + fmt("%g", at) + " tenants; simulated edge " + fmt("%.2f", 1e3 * before.mean_latency) +
              " ms at " + fmt("%g", at - 1) + ", " + fmt("%.2f", 1e3 * after.mean_latency) + " ms at " +
              fmt("%g", at) + ", device " + fmt("%.2f", 1e3 * dev.mean_latency) + " ms"};
}

// 11. Byte-identical reruns.
Outcome determinism() {
  const auto cfg = cli::parse_config(fixture("mobilenet-like.yaml"));
  cli::SweepOptions so;
  so.lo = 2;
  so.hi = 30;
  so.points = 8;
  so.simulate = true;
  so.min_completions = 20'000;
  so.seed = 11;
  std::ostringstream a, b;
  cli::cmd_sweep(cfg, so, a);
  cli::cmd_sweep(cfg, so, b);
  const auto script = cli::parse_script(fixture("case1.script"));
  std::ostringstream t1, s1, d1, t2, s2, d2;
  cli::cmd_case(script, {}, t1, s1, &d1);
  cli::cmd_case(script, {}, t2, s2, &d2);
  const bool sweep_same = a.str() == b.str();
  const bool case_same = t1.str() == t2.str() && s1.str() == s2.str() && d1.str() == d2.str();
  return {sweep_same && case_same && !a.str().empty() && !t1.str().empty(),
          std::string("sweep ") + (sweep_same ? "identical" : "differs") + " (" + std::to_string(a.str().size()) +
              " bytes), case " + (case_same ? "identical" : "differs") + " (" +
              std::to_string(t1.str().size() + s1.str().size() + d1.str().size()) + " bytes)"};
}

// 12. Little's law on everything simulated above.
Outcome little_law() {
  return {little.stations > 0 && little.worst <= kLittleTol,
          std::to_string(little.stations) + " stations, worst " + fmt("%.5f", little.worst) +
              (little.worst_name.empty() ? "" : " at " + little.worst_name)};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"formula vs simulation matrix", matrix},
      {"tandem and split vs simulation", tandem},
      {"lemma-predictor equivalence", lemmas},
      {"closed-form reductions", reductions},
      {"monotone grids", monotonicity},
      {"G/G/1 upper bound", marshall},
      {"Poisson superposition", superposition},
      {"bandwidth adaptation case", case_one},
      {"multi-edge load case", case_two},
      {"tenant-count crossover", tenant_crossover},
      {"determinism", determinism},
      {"Little's law", little_law},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %d: %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "edgeq/cli/commands.hpp"
#include "edgeq/cli/config.hpp"
#include "edgeq/error.hpp"

namespace {

using namespace edgeq;
using namespace edgeq::cli;

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*f) throw ConfigError(path + ": cannot open for writing");
  return f;
}

bool parse_range(const std::string& s, double& lo, double& hi) {
  const auto colon = s.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      lo = hi = std::stod(s, &used);
      return used == s.size();
    }
    lo = std::stod(s.substr(0, colon), &used);
    if (used != colon) return false;
    const std::string rest = s.substr(colon + 1);
    hi = std::stod(rest, &used);
    return used == rest.size();
  } catch (const std::exception&) {
    return false;
  }
}

int classify(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Unstable:
    case ErrorCode::AllUnstable:
    case ErrorCode::EmptyFeasibleRange:
      return kExitUnstable;
    default:
      return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queueing-model latency prediction for on-device versus edge execution"};
  app.require_subcommand(1);

  std::string config_path;
  bool json = false;
  auto* predict = app.add_subcommand("predict", "Predict per-strategy latency for a config");
  predict->add_option("config", config_path, "YAML config")->required();
  predict->add_flag("--json", json, "Machine-readable JSON output");

  SweepOptions sweep;
  std::string param = "bandwidth";
  std::string range;
  auto* sw = app.add_subcommand("sweep", "Sweep one parameter and emit CSV");
  sw->add_option("config", config_path, "YAML config")->required();
  sw->add_option("--param", param, "bandwidth (Mbps), lambda (req/s), tenants or s_dev (ms)");
  sw->add_option("--range", range, "lo:hi in the parameter's units")->required();
  sw->add_option("--points", sweep.points, "Grid points (tenant sweeps use every integer)");
  sw->add_option("--edge", sweep.edge, "1-based edge to compare against")->default_val(1);
  sw->add_flag("--simulate", sweep.simulate, "Add simulated columns");
  sw->add_option("--seed", sweep.seed, "Simulation seed");
  sw->add_option("--min-completions", sweep.min_completions, "Completions per simulated point");

  std::string script_path;
  std::string timeline_path;
  std::string summary_path;
  std::string decisions_path;
  CaseOptions case_opts;
  double epoch = 0.0;
  std::uint64_t case_seed = 0;
  auto* cs = app.add_subcommand("case", "Run the adaptive manager over a scenario script");
  cs->add_option("script", script_path, "YAML scenario script")->required();
  auto* epoch_opt = cs->add_option("--epoch", epoch, "Epoch length in seconds");
  auto* seed_opt = cs->add_option("--seed", case_seed, "Override the script seed");
  cs->add_option("--timeline", timeline_path, "Timeline CSV path (default stdout)");
  cs->add_option("--summary", summary_path, "Summary path (default stderr, or stdout with --timeline)");
  cs->add_option("--decisions", decisions_path, "Decision log JSON path");

  ValidateOptions validate;
  auto* val = app.add_subcommand("validate", "Formula versus simulation report");
  val->add_option("--suite", validate.suite, "default, gg1 or little");
  val->add_option("--seed", validate.seed, "Simulation seed");
  val->add_option("--min-completions", validate.min_completions, "Completions per cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*predict) return cmd_predict(parse_config(config_path), PredictOptions{json}, std::cout);

    if (*sw) {
      const auto p = parse_sweep_param(param);
      if (!p) throw ConfigError("--param: expected bandwidth, lambda, tenants or s_dev");
      sweep.param = *p;
      if (!parse_range(range, sweep.lo, sweep.hi)) throw ConfigError("--range: expected lo:hi");
      if (sweep.edge == 0) throw ConfigError("--edge: expected an index >= 1");
      sweep.edge -= 1;
      return cmd_sweep(parse_config(config_path), sweep, std::cout);
    }

    if (*cs) {
      if (*epoch_opt) {
        if (!(epoch > 0.0)) throw ConfigError("--epoch: must be > 0");
        case_opts.epoch = epoch;
      }
      if (*seed_opt) case_opts.seed = case_seed;
      const ScriptFile file = parse_script(script_path);
      std::unique_ptr<std::ofstream> timeline_file;
      std::unique_ptr<std::ofstream> summary_file;
      std::unique_ptr<std::ofstream> decisions_file;
      std::ostream* timeline = &std::cout;
      std::ostream* summary = &std::cerr;
      if (!timeline_path.empty()) {
        timeline_file = open_out(timeline_path);
        timeline = timeline_file.get();
        summary = &std::cout;
      }
      if (!summary_path.empty()) {
        summary_file = open_out(summary_path);
        summary = summary_file.get();
      }
      if (!decisions_path.empty()) decisions_file = open_out(decisions_path);
      return cmd_case(file, case_opts, *timeline, *summary, decisions_file.get());
    }

    if (*val) return cmd_validate(validate, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnstableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return classify(e);
  }
  return kExitConfig;
}

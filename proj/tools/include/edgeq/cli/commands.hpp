#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "edgeq/cli/config.hpp"
#include "edgeq/crossover.hpp"

namespace edgeq::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitUnstable = 2,
  kExitAcceptance = 3,
};

struct PredictOptions {
  bool json = false;
};

// Device, per-edge and per-split predictions with lemma verdicts. Returns
// kExitUnstable when any strategy is unstable; the report is still written.
int cmd_predict(const Config& config, const PredictOptions& options, std::ostream& out);

struct SweepOptions {
  SweepParam param = SweepParam::Bandwidth;
  // In the parameter's file units: Mbps, requests/s, tenant count or ms.
  double lo = 0.0;
  double hi = 0.0;
  int points = 50;
  bool simulate = false;
  std::uint64_t seed = 1;
  std::uint64_t min_completions = 100'000;
  // Edge compared against the device (0-based).
  std::size_t edge = 0;
};

// CSV sweep against one edge, with the crossings merged in by value.
int cmd_sweep(const Config& config, const SweepOptions& options, std::ostream& out);

struct CaseOptions {
  std::optional<double> epoch;
  std::optional<std::uint64_t> seed;
};

// Runs the adaptive manager over a script. The timeline CSV goes to
// `timeline`, the phase summary to `summary` and, when given, the decision
// log JSON to `decisions`.
int cmd_case(const ScriptFile& file, const CaseOptions& options, std::ostream& timeline,
             std::ostream& summary, std::ostream* decisions);

struct ValidateOptions {
  // default, gg1 or little.
  std::string suite = "default";
  std::uint64_t seed = 1;
  std::uint64_t min_completions = 1'000'000;
};

// Formula-versus-simulation report; kExitAcceptance when a cell fails.
int cmd_validate(const ValidateOptions& options, std::ostream& out);

std::optional<SweepParam> parse_sweep_param(const std::string& name);

}  // namespace edgeq::cli

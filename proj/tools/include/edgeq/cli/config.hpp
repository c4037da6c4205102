#pragma once

// YAML configuration and scenario-script files for the edgeq tool.
//
// Keys carry their units (s_dev_ms, d_req_kb, bandwidth_mbps, ...); values
// are converted to seconds, bits and bits/second on load. "kb" is 1000 bits.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgeq/latency_model.hpp"
#include "edgeq/resource_manager.hpp"
#include "edgeq/scenario.hpp"

namespace edgeq::cli {

// Message format: "<file>:<line>:<column>: <key>: <problem>".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EdgeConfig {
  double k_edge = 1.0;
  // Device-to-edge bandwidth in bits/s; the network default when absent.
  double bandwidth_b = 0.0;
  // Co-located tenants, excluding the configured device.
  std::vector<Tenant> tenants;
};

struct Config {
  DeviceSpec dev;
  WorkloadSpec w;
  double bandwidth_b = 0.0;
  std::vector<EdgeConfig> edges;
  std::vector<SplitPoint> split_points;
  ModelOptions options;

  // Edge e with the device as tenants[0].
  EdgeServerState edge_state(std::size_t e) const;
  NetworkPath path(std::size_t e) const;
};

struct ScriptFile {
  ScenarioScript script;
  ManagerConfig manager;
};

Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& name = "<config>");

ScriptFile parse_script(const std::string& path);
ScriptFile parse_script_text(const std::string& text, const std::string& name = "<script>");

}  // namespace edgeq::cli

#pragma once

// Direct evaluation of the offloading inequalities and crossover search
// along one swept scenario parameter.

#include <optional>
#include <vector>

#include "edgeq/latency_model.hpp"

namespace edgeq {

struct Scenario {
  DeviceSpec dev;
  EdgeServerState edge;
  NetworkPath net;
  WorkloadSpec w;
  ModelOptions options;
};

// |T_dev - T_edge| below this is a tie, resolved for on-device processing.
inline constexpr double kTieTolerance = 1e-12;

// Dedicated edge, deterministic service: the single-tenant inequality with
// the M/D/1 processor terms. Throws MultiTenant for shared edges.
bool lemma1_holds(const Scenario& sc);

// Shared edge: the inequality with the M/G/1 mixture term. Accepts a single
// tenant, where it reduces to lemma1_holds.
bool lemma2_holds(const Scenario& sc);

// Variable service: M/M/1 terms for both processors.
bool lemma3_holds(const Scenario& sc);

// Right-hand side of the active inequality, i.e. the network and queueing
// penalty that s_dev - s_edge has to beat. Exposed for reporting.
double lemma_rhs(const Scenario& sc);

// Comparison of the two predictors with the tie rule applied. Unstable
// strategies lose; throws AllUnstable when neither is stable.
bool device_wins(const Scenario& sc);

enum class SweepParam { Bandwidth, Lambda, TenantCount, SDev };

enum class CrossDirection { ToDevice, ToEdge };

struct Crossing {
  double value = 0.0;
  CrossDirection direction = CrossDirection::ToDevice;
  // Bracket that contains exactly this one sign change.
  double lo = 0.0;
  double hi = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct CrossoverResult {
  SweepParam swept_param = SweepParam::Bandwidth;
  std::vector<Crossing> crossings;
  Interval feasible_range;
};

// Applies one parameter value to a copy of the scenario.
//  Bandwidth: net.bandwidth_b.
//  Lambda: dev.lambda_dev and the device's own tenant entry.
//  TenantCount: the edge holds round(value) copies of tenants[0].
//  SDev: w.s_dev.
Scenario apply_param(const Scenario& sc, SweepParam param, double value);

// Signed latency gap T_dev - T_edge at one sweep value. +inf when only the
// device is unstable, -inf when only the edge is; nullopt when both are.
std::optional<double> latency_gap(const Scenario& sc, SweepParam param, double value);

// Dense scan over `resolution` points followed by bisection of each
// sign-change bracket to a relative tolerance of 1e-6. TenantCount is
// integral: it scans every integer in range and crossings land on the first
// count on the new side. Throws EmptyFeasibleRange if no scanned point has a
// stable strategy.
CrossoverResult find_crossovers(const Scenario& sc, SweepParam param, Interval range,
                                int resolution);

const char* to_string(SweepParam p);
const char* to_string(CrossDirection d);

}  // namespace edgeq

#pragma once

#include <stdexcept>
#include <string>

namespace edgeq {

enum class ErrorCode {
  InvalidArgument,
  Unstable,
  WrongDistribution,
  Inconsistent,
  MultiTenant,
  EmptyFeasibleRange,
  Degenerate,
  AllUnstable,
  MalformedScript,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

// Base of every error raised by the library. The code lets callers branch
// without a cascade of catch clauses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A queue has no steady state: utilization reached the stability margin
// (analytic evaluators) or the queue-length bound (simulator).
class UnstableError : public Error {
 public:
  UnstableError(std::string stage, double utilization);

  const std::string& stage() const noexcept { return stage_; }
  double utilization() const noexcept { return utilization_; }

 private:
  std::string stage_;
  double utilization_;
};

}  // namespace edgeq

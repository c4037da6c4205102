#include "edgeq/error.hpp"

#include <cstdio>

namespace edgeq {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::WrongDistribution: return "WrongDistribution";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::MultiTenant: return "MultiTenant";
    case ErrorCode::EmptyFeasibleRange: return "EmptyFeasibleRange";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::AllUnstable: return "AllUnstable";
    case ErrorCode::MalformedScript: return "MalformedScript";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

namespace {
std::string unstable_message(const std::string& stage, double rho) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", rho);
  return "unstable " + stage + " (utilization " + buf + ")";
}
}  // namespace

UnstableError::UnstableError(std::string stage, double utilization)
    : Error(ErrorCode::Unstable, unstable_message(stage, utilization)),
      stage_(std::move(stage)),
      utilization_(utilization) {}

}  // namespace edgeq

#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace edgeq::cli {

// Locale-independent shortest-ish rendering for CSV and tables.
inline std::string num(double v, const char* spec = "%.9g") {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string ms(double seconds) { return num(seconds * 1e3, "%.6f"); }

}  // namespace edgeq::cli

#pragma once

#include <cstdio>
#include <string>

namespace ergo::csv {

/// Shortest round-trip decimal form; keeps report files byte-stable across
/// reruns.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace ergo::csv

#pragma once

#include <cstdio>
#include <string>

namespace doi {

/// Shortest round-trip-safe text for report values; locale independent.
inline std::string fmt_num(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace doi

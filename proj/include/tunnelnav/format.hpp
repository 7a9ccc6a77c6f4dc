#pragma once

#include <cstdio>
#include <string>

namespace tunnelnav {

/// Fixed 17-significant-digit decimal rendering used by every emitted artifact.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace tunnelnav

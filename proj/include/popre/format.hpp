#pragma once

#include <cstdio>
#include <string>

namespace popre {

// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[64];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    double back;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

}  // namespace popre

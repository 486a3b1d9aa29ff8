#pragma once

#include <cstdio>
#include <string>

namespace doobmax {

// 17 significant digits, '.' decimal separator, locale-free. Enough digits
// for an exact double round-trip, so equal values always print identically.
inline std::string format_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

}  // namespace doobmax

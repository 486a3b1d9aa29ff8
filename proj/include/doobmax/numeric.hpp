#pragma once

#include <cmath>
#include <vector>

#include "doobmax/errors.hpp"

namespace doobmax {

// |x|^p with fast paths for the exponents that dominate the hot loops.
inline double pow_abs(double x, double p) {
  double a = std::fabs(x);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

// lhs <= rhs up to a slack relative to the magnitude of both sides.
inline bool leq_rel(double lhs, double rhs, double tol) {
  double scale = std::max(std::fabs(lhs), std::fabs(rhs));
  return lhs <= rhs + tol * scale;
}

// Relative gap (rhs - lhs) / max(|lhs|, |rhs|, 1).
inline double rel_margin(double lhs, double rhs) {
  double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
  return (rhs - lhs) / scale;
}

inline double power_int(double base, int exponent) {
  return std::pow(base, static_cast<double>(exponent));
}

// Smallest integer l with value <= base^l, so base^(l-1) < value <= base^l.
// A value sitting exactly on a power of `base` resolves to the slice whose
// closed end it is. Requires value > 0 and base > 1.
inline int scale_index(double value, double base) {
  if (!(value > 0.0) || !(base > 1.0))
    throw ParameterError("scale_index: requires value > 0 and base > 1");
  int l = static_cast<int>(std::ceil(std::log(value) / std::log(base)));
  while (power_int(base, l) < value) ++l;
  while (power_int(base, l - 1) >= value) --l;
  return l;
}

// `samples` points, geometrically spaced, first = lo and last = hi exactly.
inline std::vector<double> geometric_grid(double lo, double hi, int samples) {
  if (!(lo > 0.0) || !(hi > lo) || samples < 2)
    throw ParameterError("geometric_grid: requires 0 < lo < hi and samples >= 2");
  std::vector<double> grid(static_cast<std::size_t>(samples));
  double step = std::log(hi / lo) / (samples - 1);
  for (int i = 0; i < samples; ++i)
    grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace doobmax

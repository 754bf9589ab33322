#pragma once

#include <algorithm>
#include <cmath>

namespace relayopt {

/// Geometric predicate tolerance (point coincidence, hull membership).
inline constexpr double kEpsGeo = 1e-9;

/// Relative tolerance for scalar equality tests on rates and objective values.
inline constexpr double kEpsEq = 1e-7;

/// |a - b| <= eps * max(1, |a|, |b|)
inline bool approx_eq(double a, double b, double eps = kEpsEq) {
  return std::abs(a - b) <= eps * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace relayopt

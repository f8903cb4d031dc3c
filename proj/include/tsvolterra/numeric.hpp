#pragma once

#include <algorithm>
#include <cmath>

namespace tsvolterra {

// Default comparison style: relative, falling back to the same tolerance
// taken absolutely once the reference magnitude drops below 1e-6.
inline bool approx_equal(double x, double y, double tol) {
  double ref = std::max(std::fabs(x), std::fabs(y));
  if (ref < 1e-6) return std::fabs(x - y) <= tol;
  return std::fabs(x - y) <= tol * ref;
}

// gap normalised the same way, handy for recording worst cases
inline double approx_gap(double x, double y) {
  double ref = std::max(std::fabs(x), std::fabs(y));
  double d = std::fabs(x - y);
  if (ref < 1e-6) return d;
  return d / ref;
}

}  // namespace tsvolterra

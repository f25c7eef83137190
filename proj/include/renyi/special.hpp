#pragma once

#include <cmath>
#include <numbers>

#include "renyi/errors.hpp"

namespace renyi {

/// log Gamma(x) for x > 0 (glibc lgamma, ~1 ulp in the range used here).
inline double log_gamma(double x) {
  detail::require(x > 0.0 && std::isfinite(x), "special: log_gamma needs a positive finite argument");
  return std::lgamma(x);
}

inline double gamma_fn(double x) {
  detail::require(x > 0.0 && std::isfinite(x), "special: gamma needs a positive finite argument");
  return std::tgamma(x);
}

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); equals 2 for n = 1.
inline double unit_sphere_area(int n) {
  detail::require(n >= 1, "special: sphere dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_fn(0.5 * n);
}

}  // namespace renyi

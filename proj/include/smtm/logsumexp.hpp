#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace smtm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(v))). A single finite element is returned unchanged, and an
/// all -inf (or empty) input gives -inf.
inline double log_sum_exp(std::span<const double> v) noexcept {
  double m = kNegInf;
  for (double a : v) m = std::max(m, a);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double a : v) s += std::exp(a - m);
  return m + std::log(s);
}

/// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace smtm

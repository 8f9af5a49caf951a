#pragma once

// Acceptance algebra shared by the multiple-try kernels and the scaling-limit
// functionals. Everything is expressed through log-ratios:
//
//   cand[i] = log pi(candidate_i) - log pi(current),   i = 0..N-1
//   ref[i]  = log pi(reference_i) - log pi(candidate_j), i = 0..N-2
//
// where pi is whatever density the kernel targets (pi on R^d for MTM, the
// lifted pi_S on the sphere for SMTM). With a symmetric proposal the
// acceptance probability of the selected candidate j is
//
//   GB: 1 ^ sum_i e^{cand_i} / (sum_i e^{cand_j + ref_i} + 1)
//   LB: 1 ^ sum_i e^{(cand_i + cand_j)/2} / (sum_i e^{(cand_j + ref_i)/2} + 1)
//
// and the joint probability of selecting j and accepting it is the selection
// probability times that.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>

#include "smtm/logsumexp.hpp"

namespace smtm {

enum class WeightKind { GloballyBalanced, LocallyBalanced };

std::string_view to_string(WeightKind w) noexcept;
WeightKind parse_weight(std::string_view s);

/// log omega(current, candidate) for a candidate with log-ratio `log_ratio`.
inline double log_weight(double log_ratio, WeightKind w) noexcept {
  return w == WeightKind::GloballyBalanced ? log_ratio : 0.5 * log_ratio;
}

namespace detail {

// log(sum_{i<n} exp(term(i)) [+ 1]) without materializing the terms.
template <class Term>
double lse_terms(std::size_t n, Term term, bool plus_one) noexcept {
  double m = plus_one ? 0.0 : kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, term(i));
  if (m == kNegInf) return kNegInf;
  double s = plus_one ? std::exp(-m) : 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(term(i) - m);
  return m + std::log(s);
}

}  // namespace detail

/// log of the forward normalizer: GB log sum e^{cand_i}; LB log sum e^{(cand_i + cand_j)/2}.
inline double multi_try_log_forward(std::span<const double> cand, std::size_t j, WeightKind w) noexcept {
  if (w == WeightKind::GloballyBalanced)
    return detail::lse_terms(cand.size(), [&](std::size_t i) { return cand[i]; }, false);
  const double cj = cand[j];
  return detail::lse_terms(cand.size(), [&](std::size_t i) { return 0.5 * (cand[i] + cj); }, false);
}

/// log of the backward normalizer: log(sum_i e^{cand_j + ref_i} + 1) (GB) or
/// log(sum_i e^{(cand_j + ref_i)/2} + 1) (LB).
inline double multi_try_log_backward(std::span<const double> cand, std::span<const double> ref,
                                     std::size_t j, WeightKind w) noexcept {
  const double cj = cand[j];
  if (w == WeightKind::GloballyBalanced)
    return detail::lse_terms(ref.size(), [&](std::size_t i) { return cj + ref[i]; }, true);
  return detail::lse_terms(ref.size(), [&](std::size_t i) { return 0.5 * (cj + ref[i]); }, true);
}

/// log alpha_1^j: log acceptance probability given candidate j was selected.
inline double multi_try_log_alpha1(std::span<const double> cand, std::span<const double> ref, std::size_t j,
                                   WeightKind w) noexcept {
  const double v = multi_try_log_forward(cand, j, w) - multi_try_log_backward(cand, ref, j, w);
  return std::isnan(v) ? kNegInf : std::min(0.0, v);
}

/// log of the probability that candidate j is selected.
inline double multi_try_log_selection(std::span<const double> cand, std::size_t j, WeightKind w) noexcept {
  const double lw = log_weight(cand[j], w);
  if (lw == kNegInf) return kNegInf;
  return lw - detail::lse_terms(cand.size(), [&](std::size_t i) { return log_weight(cand[i], w); }, false);
}

/// log alpha_2^j: log probability of selecting candidate j and accepting it.
inline double multi_try_log_alpha2(std::span<const double> cand, std::span<const double> ref, std::size_t j,
                                   WeightKind w) noexcept {
  const double cj = cand[j];
  if (cj == kNegInf) return kNegInf;
  const double a = cj - multi_try_log_forward(cand, j, w);
  const double b = cj - multi_try_log_backward(cand, ref, j, w);
  return std::min(a, b);
}

}  // namespace smtm

#pragma once

// One-step transition kernels: random-walk Metropolis (RWM), Euclidean
// multiple-try Metropolis (MTM), stereographic random walk (SRWM), the
// stereographic multiple-try kernel (SMTM), and a Monte Carlo approximation
// of the N -> infinity "ideal" scheme.
//
// Every random draw inside a step comes from a substream keyed by
// (seed, chain, iteration, purpose, index), so a step is a pure function of
// its inputs and the same whether candidates are evaluated serially or by an
// OpenMP team.
//
// Proposals that land within kNorthPoleGuard of the north pole get
// log-density -inf: they are never selected and, when no candidate survives,
// the step is an ordinary rejection.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "smtm/geometry.hpp"
#include "smtm/multi_try.hpp"
#include "smtm/rng.hpp"
#include "smtm/targets.hpp"

namespace smtm {

enum class KernelKind { RWM, MTM, SRWM, SMTM, Ideal };

std::string_view to_string(KernelKind k) noexcept;
KernelKind parse_kernel_kind(std::string_view s);

inline bool is_sphere_kernel(KernelKind k) noexcept {
  return k == KernelKind::SRWM || k == KernelKind::SMTM || k == KernelKind::Ideal;
}

struct KernelConfig {
  KernelKind kind = KernelKind::RWM;
  int n_candidates = 1;
  WeightKind weight = WeightKind::GloballyBalanced;
  /// Euclidean proposal std-dev for RWM/MTM, sphere step h otherwise.
  double step = 1.0;
  /// Required for sphere kernels.
  std::optional<StereoChart> chart;
  /// Inner Monte Carlo size for the ideal scheme.
  int ideal_inner_m = 256;
  /// Candidate evaluation fans out to OpenMP when N >= threshold. <= 0 disables.
  int parallel_threshold = 8;
  /// Also estimate alpha_1 for candidate 1 with its own reference draws.
  bool record_first_candidate_alpha = false;

  /// Throws InvalidArgument on inconsistent settings for dimension d.
  void validate(int d) const;
  std::string label() const;
};

struct ChainState {
  Vector x;
  double log_target = 0.0;
};

ChainState make_state(const Target& target, Vector x);

struct StepContext {
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  std::uint64_t iteration = 0;

  rng::Engine stream(rng::Purpose purpose, std::uint64_t index = 0) const noexcept {
    return rng::substream({seed, chain, iteration, purpose, index});
  }
};

struct StepResult {
  ChainState next;
  bool accepted = false;
  /// One-based index of the selected candidate in [1, N]; empty when nothing was selectable.
  std::optional<int> chosen_index;
  /// Acceptance probability actually used for the selected candidate.
  double alpha = 0.0;
  /// log P(select chosen candidate | current, candidates).
  double log_selection = 0.0;
  /// |chosen candidate - current|^2, zero when nothing was selected.
  double candidate_sq_jump = 0.0;
  /// alpha_1 of candidate 1 with independent references (NaN unless requested).
  double first_candidate_alpha = std::numeric_limits<double>::quiet_NaN();
  /// |candidate 1 - current|^2 * first_candidate_alpha (NaN unless requested).
  double first_candidate_weighted_jump = std::numeric_limits<double>::quiet_NaN();

  /// alpha_2 of the chosen candidate: selection probability times alpha.
  double joint_alpha() const noexcept { return chosen_index ? std::exp(log_selection) * alpha : 0.0; }
};

/// Index distributed proportionally to exp(log_weights), via Gumbel-max.
/// Throws AllWeightsDegenerate when every weight is -inf.
std::size_t select_candidate(std::span<const double> log_weights, rng::Engine& eng);

StepResult rwm_step(const Target& target, const ChainState& current, double step, const StepContext& ctx);
StepResult mtm_step(const Target& target, const ChainState& current, const KernelConfig& config,
                    const StepContext& ctx);
StepResult srwm_step(const Target& target, const ChainState& current, const KernelConfig& config,
                     const StepContext& ctx);
StepResult smtm_step(const Target& target, const ChainState& current, const KernelConfig& config,
                     const StepContext& ctx);
/// Approximate ideal scheme; a diagnostic, not an exactly pi-invariant sampler.
StepResult ideal_step(const Target& target, const ChainState& current, const KernelConfig& config,
                      const StepContext& ctx);

StepResult kernel_step(const Target& target, const ChainState& current, const KernelConfig& config,
                       const StepContext& ctx);

}  // namespace smtm

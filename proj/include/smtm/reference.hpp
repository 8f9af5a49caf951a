#pragma once

// Plain serial re-implementations used as test oracles and benchmark
// baselines. They consume the same keyed substreams as the optimized code but
// evaluate everything in the most direct way: candidates one at a time,
// acceptance from materialized log-sum-exp vectors, Monte Carlo averages
// accumulated sample by sample.

#include <cstdint>

#include "smtm/kernels.hpp"
#include "smtm/scaling.hpp"

namespace smtm::reference {

/// Serial MTM / SMTM step (config.kind must be MTM or SMTM).
StepResult multi_try_step(const Target& target, const ChainState& current, const KernelConfig& config,
                          const StepContext& ctx);

/// Serial estimates of N E[phi_2^1] and N ell^2 E[phi_1^1].
struct LimitPair {
  McEstimate acceptance;
  McEstimate esjd;
};
LimitPair limit_functionals(const ScalingParams& p, std::size_t n_samples, std::uint64_t seed);

}  // namespace smtm::reference

#pragma once

#include <cstdint>
#include <functional>

#include "smtm/diagnostics.hpp"
#include "smtm/kernels.hpp"

namespace smtm {

struct ChainSpec {
  KernelConfig kernel;
  Vector x0;
  std::uint64_t iterations = 1000;
  std::uint64_t burn_in = 0;
  std::uint64_t thinning = 1;
  Retention retention = Retention::Full;
  std::uint64_t seed = 0;
  std::uint64_t chain_id = 0;
  /// Optional early stop, checked after every transition.
  std::function<bool(std::uint64_t iter, const ChainState&)> stop;
};

/// Runs iterations 1..spec.iterations (or until `stop` fires) and returns the trace.
ChainTrace run_chain(const Target& target, const ChainSpec& spec);

}  // namespace smtm

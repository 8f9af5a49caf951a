#include "smtm/chain.hpp"

#include "smtm/error.hpp"

namespace smtm {

ChainTrace run_chain(const Target& target, const ChainSpec& spec) {
  if (spec.x0.size() != static_cast<std::size_t>(target.dim()))
    throw Error(ErrorCode::DimensionMismatch, "initial state does not match target dimension");
  spec.kernel.validate(target.dim());

  ChainTrace trace(target.dim(), spec.retention, spec.burn_in, spec.thinning);
  trace.start(spec.x0);
  ChainState state = make_state(target, spec.x0);
  StepContext ctx{spec.seed, spec.chain_id, 0};
  for (std::uint64_t t = 1; t <= spec.iterations; ++t) {
    ctx.iteration = t;
    StepResult step = kernel_step(target, state, spec.kernel, ctx);
    trace.record(t, state.x, step);
    state = std::move(step.next);
    if (spec.stop && spec.stop(t, state)) break;
  }
  return trace;
}

}  // namespace smtm

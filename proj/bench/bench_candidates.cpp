// Candidate evaluation throughput: serial reference, optimized serial, and
// optimized with the OpenMP candidate map. All three produce the same chain.
//
//   smtm_bench [--dim D] [--steps T] [--n N ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "smtm/kernels.hpp"
#include "smtm/parallel.hpp"
#include "smtm/reference.hpp"
#include "smtm/scaling.hpp"
#include "smtm/targets.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class Step>
double time_chain(int steps, smtm::ChainState state, Step&& step, smtm::Vector& final_x) {
  const auto t0 = Clock::now();
  for (int t = 1; t <= steps; ++t) state = step(state, smtm::StepContext{11, 0, static_cast<std::uint64_t>(t)}).next;
  final_x = state.x;
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SMTM candidate-evaluation benchmark"};
  int d = 50;
  int steps = 200;
  std::vector<int> ns{8, 32, 128, 512};
  app.add_option("--dim", d)->capture_default_str();
  app.add_option("--steps", steps)->capture_default_str();
  app.add_option("--n", ns)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const int workers = smtm::configure_workers();
  const smtm::Target target = smtm::Target::product_iid(smtm::StudentTComponent{5.0, 0.0, 1.0}, d);
  const smtm::ChainState start = smtm::make_state(target, smtm::Vector(static_cast<std::size_t>(d), 1.0));
  std::printf("d = %d, %d steps, %d worker(s)\n", d, steps, workers);
  std::printf("%6s %14s %14s %14s %10s %10s\n", "N", "reference ms", "serial ms", "openmp ms", "speedup", "identical");
  for (int n : ns) {
    smtm::KernelConfig k;
    k.kind = smtm::KernelKind::SMTM;
    k.n_candidates = n;
    k.chart = smtm::StereoChart(d, std::sqrt(static_cast<double>(d)));
    k.step = smtm::ell_to_h(d, 1.0, 2.38);
    smtm::KernelConfig serial = k, openmp = k;
    serial.parallel_threshold = 0;
    openmp.parallel_threshold = 1;
    smtm::Vector xr, xs, xp;
    const double tr = time_chain(steps, start, [&](const auto& s, const auto& c) {
      return smtm::reference::multi_try_step(target, s, serial, c);
    }, xr);
    const double ts = time_chain(steps, start, [&](const auto& s, const auto& c) {
      return smtm::smtm_step(target, s, serial, c);
    }, xs);
    const double tp = time_chain(steps, start, [&](const auto& s, const auto& c) {
      return smtm::smtm_step(target, s, openmp, c);
    }, xp);
    std::printf("%6d %14.2f %14.2f %14.2f %10.2f %10s\n", n, 1e3 * tr, 1e3 * ts, 1e3 * tp, ts / tp,
                (xr == xs && xs == xp) ? "yes" : "NO");
  }
  return 0;
}

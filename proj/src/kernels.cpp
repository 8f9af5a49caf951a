#include "smtm/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "smtm/error.hpp"
#include "smtm/logsumexp.hpp"
#include "smtm/parallel.hpp"

namespace smtm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double sq_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = a[i] - b[i];
    s += u * u;
  }
  return s;
}

double alpha_from_log(double log_alpha) noexcept { return log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha); }

StepResult rejected(const ChainState& current) {
  StepResult r;
  r.next = current;
  return r;
}

bool accept_draw(const StepContext& ctx, double alpha) {
  auto eng = ctx.stream(rng::Purpose::Accept);
  return rng::uniform01(eng) < alpha;
}

// A proposal space knows how to represent the current state and how to draw
// one proposal around a point. `log_density` is the density the kernel
// targets in that space (pi for Euclidean kernels, pi_S for sphere kernels).

struct EuclideanSpace {
  const Target& target;
  double step;

  struct Sample {
    Vector x;
    double log_target;
    double log_density;
  };

  Sample current(const ChainState& s) const { return {s.x, s.log_target, s.log_target}; }

  Sample draw(const Sample& origin, rng::Engine& eng) const {
    std::normal_distribution<double> normal(0.0, step);
    Vector y(origin.x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = origin.x[i] + normal(eng);
    const double lp = target.log_density(y);
    return {std::move(y), lp, lp};
  }

  static bool same_point(const Sample& a, const Sample& b) { return a.x == b.x; }
};

struct SphereSpace {
  const Target& target;
  const StereoChart& chart;
  double h;

  struct Sample {
    SpherePoint z;
    Vector x;
    double log_target;
    double log_density;
  };

  Sample current(const ChainState& s) const {
    return {sp_inverse(chart, s.x), s.x, s.log_target, log_sphere_density_at(chart, s.x, s.log_target)};
  }

  Sample draw(const Sample& origin, rng::Engine& eng) const {
    SpherePoint z = tangent_rw_propose(chart, origin.z, h, eng);
    if (z.near_north_pole()) return {std::move(z), {}, kNegInf, kNegInf};
    Vector x = sp_forward(chart, z);
    const double lp = target.log_density(x);
    const double lps = log_sphere_density_at(chart, x, lp);
    return {std::move(z), std::move(x), lp, lps};
  }

  static bool same_point(const Sample& a, const Sample& b) { return a.z == b.z; }
};

template <class Space>
std::vector<typename Space::Sample> draw_batch(const Space& space, const typename Space::Sample& origin,
                                               std::size_t n, const StepContext& ctx, rng::Purpose purpose,
                                               bool parallel) {
  std::vector<std::optional<typename Space::Sample>> slots(n);
  parallel_for(parallel, n, [&](std::size_t i) {
    auto eng = ctx.stream(purpose, i);
    slots[i].emplace(space.draw(origin, eng));
  });
  std::vector<typename Space::Sample> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template <class Sample>
std::vector<double> log_ratios(const std::vector<Sample>& samples, double base) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out[i] = samples[i].log_density == kNegInf ? kNegInf : samples[i].log_density - base;
  return out;
}

bool wants_parallel(const KernelConfig& cfg, std::size_t n) {
  return cfg.parallel_threshold > 0 && n >= static_cast<std::size_t>(cfg.parallel_threshold);
}

std::optional<std::size_t> select_or_none(std::span<const double> cand, WeightKind w, const StepContext& ctx) {
  if (cand.size() == 1) {
    if (cand[0] == kNegInf) return std::nullopt;
    return 0;
  }
  std::vector<double> lw(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) lw[i] = log_weight(cand[i], w);
  auto eng = ctx.stream(rng::Purpose::Select);
  try {
    return select_candidate(lw, eng);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AllWeightsDegenerate) return std::nullopt;
    throw;
  }
}

template <class Space>
StepResult multi_try_step(const Space& space, const ChainState& current, const KernelConfig& cfg,
                          const StepContext& ctx) {
  const auto origin = space.current(current);
  const auto n = static_cast<std::size_t>(cfg.n_candidates);
  const bool parallel = wants_parallel(cfg, n);

  const auto cands = draw_batch(space, origin, n, ctx, rng::Purpose::Candidate, parallel);
  const auto cand = log_ratios(cands, origin.log_density);

  StepResult res = rejected(current);

  if (cfg.record_first_candidate_alpha) {
    const auto diag_refs = draw_batch(space, cands[0], n - 1, ctx, rng::Purpose::DiagnosticReference, parallel);
    const auto diag_ref = log_ratios(diag_refs, cands[0].log_density);
    res.first_candidate_alpha = alpha_from_log(multi_try_log_alpha1(cand, diag_ref, 0, cfg.weight));
    res.first_candidate_weighted_jump =
        cand[0] == -std::numeric_limits<double>::infinity() ? 0.0
                                                             : sq_distance(cands[0].x, current.x) * res.first_candidate_alpha;
  }

  const auto chosen = select_or_none(cand, cfg.weight, ctx);
  if (!chosen) return res;
  const std::size_t j = *chosen;

  const auto refs = draw_batch(space, cands[j], n - 1, ctx, rng::Purpose::Reference, parallel);
  const auto ref = log_ratios(refs, cands[j].log_density);

  res.chosen_index = static_cast<int>(j) + 1;
  res.alpha = alpha_from_log(multi_try_log_alpha1(cand, ref, j, cfg.weight));
  res.log_selection = n == 1 ? 0.0 : multi_try_log_selection(cand, j, cfg.weight);
  res.candidate_sq_jump = sq_distance(cands[j].x, current.x);
  if (accept_draw(ctx, res.alpha)) {
    res.accepted = true;
    res.next = ChainState{cands[j].x, cands[j].log_target};
  }
  return res;
}

const StereoChart& require_chart(const KernelConfig& cfg) {
  if (!cfg.chart) throw Error(ErrorCode::InvalidArgument, "sphere kernel needs a chart");
  return *cfg.chart;
}

}  // namespace

std::string_view to_string(WeightKind w) noexcept {
  return w == WeightKind::GloballyBalanced ? "GB" : "LB";
}

WeightKind parse_weight(std::string_view s) {
  const auto v = lower(s);
  if (v == "gb" || v == "global" || v == "globally_balanced") return WeightKind::GloballyBalanced;
  if (v == "lb" || v == "local" || v == "locally_balanced") return WeightKind::LocallyBalanced;
  throw Error(ErrorCode::ConfigError, "unknown weight '" + std::string(s) + "' (expected gb or lb)");
}

std::string_view to_string(KernelKind k) noexcept {
  switch (k) {
    case KernelKind::RWM: return "RWM";
    case KernelKind::MTM: return "MTM";
    case KernelKind::SRWM: return "SRWM";
    case KernelKind::SMTM: return "SMTM";
    case KernelKind::Ideal: return "Ideal";
  }
  return "?";
}

KernelKind parse_kernel_kind(std::string_view s) {
  const auto v = lower(s);
  if (v == "rwm") return KernelKind::RWM;
  if (v == "mtm") return KernelKind::MTM;
  if (v == "srwm" || v == "sps") return KernelKind::SRWM;
  if (v == "smtm") return KernelKind::SMTM;
  if (v == "ideal") return KernelKind::Ideal;
  throw Error(ErrorCode::ConfigError, "unknown kernel '" + std::string(s) + "'");
}

void KernelConfig::validate(int d) const {
  if (n_candidates < 1) throw Error(ErrorCode::InvalidArgument, "n_candidates must be >= 1");
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  if ((kind == KernelKind::RWM || kind == KernelKind::SRWM) && n_candidates != 1)
    throw Error(ErrorCode::InvalidArgument, "single-proposal kernels use N = 1");
  if (is_sphere_kernel(kind)) {
    if (!chart) throw Error(ErrorCode::InvalidArgument, "sphere kernel needs a chart");
    if (chart->dim() != d) throw Error(ErrorCode::DimensionMismatch, "chart dimension differs from target");
  }
  if (kind == KernelKind::Ideal && ideal_inner_m < 2)
    throw Error(ErrorCode::InvalidArgument, "ideal scheme needs at least 2 inner draws");
}

std::string KernelConfig::label() const {
  switch (kind) {
    case KernelKind::RWM:
    case KernelKind::SRWM: return std::string(to_string(kind));
    case KernelKind::MTM:
    case KernelKind::SMTM:
      return std::string(to_string(weight)) + "-" + std::string(to_string(kind)) + " N=" +
             std::to_string(n_candidates);
    case KernelKind::Ideal:
      return std::string(to_string(weight)) + "-Ideal M=" + std::to_string(ideal_inner_m);
  }
  return "?";
}

ChainState make_state(const Target& target, Vector x) {
  const double lp = target.log_density(x);
  return {std::move(x), lp};
}

std::size_t select_candidate(std::span<const double> log_weights, rng::Engine& eng) {
  std::size_t best = log_weights.size();
  double best_key = kNegInf;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double g = rng::standard_gumbel(eng);
    if (log_weights[i] == kNegInf || std::isnan(log_weights[i])) continue;
    const double key = log_weights[i] + g;
    if (best == log_weights.size() || key > best_key) {
      best = i;
      best_key = key;
    }
  }
  if (best == log_weights.size()) throw Error(ErrorCode::AllWeightsDegenerate, "every log-weight is -inf");
  return best;
}

StepResult rwm_step(const Target& target, const ChainState& current, double step, const StepContext& ctx) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  auto eng = ctx.stream(rng::Purpose::Candidate, 0);
  std::normal_distribution<double> normal(0.0, step);
  Vector y(current.x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = current.x[i] + normal(eng);
  const double lp = target.log_density(y);

  StepResult res = rejected(current);
  res.chosen_index = 1;
  res.alpha = alpha_from_log(std::min(0.0, lp - current.log_target));
  res.candidate_sq_jump = sq_distance(y, current.x);
  if (accept_draw(ctx, res.alpha)) {
    res.accepted = true;
    res.next = ChainState{std::move(y), lp};
  }
  return res;
}

StepResult mtm_step(const Target& target, const ChainState& current, const KernelConfig& config,
                    const StepContext& ctx) {
  config.validate(target.dim());
  return multi_try_step(EuclideanSpace{target, config.step}, current, config, ctx);
}

StepResult srwm_step(const Target& target, const ChainState& current, const KernelConfig& config,
                     const StepContext& ctx) {
  config.validate(target.dim());
  const StereoChart& chart = require_chart(config);
  const SpherePoint z = sp_inverse(chart, current.x);
  const double lps = log_sphere_density_at(chart, current.x, current.log_target);

  auto eng = ctx.stream(rng::Purpose::Candidate, 0);
  const SpherePoint zhat = tangent_rw_propose(chart, z, config.step, eng);
  StepResult res = rejected(current);
  if (zhat.near_north_pole()) return res;

  Vector xhat = sp_forward(chart, zhat);
  const double lp = target.log_density(xhat);
  const double lps_hat = log_sphere_density_at(chart, xhat, lp);

  res.chosen_index = 1;
  res.alpha = alpha_from_log(std::min(0.0, lps_hat - lps));
  res.candidate_sq_jump = sq_distance(xhat, current.x);
  if (accept_draw(ctx, res.alpha)) {
    res.accepted = true;
    res.next = ChainState{std::move(xhat), lp};
  }
  return res;
}

StepResult smtm_step(const Target& target, const ChainState& current, const KernelConfig& config,
                     const StepContext& ctx) {
  config.validate(target.dim());
  return multi_try_step(SphereSpace{target, require_chart(config), config.step}, current, config, ctx);
}

StepResult ideal_step(const Target& target, const ChainState& current, const KernelConfig& config,
                      const StepContext& ctx) {
  config.validate(target.dim());
  const SphereSpace space{target, require_chart(config), config.step};
  const auto m = static_cast<std::size_t>(config.ideal_inner_m);
  const bool parallel = wants_parallel(config, m);
  const double log_m = std::log(static_cast<double>(m));

  const auto origin = space.current(current);
  const auto fwd = draw_batch(space, origin, m, ctx, rng::Purpose::IdealForward, parallel);
  const auto cand = log_ratios(fwd, origin.log_density);

  StepResult res = rejected(current);
  const auto chosen = select_or_none(cand, config.weight, ctx);
  if (!chosen) return res;
  const std::size_t j = *chosen;

  std::vector<double> lw(m);
  for (std::size_t i = 0; i < m; ++i) lw[i] = log_weight(cand[i], config.weight);
  // Monte Carlo estimates of the normalizer of the weight-tilted proposal,
  // int omega(., y) Q_S(., y) dy, at the current point and at the candidate.
  const double log_norm_fwd = log_sum_exp(lw) - log_m;
  double log_norm_bwd = log_norm_fwd;
  if (!SphereSpace::same_point(fwd[j], origin)) {
    const auto bwd = draw_batch(space, fwd[j], m, ctx, rng::Purpose::IdealBackward, parallel);
    const auto back = log_ratios(bwd, fwd[j].log_density);
    std::vector<double> lwb(m);
    for (std::size_t i = 0; i < m; ++i) lwb[i] = log_weight(back[i], config.weight);
    log_norm_bwd = log_sum_exp(lwb) - log_m;
  }

  const double lj = cand[j];
  const double log_alpha =
      lj + log_weight(-lj, config.weight) - log_weight(lj, config.weight) + log_norm_fwd - log_norm_bwd;

  res.chosen_index = static_cast<int>(j) + 1;
  res.alpha = alpha_from_log(std::isnan(log_alpha) ? kNegInf : std::min(0.0, log_alpha));
  res.log_selection = multi_try_log_selection(cand, j, config.weight);
  res.candidate_sq_jump = sq_distance(fwd[j].x, current.x);
  if (accept_draw(ctx, res.alpha)) {
    res.accepted = true;
    res.next = ChainState{fwd[j].x, fwd[j].log_target};
  }
  return res;
}

StepResult kernel_step(const Target& target, const ChainState& current, const KernelConfig& config,
                       const StepContext& ctx) {
  switch (config.kind) {
    case KernelKind::RWM: config.validate(target.dim()); return rwm_step(target, current, config.step, ctx);
    case KernelKind::MTM: return mtm_step(target, current, config, ctx);
    case KernelKind::SRWM: return srwm_step(target, current, config, ctx);
    case KernelKind::SMTM: return smtm_step(target, current, config, ctx);
    case KernelKind::Ideal: return ideal_step(target, current, config, ctx);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown kernel kind");
}

}  // namespace smtm

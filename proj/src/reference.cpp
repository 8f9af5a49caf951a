#include "smtm/reference.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "smtm/error.hpp"
#include "smtm/logsumexp.hpp"

namespace smtm::reference {

namespace {

struct Point {
  Vector x;
  double log_target = kNegInf;
  double log_density = kNegInf;  // pi or pi_S
  std::optional<SpherePoint> z;
};

Point propose(const Target& target, const KernelConfig& cfg, const Point& from, rng::Engine& eng) {
  Point p;
  if (cfg.kind == KernelKind::MTM) {
    std::normal_distribution<double> normal(0.0, cfg.step);
    p.x.resize(from.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) p.x[i] = from.x[i] + normal(eng);
    p.log_target = target.log_density(p.x);
    p.log_density = p.log_target;
    return p;
  }
  p.z = tangent_rw_propose(*cfg.chart, *from.z, cfg.step, eng);
  if (p.z->near_north_pole()) return p;
  p.x = sp_forward(*cfg.chart, *p.z);
  p.log_target = target.log_density(p.x);
  p.log_density = p.log_target + cfg.chart->log_jacobian(p.x);
  return p;
}

}  // namespace

StepResult multi_try_step(const Target& target, const ChainState& current, const KernelConfig& config,
                          const StepContext& ctx) {
  if (config.kind != KernelKind::MTM && config.kind != KernelKind::SMTM)
    throw Error(ErrorCode::InvalidArgument, "reference step covers MTM and SMTM only");
  config.validate(target.dim());
  const bool gb = config.weight == WeightKind::GloballyBalanced;
  const std::size_t n = static_cast<std::size_t>(config.n_candidates);

  Point cur{current.x, current.log_target, current.log_target, std::nullopt};
  if (config.kind == KernelKind::SMTM) {
    cur.z = sp_inverse(*config.chart, current.x);
    cur.log_density += config.chart->log_jacobian(current.x);
  }

  std::vector<Point> cands;
  std::vector<double> l(n), lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto eng = ctx.stream(rng::Purpose::Candidate, i);
    cands.push_back(propose(target, config, cur, eng));
    l[i] = cands[i].log_density == kNegInf ? kNegInf : cands[i].log_density - cur.log_density;
    lw[i] = gb ? l[i] : 0.5 * l[i];
  }

  StepResult res;
  res.next = current;
  if (config.record_first_candidate_alpha)
    throw Error(ErrorCode::InvalidArgument, "reference step does not record diagnostics");

  std::size_t j = 0;
  if (n > 1) {
    auto eng = ctx.stream(rng::Purpose::Select);
    double best = kNegInf;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = rng::standard_gumbel(eng);
      if (lw[i] == kNegInf) continue;
      if (!found || lw[i] + g > best) {
        best = lw[i] + g;
        j = i;
        found = true;
      }
    }
    if (!found) return res;
  } else if (l[0] == kNegInf) {
    return res;
  }

  std::vector<double> fwd(n), bwd;
  for (std::size_t i = 0; i < n; ++i) fwd[i] = gb ? l[i] : 0.5 * (l[i] + l[j]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto eng = ctx.stream(rng::Purpose::Reference, i);
    const Point r = propose(target, config, cands[j], eng);
    const double ri = r.log_density == kNegInf ? kNegInf : r.log_density - cands[j].log_density;
    bwd.push_back(gb ? l[j] + ri : 0.5 * (l[j] + ri));
  }
  bwd.push_back(0.0);

  const double log_ratio = log_sum_exp(fwd) - log_sum_exp(bwd);
  res.chosen_index = static_cast<int>(j) + 1;
  res.alpha = log_ratio >= 0.0 ? 1.0 : (std::isnan(log_ratio) ? 0.0 : std::exp(log_ratio));
  res.log_selection = n == 1 ? 0.0 : lw[j] - log_sum_exp(lw);
  double sq = 0.0;
  for (std::size_t i = 0; i < current.x.size(); ++i) sq += (cands[j].x[i] - current.x[i]) * (cands[j].x[i] - current.x[i]);
  res.candidate_sq_jump = sq;
  auto ueng = ctx.stream(rng::Purpose::Accept);
  if (rng::uniform01(ueng) < res.alpha) {
    res.accepted = true;
    res.next = ChainState{cands[j].x, cands[j].log_target};
  }
  return res;
}

LimitPair limit_functionals(const ScalingParams& p, std::size_t n_samples, std::uint64_t seed) {
  const LimitGaussian law = limit_gaussian(p);
  const double sd = std::sqrt(law.sigma2);
  const auto n = static_cast<std::size_t>(p.n);
  double sa = 0.0, sa2 = 0.0, se = 0.0, se2 = 0.0;
  std::vector<double> x(n), y(n - 1);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto ew = rng::substream({seed, 0, s, rng::Purpose::LimitW, 0});
    auto ev = rng::substream({seed, 0, s, rng::Purpose::LimitV, 0});
    std::normal_distribution<double> normal;
    for (double& v : x) v = law.mu + sd * normal(ew);
    normal.reset();
    for (double& v : y) v = law.mu + sd * normal(ev);
    const double a = static_cast<double>(n) * phi2(1, x, y, p.weight);
    const double e = static_cast<double>(n) * p.ell * p.ell * phi1(1, x, y, p.weight);
    sa += a;
    sa2 += a * a;
    se += e;
    se2 += e * e;
  }
  const double m = static_cast<double>(n_samples);
  auto finish = [m](double s, double s2) {
    const double mean = s / m;
    return McEstimate{mean, std::sqrt(std::max(0.0, (s2 - m * mean * mean) / (m - 1.0)) / m)};
  };
  return {finish(sa, sa2), finish(se, se2)};
}

}  // namespace smtm::reference

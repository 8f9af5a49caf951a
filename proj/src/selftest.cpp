#include "smtm/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "smtm/chain.hpp"
#include "smtm/config.hpp"
#include "smtm/diagnostics.hpp"
#include "smtm/error.hpp"
#include "smtm/experiments.hpp"
#include "smtm/geometry.hpp"
#include "smtm/kernels.hpp"
#include "smtm/rng.hpp"
#include "smtm/scaling.hpp"
#include "smtm/targets.hpp"

namespace smtm {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

Vector random_unit(std::size_t n, rng::Engine& eng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& a : v) a = g(eng);
  const double r = norm(v);
  for (double& a : v) a /= r;
  return v;
}

// f = N(0.5, 0.75): unit second moment, I = 4/3.
constexpr double kHalfMean = 0.5;
constexpr double kHalfVariance = 0.75;

ScalingParams half_gaussian_params(int n, WeightKind w, double ell) {
  ScalingParams p;
  p.d = 1000;
  p.lambda = 1.0;
  p.ell = ell;
  p.n = n;
  p.weight = w;
  p.fisher = fisher_moment(GaussianComponent{kHalfMean, kHalfVariance});
  return p;
}

// ------------------------------------------------------------ criterion 1

CriterionResult geometry_round_trip() {
  constexpr int kInputsPerDim = 2500;  // x 4 dimensions = 1e4
  constexpr double kTolerance = 1e-10;
  CriterionResult r{1, "geometry round trip", false, "", 0, 1.0};
  auto eng = rng::substream({101, 0, 0, rng::Purpose::Test, 0});
  std::uniform_real_distribution<double> log_dist(-6.0, 6.0);
  // R >= 1/sqrt(2) keeps |x - center| <= 1e6 outside the north-pole guard.
  std::uniform_real_distribution<double> log_radius(0.0, 2.0);
  double worst_x = 0.0, worst_z = 0.0;
  for (int d : {1, 2, 10, 100}) {
    const auto n = static_cast<std::size_t>(d);
    for (int k = 0; k < kInputsPerDim; ++k) {
      const StereoChart chart(std::pow(10.0, log_radius(eng)), random_unit(n, eng));
      // x -> z -> x, distance from the center spread over [1e-6, 1e6].
      const double dist = std::pow(10.0, log_dist(eng));
      const Vector dir = random_unit(n, eng);
      Vector x = chart.center();
      for (std::size_t i = 0; i < n; ++i) x[i] += dist * dir[i];
      const Vector back = sp_forward(chart, sp_inverse(chart, x));
      Vector dx(n);
      for (std::size_t i = 0; i < n; ++i) dx[i] = back[i] - x[i];
      worst_x = std::max(worst_x, norm(dx) / dist);
      // z -> x -> z for a uniform sphere point.
      SpherePoint z = SpherePoint::unchecked(random_unit(n + 1, eng));
      if (z.near_north_pole()) continue;
      const SpherePoint z2 = sp_inverse(chart, sp_forward(chart, z));
      Vector dz(n + 1);
      for (std::size_t i = 0; i <= n; ++i) dz[i] = z2.coords()[i] - z.coords()[i];
      worst_z = std::max(worst_z, norm(dz));
    }
  }
  r.pass = worst_x <= kTolerance && worst_z <= kTolerance;
  r.detail = fmt("max relative error x->z->x %.2e, z->x->z %.2e (tolerance %.0e, 1e4 inputs each)", worst_x, worst_z,
                 kTolerance);
  return r;
}

// ------------------------------------------------------------ criterion 2

CriterionResult kernel_coupling() {
  constexpr std::uint64_t kSteps = 10000;
  CriterionResult r{2, "SMTM with N = 1 reproduces SRWM", false, "", 0, 5.0};
  const int d = 5;
  const Target target = Target::product_iid(StudentTComponent{3.0, 0.0, 1.0}, d);
  const StereoChart chart(d, std::sqrt(5.0));
  bool all_equal = true;
  std::string parts;
  for (WeightKind w : {WeightKind::GloballyBalanced, WeightKind::LocallyBalanced}) {
    KernelConfig srwm;
    srwm.kind = KernelKind::SRWM;
    srwm.step = 0.3;
    srwm.chart = chart;
    KernelConfig smtm = srwm;
    smtm.kind = KernelKind::SMTM;
    smtm.weight = w;
    ChainState a = make_state(target, Vector(d, 3.0));
    ChainState b = a;
    std::uint64_t accepted = 0, mismatches = 0;
    for (std::uint64_t t = 1; t <= kSteps; ++t) {
      const StepContext ctx{7, 0, t};
      const StepResult ra = srwm_step(target, a, srwm, ctx);
      const StepResult rb = smtm_step(target, b, smtm, ctx);
      if (ra.next.x != rb.next.x || ra.accepted != rb.accepted || ra.alpha != rb.alpha) ++mismatches;
      accepted += ra.accepted;
      a = ra.next;
      b = rb.next;
    }
    all_equal = all_equal && mismatches == 0;
    parts += fmt("%s: %llu mismatching steps of %llu (%llu accepted); ", to_string(w).data(),
                 static_cast<unsigned long long>(mismatches), static_cast<unsigned long long>(kSteps),
                 static_cast<unsigned long long>(accepted));
  }
  r.pass = all_equal;
  r.detail = parts.substr(0, parts.size() - 2);
  return r;
}

// ------------------------------------------------------------ criterion 3

CriterionResult phi_identities() {
  constexpr int kRandomInputs = 1000000;
  constexpr int kLipschitzPoints = 20000;
  constexpr double kLipschitzDrift = 0.1;  // |L(delta/2) / L(delta) - 1| per halving
  CriterionResult r{3, "phi-function identities", false, "", 0, 30.0};
  auto eng = rng::substream({103, 0, 0, rng::Purpose::Test, 0});
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<WeightKind> weights{WeightKind::GloballyBalanced, WeightKind::LocallyBalanced};
  const std::vector<double> empty;

  bool single_ok = true, zero_ok = true;
  for (int k = 0; k < 10000; ++k) {
    const std::vector<double> x{5.0 * g(eng)};
    const double want = std::min(1.0, std::exp(x[0]));
    for (WeightKind w : weights)
      single_ok = single_ok && phi1(1, x, empty, w) == want && phi2(1, x, empty, w) == want;
  }
  for (std::size_t n = 2; n <= 64; ++n) {
    const std::vector<double> x(n, 0.0), y(n - 1, 0.0);
    for (WeightKind w : weights)
      for (std::size_t j = 1; j <= n; ++j)
        zero_ok = zero_ok && phi1(j, x, y, w) == 1.0 && std::abs(phi2(j, x, y, w) - 1.0 / n) <= 1e-15;
  }

  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < kRandomInputs; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(eng) * 16);
    const double scale = std::pow(10.0, 3.0 * u(eng) - 1.0);  // 0.1 .. 100
    const double shift = scale * g(eng);
    std::vector<double> x(n), y(n - 1);
    for (double& v : x) v = shift + scale * g(eng);
    for (double& v : y) v = shift + scale * g(eng);
    const std::size_t j = 1 + static_cast<std::size_t>(u(eng) * static_cast<double>(n));
    const WeightKind w = weights[k % 2];
    for (double v : {phi1(j, x, y, w), phi2(j, x, y, w)}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const bool bounded = lo >= 0.0 && hi <= 1.0;

  // Empirical Lipschitz constant over fixed points and directions as the
  // finite-difference step halves: it settles instead of growing.
  struct Probe {
    std::size_t n, j;
    WeightKind w;
    std::vector<double> p, dir;
  };
  std::vector<Probe> probes;
  for (int k = 0; k < kLipschitzPoints; ++k) {
    Probe pr;
    pr.n = 1 + static_cast<std::size_t>(u(eng) * 8);
    pr.j = 1 + static_cast<std::size_t>(u(eng) * static_cast<double>(pr.n));
    pr.w = weights[k % 2];
    pr.p.resize(2 * pr.n - 1);
    for (double& v : pr.p) v = -0.5 + 1.5 * g(eng);
    pr.dir = random_unit(pr.p.size(), eng);
    probes.push_back(std::move(pr));
  }
  auto lipschitz = [&](double delta, bool first) {
    double best = 0.0;
    for (const auto& pr : probes) {
      std::vector<double> q(pr.p);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += delta * pr.dir[i];
      const std::span<const double> ps(pr.p), qs(q);
      auto f = [&](std::span<const double> v) {
        const auto x = v.first(pr.n);
        const auto y = v.subspan(pr.n);
        return first ? phi1(pr.j, x, y, pr.w) : phi2(pr.j, x, y, pr.w);
      };
      best = std::max(best, std::abs(f(qs) - f(ps)) / delta);
    }
    return best;
  };
  bool stable = true;
  std::string lips;
  for (bool first : {true, false}) {
    double prev = lipschitz(1e-3, first);
    lips += fmt("%s L:", first ? "phi1" : "phi2");
    lips += fmt(" %.4f", prev);
    for (double delta : {5e-4, 2.5e-4, 1.25e-4}) {
      const double cur = lipschitz(delta, first);
      stable = stable && std::abs(cur / prev - 1.0) <= kLipschitzDrift;
      lips += fmt(" %.4f", cur);
      prev = cur;
    }
    lips += "; ";
  }
  r.pass = single_ok && zero_ok && bounded && stable;
  r.detail = fmt("N=1 identity %s, zero-input identity %s, range over 1e6 inputs [%.3g, %.3g], ", single_ok ? "ok" : "FAILED",
                 zero_ok ? "ok" : "FAILED", lo, hi) +
             lips + fmt("max drift per halving %.2f", kLipschitzDrift);
  return r;
}

// ------------------------------------------------------------ criterion 4

CriterionResult optimal_acceptance() {
  constexpr std::size_t kSamples = 1000000;
  constexpr double kLo = 0.20, kHi = 0.27;
  CriterionResult r{4, "0.234 reproduction (GB, N = 1)", false, "", 0, 120.0};
  const auto res = optimize_ell(half_gaussian_params(1, WeightKind::GloballyBalanced, 1.0), EllGrid{0.5, 8.0, 50},
                                kSamples, 104);
  r.pass = res.acceptance.mean >= kLo && res.acceptance.mean <= kHi;
  r.detail = fmt("acceptance %.4f +- %.4f at ell* = %.3f (50-point grid on [0.5, 8], 1e6 samples; range [%.2f, %.2f])",
                 res.acceptance.mean, res.acceptance.std_error, res.ell, kLo, kHi);
  return r;
}

// ------------------------------------------------------------ criterion 5

CriterionResult large_n_limits() {
  constexpr std::size_t kSamples = 200000;
  constexpr double kEll = 1.0;
  constexpr double kNoise = 3.0;          // allowed upward (GB) / downward (LB) step, in standard errors
  constexpr double kGbLimitGap = 0.02;    // |GB(64) - GB(1)|
  constexpr double kLbAsymptoteFrac = 0.9;
  CriterionResult r{5, "large-N monotone acceptance limits", false, "", 0, 180.0};
  const std::vector<int> ns{1, 2, 4, 8, 16, 64};
  auto series = [&](WeightKind w) {
    std::vector<McEstimate> out;
    for (int n : ns) out.push_back(mc_limit_total_acceptance(half_gaussian_params(n, w, kEll), kSamples, 105));
    return out;
  };
  const auto gb = series(WeightKind::GloballyBalanced);
  const auto lb = series(WeightKind::LocallyBalanced);

  bool gb_mono = true, lb_mono = true;
  for (std::size_t i = 1; i < ns.size(); ++i) {
    const double se = std::max(gb[i].std_error, gb[i - 1].std_error);
    gb_mono = gb_mono && gb[i].mean <= gb[i - 1].mean + kNoise * se;
    const double se2 = std::max(lb[i].std_error, lb[i - 1].std_error);
    lb_mono = lb_mono && lb[i].mean >= lb[i - 1].mean - kNoise * se2;
  }
  const bool gb_limit = std::abs(gb.back().mean - gb.front().mean) <= kGbLimitGap;

  // Least-squares fit a + b / sqrt(N) over N >= 2; a is the asymptote.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t i = 1; i < ns.size(); ++i) {
    const double x = 1.0 / std::sqrt(static_cast<double>(ns[i]));
    sx += x;
    sy += lb[i].mean;
    sxx += x * x;
    sxy += x * lb[i].mean;
    ++m;
  }
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double a = (sy - b * sx) / m;
  const bool lb_asym = lb.back().mean >= kLbAsymptoteFrac * a;
  const bool lb_above = lb.back().mean > lb.front().mean;

  r.pass = gb_mono && gb_limit && lb_mono && lb_asym && lb_above;
  std::string gbs, lbs;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    gbs += fmt("%s%.4f", i ? " " : "", gb[i].mean);
    lbs += fmt("%s%.4f", i ? " " : "", lb[i].mean);
  }
  r.detail = fmt("ell=%.1f, N in {1,2,4,8,16,64}: GB [%s] non-increasing %s, |GB64-GB1|=%.4f (<= %.2f) %s; ", kEll,
                 gbs.c_str(), gb_mono ? "yes" : "NO", std::abs(gb.back().mean - gb.front().mean), kGbLimitGap,
                 gb_limit ? "ok" : "NO") +
             fmt("LB [%s] non-decreasing %s, asymptote %.4f, LB64 >= %.1f*asymptote %s, LB64 > LB1 %s", lbs.c_str(),
                 lb_mono ? "yes" : "NO", a, kLbAsymptoteFrac, lb_asym ? "yes" : "NO", lb_above ? "yes" : "NO");
  return r;
}

// ------------------------------------------------------------ criterion 6

CriterionResult finite_d_esjd() {
  constexpr int kDim = 200;
  constexpr int kN = 3;
  constexpr double kEll = 3.0;
  constexpr std::uint64_t kIterations = 100000;
  constexpr std::uint64_t kBurnIn = 1000;
  constexpr double kAlphaTolerance = 0.05;
  constexpr double kEsjdRelTolerance = 0.10;
  CriterionResult r{6, "finite-d ESJD vs limit (d = 200, GB, N = 3)", false, "", 0, 300.0};
  const GaussianComponent f{kHalfMean, kHalfVariance};
  const Target target = Target::product_iid(f, kDim);
  ChainSpec spec;
  spec.kernel.kind = KernelKind::SMTM;
  spec.kernel.n_candidates = kN;
  spec.kernel.weight = WeightKind::GloballyBalanced;
  spec.kernel.step = ell_to_h(kDim, 1.0, kEll);
  spec.kernel.chart = StereoChart(kDim, std::sqrt(static_cast<double>(kDim)));
  spec.kernel.record_first_candidate_alpha = true;
  spec.kernel.parallel_threshold = 0;
  // Exact stationary start.
  auto eng = rng::substream({106, 0, 0, rng::Purpose::Init, 0});
  std::normal_distribution<double> g(f.mean, std::sqrt(f.variance));
  spec.x0.resize(kDim);
  for (double& v : spec.x0) v = g(eng);
  spec.iterations = kIterations;
  spec.burn_in = kBurnIn;
  spec.retention = Retention::Summary;
  spec.thinning = kIterations;
  spec.seed = 106;
  const ChainTrace trace = run_chain(target, spec);
  const double alpha_emp = trace.mean_first_candidate_alpha().value();
  const double esjd_emp = kN * trace.mean_first_candidate_weighted_jump().value();

  ScalingParams p;
  p.d = kDim;
  p.lambda = 1.0;
  p.ell = kEll;
  p.n = kN;
  p.fisher = fisher_moment(f);
  const std::vector<double> ells{kEll};
  const auto lim = limit_curve(p, ells, 1000000, 106).front();
  const double alpha_gap = std::abs(alpha_emp - lim.alpha1.mean);
  const double esjd_rel = std::abs(esjd_emp / lim.esjd.mean - 1.0);
  r.pass = alpha_gap <= kAlphaTolerance && esjd_rel <= kEsjdRelTolerance;
  r.detail = fmt("ell=%.1f: E[alpha_1^1] chain %.4f vs E[phi_1] %.4f (|gap| %.4f <= %.2f); "
                 "N E[|X1-X|^2 alpha_1^1] chain %.4f vs N ell^2 E[phi_1] %.4f (rel %.3f <= %.2f); realized acceptance %.4f",
                 kEll, alpha_emp, lim.alpha1.mean, alpha_gap, kAlphaTolerance, esjd_emp, lim.esjd.mean, esjd_rel,
                 kEsjdRelTolerance, acceptance_rate(trace));
  return r;
}

// ------------------------------------------------------------ criterion 7

CriterionResult stationarity() {
  constexpr int kDim = 10;
  constexpr std::uint64_t kSamples = 200000;
  constexpr std::uint64_t kThinning = 10;
  constexpr std::uint64_t kBurnIn = 2000;
  constexpr double kKsThreshold = 0.02;
  constexpr double kSigmas = 4.0;
  CriterionResult r{7, "stationarity (GB-SMTM N = 5, Student-t(11), d = 10)", false, "", 0, 180.0};
  const StudentTComponent f{11.0, 0.0, 1.0};
  const Target target = Target::product_iid(f, kDim);
  const double lambda = 11.0 / 9.0;  // E|X|^2 / d
  ChainSpec spec;
  spec.kernel.kind = KernelKind::SMTM;
  spec.kernel.n_candidates = 5;
  spec.kernel.weight = WeightKind::GloballyBalanced;
  spec.kernel.chart = StereoChart(kDim, std::sqrt(lambda * kDim));
  spec.kernel.step = ell_to_h(kDim, lambda, 2.38);
  spec.kernel.parallel_threshold = 0;
  spec.x0 = Vector(kDim, 0.0);
  spec.burn_in = kBurnIn;
  spec.thinning = kThinning;
  spec.iterations = kBurnIn + kSamples * kThinning;
  spec.retention = Retention::Full;
  spec.seed = 107;
  const ChainTrace trace = run_chain(target, spec);
  const auto stat = trace.stationary_records();
  std::vector<double> x1;
  x1.reserve(stat.size());
  for (const auto& rec : stat) x1.push_back(rec.x1);
  const UnivariateComponent comp = f;
  const double ks = ks_distance(x1, [&](double t) { return component_cdf(comp, t); });
  const auto cubic = reversibility_stat(trace, [](auto a, auto b) { return a[0] * b[0] * b[0]; });
  const auto cross = reversibility_stat(trace, [](auto a, auto b) { return a[0] < b[1] ? 1.0 : 0.0; });
  const bool rev1 = std::abs(cubic.statistic) <= kSigmas * cubic.std_error;
  const bool rev2 = std::abs(cross.statistic) <= kSigmas * cross.std_error;
  r.pass = ks < kKsThreshold && rev1 && rev2 && x1.size() == kSamples;
  r.detail = fmt("KS(x1) %.4f on %zu samples (< %.2f); g = x1*y1^2: %.2f sigma, g = 1{x1 < y2}: %.2f sigma (<= %.0f); "
                 "acceptance %.3f",
                 ks, x1.size(), kKsThreshold, std::abs(cubic.statistic) / cubic.std_error,
                 std::abs(cross.statistic) / cross.std_error, kSigmas, acceptance_rate(trace));
  return r;
}

// ------------------------------------------------------------ criterion 8

CriterionResult pathology_avoidance() {
  constexpr int kDim = 10;
  constexpr int kN = 100;
  constexpr int kSeeds = 10;
  constexpr std::uint64_t kSmtmLimit = 1000;
  constexpr std::uint64_t kMtmCap = 20000;
  constexpr double kRadius = 5.0;
  constexpr int kMinSeeds = 9;
  constexpr double kFactor = 10.0;
  CriterionResult r{8, "pathology avoidance (GB, N = 100, Gaussian d = 10)", false, "", 0, 180.0};
  const Target target = Target::product_iid(GaussianComponent{0.0, 1.0}, kDim);
  auto crossing = [&](KernelConfig k, std::uint64_t seed, std::uint64_t cap) -> double {
    ChainSpec spec;
    spec.kernel = std::move(k);
    spec.x0 = Vector(kDim, 10.0);
    spec.iterations = cap;
    spec.retention = Retention::Summary;
    spec.thinning = cap;
    spec.seed = seed;
    std::optional<std::uint64_t> hit;
    spec.stop = [&](std::uint64_t t, const ChainState& s) {
      if (norm(s.x) <= kRadius) hit = t;
      return hit.has_value();
    };
    run_chain(target, spec);
    return hit ? static_cast<double>(*hit) : INFINITY;
  };
  KernelConfig smtm;
  smtm.kind = KernelKind::SMTM;
  smtm.n_candidates = kN;
  smtm.chart = StereoChart(kDim, std::sqrt(static_cast<double>(kDim)));
  smtm.step = ell_to_h(kDim, 1.0, 2.38);
  KernelConfig mtm;
  mtm.kind = KernelKind::MTM;
  mtm.n_candidates = kN;
  mtm.step = 2.38 / std::sqrt(static_cast<double>(kDim));
  std::vector<double> ts, tm;
  for (int s = 1; s <= kSeeds; ++s) {
    ts.push_back(crossing(smtm, static_cast<std::uint64_t>(s), kSmtmLimit));
    tm.push_back(crossing(mtm, static_cast<std::uint64_t>(s), kMtmCap));
  }
  const auto fast = std::count_if(ts.begin(), ts.end(), [](double t) { return t <= kSmtmLimit; });
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double ms = median(ts), mm = median(tm);
  r.pass = fast >= kMinSeeds && mm >= kFactor * ms;
  r.detail = fmt("GB-SMTM reached |x| <= %.0f within %llu iterations on %ld/%d seeds (need %d), median %.1f; "
                 "GB-MTM median %s%.0f (cap %llu) = %.1fx (need >= %.0fx)",
                 kRadius, static_cast<unsigned long long>(kSmtmLimit), static_cast<long>(fast), kSeeds, kMinSeeds, ms,
                 std::isinf(mm) ? ">" : "", std::isinf(mm) ? static_cast<double>(kMtmCap) : mm,
                 static_cast<unsigned long long>(kMtmCap), (std::isinf(mm) ? static_cast<double>(kMtmCap) : mm) / ms,
                 kFactor);
  return r;
}

// ------------------------------------------------------------ criterion 9

CriterionResult far_tail_floor() {
  constexpr int kDim = 10;
  constexpr int kTrials = 1000;
  constexpr int kInnerM = 256;
  constexpr double kNorm = 1e6;
  constexpr double kFloor = 0.05;
  CriterionResult r{9, "far-tail acceptance floor (ideal scheme, PolyTail)", false, "", 0, 60.0};
  const Target target = Target::poly_tail(2.0 * kDim + 1.0, kDim);
  KernelConfig k;
  k.kind = KernelKind::Ideal;
  k.ideal_inner_m = kInnerM;
  k.step = 0.5 / std::sqrt(static_cast<double>(kDim));
  k.chart = StereoChart(kDim, std::sqrt(static_cast<double>(kDim)));
  const ChainState x = make_state(target, Vector(kDim, kNorm / std::sqrt(static_cast<double>(kDim))));
  double sum = 0.0;
  int accepted = 0;
  for (int t = 1; t <= kTrials; ++t) {
    const StepResult s = ideal_step(target, x, k, StepContext{109, 0, static_cast<std::uint64_t>(t)});
    sum += s.alpha;
    accepted += s.accepted;
  }
  const double mean = sum / kTrials;
  r.pass = mean >= kFloor;
  r.detail = fmt("|x| = 1e6, h = 0.5/sqrt(d), M = %d: mean alpha %.4f over %d trials (>= %.2f), %d accepted", kInnerM,
                 mean, kTrials, kFloor, accepted);
  return r;
}

// ------------------------------------------------------------ criterion 10

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

CriterionResult determinism_and_budget() {
  constexpr double kPresetBudget = 300.0;
  CriterionResult r{10, "determinism and preset budget", false, "", 0, 2 * 8 * kPresetBudget};
  const auto root = std::filesystem::temp_directory_path() / ("smtm-selftest-" + std::to_string(::getpid()));
  bool ok = true;
  std::string parts;
  for (const auto& name : preset_names()) {
    const auto t0 = Clock::now();
    const RunResult a = run_preset(name, {}, root / name / "a");
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const RunResult b = run_preset(name, {}, root / name / "b");
    bool same = slurp(root / name / "a" / "manifest.json") == slurp(root / name / "b" / "manifest.json") &&
                a.files.size() == b.files.size();
    for (std::size_t i = 0; same && i < a.files.size(); ++i)
      same = a.files[i].path == b.files[i].path &&
             slurp(root / name / "a" / a.files[i].path) == slurp(root / name / "b" / b.files[i].path);
    // The manifest hashes must describe what is on disk.
    for (const auto& f : a.files) same = same && fnv1a64(slurp(root / name / "a" / f.path)) == f.fnv1a;
    const bool fast = secs <= kPresetBudget;
    ok = ok && same && fast;
    parts += fmt("%s %s %.1fs (%zu files); ", name.c_str(), same ? "identical" : "DIFFERS", secs, a.files.size());
  }
  std::error_code ec;
  std::filesystem::remove_all(root, ec);
  r.pass = ok;
  r.detail = parts + fmt("budget %.0f s per preset", kPresetBudget);
  return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
  const auto t0 = Clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = geometry_round_trip(); break;
    case 2: r = kernel_coupling(); break;
    case 3: r = phi_identities(); break;
    case 4: r = optimal_acceptance(); break;
    case 5: r = large_n_limits(); break;
    case 6: r = finite_d_esjd(); break;
    case 7: r = stationarity(); break;
    case 8: r = pathology_avoidance(); break;
    case 9: r = far_tail_floor(); break;
    case 10: r = determinism_and_budget(); break;
    default: throw Error(ErrorCode::InvalidArgument, "criterion must be in 1.." + std::to_string(kCriterionCount));
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.seconds > r.budget_seconds) {
    r.pass = false;
    r.detail += "; over runtime budget";
  }
  return r;
}

std::string format_result(const CriterionResult& r) {
  return fmt("criterion %d %s: %s: ", r.id, r.pass ? "PASS" : "FAIL", r.title.c_str()) + r.detail +
         fmt(" [%.1f s / %.0f s]", r.seconds, r.budget_seconds);
}

}  // namespace smtm

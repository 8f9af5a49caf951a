#include "smtm/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "smtm/error.hpp"
#include "smtm/parallel.hpp"
#include "smtm/rng.hpp"

namespace smtm {

namespace {

constexpr std::size_t kBlock = 8192;

void check_index(std::size_t j, std::size_t n, std::size_t m) {
  if (n == 0 || j < 1 || j > n) throw Error(ErrorCode::InvalidArgument, "phi index j must lie in [1, N]");
  if (m + 1 != n) throw Error(ErrorCode::DimensionMismatch, "phi expects N values of x and N-1 of y");
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) noexcept {
    sum += v;
    sum_sq += v * v;
  }
  void merge(const Moments& o) noexcept {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  McEstimate finish(std::size_t n) const noexcept {
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = n > 1 ? std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0)) : 0.0;
    return {mean, std::sqrt(var / nn)};
  }
};

struct CurveMoments {
  Moments acceptance;
  Moments esjd;
  Moments alpha1;

  void merge(const CurveMoments& o) noexcept {
    acceptance.merge(o.acceptance);
    esjd.merge(o.esjd);
    alpha1.merge(o.alpha1);
  }
};

}  // namespace

double radius_factor(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  return 4.0 * lambda / ((1.0 + lambda) * (1.0 + lambda));
}

double ScalingParams::curvature() const { return euclidean ? 0.0 : radius_factor(lambda); }

void ScalingParams::validate() const {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw Error(ErrorCode::InvalidArgument, "ell must be non-negative");
  if (!(fisher >= 0.0) || !std::isfinite(fisher)) throw Error(ErrorCode::InvalidArgument, "I must be non-negative");
  const double c = curvature();
  if (fisher < c) throw Error(ErrorCode::NegativeVariance, "I < 4 lambda / (1 + lambda)^2 gives a negative limit variance");
  if (!euclidean && !(ell * ell * c / (2.0 * d) < 1.0))
    throw Error(ErrorCode::OutOfRange, "ell^2 c / (2d) must be below 1");
}

double phi1(std::size_t j, std::span<const double> x, std::span<const double> y, WeightKind w) {
  check_index(j, x.size(), y.size());
  return std::exp(multi_try_log_alpha1(x, y, j - 1, w));
}

double phi2(std::size_t j, std::span<const double> x, std::span<const double> y, WeightKind w) {
  check_index(j, x.size(), y.size());
  return std::exp(multi_try_log_alpha2(x, y, j - 1, w));
}

LimitGaussian limit_gaussian(const ScalingParams& p) {
  p.validate();
  const double mu = 0.5 * p.ell * p.ell * (p.curvature() - p.fisher);
  return {mu, -2.0 * mu};
}

double ell_to_h(int d, double lambda, double ell) {
  if (d < 2) throw Error(ErrorCode::OutOfRange, "the ell <-> h relation needs d >= 2");
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw Error(ErrorCode::OutOfRange, "ell must be non-negative");
  const double a = ell * ell * radius_factor(lambda) / (2.0 * d);
  if (!(a < 1.0)) throw Error(ErrorCode::OutOfRange, "ell^2 c / (2d) must be below 1");
  // (1 - a)^-2 - 1 without cancellation for small a.
  return std::sqrt(std::expm1(-2.0 * std::log1p(-a)) / (d - 1.0));
}

double h_to_ell(int d, double lambda, double h) {
  if (d < 2) throw Error(ErrorCode::OutOfRange, "the ell <-> h relation needs d >= 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::OutOfRange, "h must be positive");
  const double a = -std::expm1(-0.5 * std::log1p(h * h * (d - 1.0)));
  return std::sqrt(2.0 * d * a / radius_factor(lambda));
}

std::vector<LimitCurvePoint> limit_curve(const ScalingParams& base, std::span<const double> ells,
                                         std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < kMinLimitSamples)
    throw Error(ErrorCode::InvalidArgument, "limit estimates need at least 1000 samples");
  if (ells.empty()) throw Error(ErrorCode::InvalidArgument, "empty ell grid");

  std::vector<LimitGaussian> laws;
  laws.reserve(ells.size());
  for (double ell : ells) {
    ScalingParams p = base;
    p.ell = ell;
    laws.push_back(limit_gaussian(p));
  }

  const auto n = static_cast<std::size_t>(base.n);
  const std::size_t blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<std::vector<CurveMoments>> partial(blocks, std::vector<CurveMoments>(ells.size()));

  parallel_for_dynamic(true, blocks, [&](std::size_t b) {
    std::vector<double> zw(n), zv(n - 1), x(n), y(n - 1);
    auto& acc = partial[b];
    const std::size_t end = std::min(n_samples, (b + 1) * kBlock);
    for (std::size_t s = b * kBlock; s < end; ++s) {
      // Sample s owns its substreams, so W_1..W_k are shared across every N >= k.
      auto ew = rng::substream({seed, 0, s, rng::Purpose::LimitW, 0});
      auto ev = rng::substream({seed, 0, s, rng::Purpose::LimitV, 0});
      std::normal_distribution<double> normal;
      for (double& v : zw) v = normal(ew);
      normal.reset();
      for (double& v : zv) v = normal(ev);
      for (std::size_t g = 0; g < ells.size(); ++g) {
        const double mu = laws[g].mu;
        const double sd = std::sqrt(laws[g].sigma2);
        for (std::size_t i = 0; i < n; ++i) x[i] = mu + sd * zw[i];
        for (std::size_t i = 0; i + 1 < n; ++i) y[i] = mu + sd * zv[i];
        const double a1 = std::exp(multi_try_log_alpha1(x, y, 0, base.weight));
        const double a2 = std::exp(multi_try_log_alpha2(x, y, 0, base.weight));
        acc[g].alpha1.add(a1);
        acc[g].esjd.add(static_cast<double>(n) * ells[g] * ells[g] * a1);
        acc[g].acceptance.add(static_cast<double>(n) * a2);
      }
    }
  });

  std::vector<LimitCurvePoint> out(ells.size());
  for (std::size_t g = 0; g < ells.size(); ++g) {
    CurveMoments total;
    for (std::size_t b = 0; b < blocks; ++b) total.merge(partial[b][g]);
    out[g] = {ells[g], total.acceptance.finish(n_samples), total.esjd.finish(n_samples),
              total.alpha1.finish(n_samples)};
  }
  return out;
}

McEstimate mc_limit_total_acceptance(const ScalingParams& p, std::size_t n_samples, std::uint64_t seed) {
  const double ell = p.ell;
  return limit_curve(p, std::span(&ell, 1), n_samples, seed).front().acceptance;
}

McEstimate mc_limit_esjd(const ScalingParams& p, std::size_t n_samples, std::uint64_t seed) {
  const double ell = p.ell;
  return limit_curve(p, std::span(&ell, 1), n_samples, seed).front().esjd;
}

std::vector<double> EllGrid::values() const {
  if (points < 1) throw Error(ErrorCode::InvalidArgument, "ell grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "ell grid needs 0 < lo <= hi");
  std::vector<double> v(static_cast<std::size_t>(points));
  if (points == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
  v.back() = hi;
  return v;
}

OptimizeResult optimize_ell(const ScalingParams& base, const EllGrid& grid, std::size_t n_samples,
                            std::uint64_t seed) {
  const auto ells = grid.values();
  OptimizeResult res;
  res.curve = limit_curve(base, ells, n_samples, seed);
  const auto best = std::max_element(res.curve.begin(), res.curve.end(),
                                     [](const auto& a, const auto& b) { return a.esjd.mean < b.esjd.mean; });
  res.ell = best->ell;
  res.esjd = best->esjd;
  res.acceptance = best->acceptance;
  return res;
}

}  // namespace smtm

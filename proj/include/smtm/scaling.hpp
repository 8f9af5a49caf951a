#pragma once

// High-dimensional limit objects for SMTM. As d -> infinity with
// R = sqrt(lambda d) and a product i.i.d. target, the log-ratios of the
// candidates become i.i.d. N(mu, sigma^2) with
//
//   mu = (ell^2 / 2) (c - I),  sigma^2 = -2 mu,  c = 4 lambda / (1 + lambda)^2,
//
// I = E_f[((log f)')^2]. The Euclidean kernels (RWM/MTM with step ell/sqrt(d))
// have the same structure with c = 0. The acceptance and ESJD limits are
// expectations of phi_1 / phi_2 under that law, estimated by Monte Carlo.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smtm/multi_try.hpp"

namespace smtm {

/// 4 lambda / (1 + lambda)^2.
double radius_factor(double lambda);

struct ScalingParams {
  int d = 1000;
  double lambda = 1.0;
  double ell = 1.0;
  int n = 1;
  double fisher = 1.0;
  WeightKind weight = WeightKind::GloballyBalanced;
  /// Limit of the Euclidean kernels (no sphere curvature term).
  bool euclidean = false;

  /// c in the formulas above; zero for the Euclidean kernels.
  double curvature() const;
  /// Throws InvalidArgument / NegativeVariance / OutOfRange on violated invariants.
  void validate() const;
};

struct LimitGaussian {
  double mu = 0.0;
  double sigma2 = 0.0;
};

/// phi_1^j with j one-based; x has N entries, y has N-1.
double phi1(std::size_t j, std::span<const double> x, std::span<const double> y, WeightKind w);
/// phi_2^j with j one-based.
double phi2(std::size_t j, std::span<const double> x, std::span<const double> y, WeightKind w);

/// Throws NegativeVariance when I < c.
LimitGaussian limit_gaussian(const ScalingParams& p);

/// Sphere step h for scale ell (d >= 2). Throws OutOfRange unless ell^2 c / (2d) < 1.
double ell_to_h(int d, double lambda, double ell);
/// Inverse of ell_to_h.
double h_to_ell(int d, double lambda, double h);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sum_j E[phi_2^j(W, V)] = N E[phi_2^1(W, V)].
McEstimate mc_limit_total_acceptance(const ScalingParams& p, std::size_t n_samples, std::uint64_t seed);

/// N ell^2 E[phi_1^1(W, V)].
McEstimate mc_limit_esjd(const ScalingParams& p, std::size_t n_samples, std::uint64_t seed);

/// Both functionals at several scales from one set of draws (common random
/// numbers): sample s uses the same standard normals for every ell.
struct LimitCurvePoint {
  double ell = 0.0;
  McEstimate acceptance;
  McEstimate esjd;
  /// E[phi_1^1]: acceptance given selection.
  McEstimate alpha1;
};

std::vector<LimitCurvePoint> limit_curve(const ScalingParams& base, std::span<const double> ells,
                                         std::size_t n_samples, std::uint64_t seed);

struct EllGrid {
  double lo = 0.1;
  double hi = 5.0;
  int points = 50;

  std::vector<double> values() const;
};

struct OptimizeResult {
  double ell = 0.0;
  McEstimate esjd;
  McEstimate acceptance;
  std::vector<LimitCurvePoint> curve;
};

/// Grid search for the ESJD-maximizing ell (common random numbers across the grid).
OptimizeResult optimize_ell(const ScalingParams& base, const EllGrid& grid, std::size_t n_samples,
                            std::uint64_t seed);

inline constexpr std::size_t kMinLimitSamples = 1000;

}  // namespace smtm

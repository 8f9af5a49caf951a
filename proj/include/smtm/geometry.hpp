#pragma once

// Stereographic projection between R^d and the unit sphere S^d in R^{d+1},
// with radius R and a location (center) parameter. The north pole
// (0, ..., 0, 1) has no image; points closer to it than `kNorthPoleGuard`
// (measured as 1 - z_{d+1}) are treated as singular.

#include <span>
#include <vector>

#include "smtm/rng.hpp"
#include "smtm/targets.hpp"

namespace smtm {

inline constexpr double kNorthPoleGuard = 1e-12;
inline constexpr double kSphereNormTolerance = 1e-10;

class SpherePoint {
 public:
  /// Throws InvalidArgument if |coords| differs from 1 by more than 1e-10.
  explicit SpherePoint(Vector coords);

  /// Skips validation; for results that are unit norm by construction.
  static SpherePoint unchecked(Vector coords) noexcept;

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t ambient_dim() const noexcept { return coords_.size(); }
  double height() const noexcept { return coords_.back(); }

  /// 1 - z_{d+1}, evaluated without cancellation near the north pole.
  double pole_gap() const noexcept;

  bool near_north_pole() const noexcept { return pole_gap() < kNorthPoleGuard; }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  struct NoCheck {};
  SpherePoint(Vector coords, NoCheck) noexcept : coords_(std::move(coords)) {}

  Vector coords_;
};

class StereoChart {
 public:
  /// Chart centered at the origin.
  StereoChart(int d, double radius);
  StereoChart(double radius, Vector center);

  int dim() const noexcept { return static_cast<int>(center_.size()); }
  double radius() const noexcept { return radius_; }
  const Vector& center() const noexcept { return center_; }

  /// |x - center|^2.
  double centered_sq_norm(std::span<const double> x) const noexcept;

  /// d * log(R^2 + |x - center|^2), the log-Jacobian of the lift to the sphere.
  double log_jacobian(std::span<const double> x) const noexcept;

 private:
  double radius_;
  Vector center_;
};

Vector sp_forward(const StereoChart& chart, const SpherePoint& z);
SpherePoint sp_inverse(const StereoChart& chart, std::span<const double> x);

/// log pi_S(z) = log pi(x) + d log(R^2 + |x - center|^2), x = SP(z).
double log_sphere_density(const StereoChart& chart, const Target& target, const SpherePoint& z);

/// Same quantity from a Euclidean point whose log pi is already known.
inline double log_sphere_density_at(const StereoChart& chart, std::span<const double> x,
                                    double log_target) noexcept {
  return log_target + chart.log_jacobian(x);
}

/// One draw from the tangent-space random walk on the sphere: Gaussian
/// N(0, h^2 I_{d+1}) noise projected onto the tangent plane at z, then
/// renormalized. The result may land near the north pole; guarding it is the
/// caller's job.
SpherePoint tangent_rw_propose(const StereoChart& chart, const SpherePoint& z, double h,
                               rng::Engine& eng);

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) noexcept;

/// Unnormalized log density of the tangent random-walk proposal at angular
/// distance theta from its origin (w.r.t. surface measure on S^d):
/// (d+1) log sec(theta) - tan^2(theta) / (2 h^2). -inf for theta >= pi/2.
double log_tangent_proposal_density(int d, double h, double theta) noexcept;

}  // namespace smtm

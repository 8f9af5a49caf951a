#include "smtm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "smtm/error.hpp"
#include "smtm/logsumexp.hpp"

namespace smtm {

SpherePoint::SpherePoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw Error(ErrorCode::InvalidArgument, "sphere point needs d + 1 >= 2 coordinates");
  const double n2 = std::inner_product(coords_.begin(), coords_.end(), coords_.begin(), 0.0);
  if (!(std::abs(std::sqrt(n2) - 1.0) <= kSphereNormTolerance))
    throw Error(ErrorCode::InvalidArgument, "sphere point is not unit norm");
}

SpherePoint SpherePoint::unchecked(Vector coords) noexcept { return SpherePoint(std::move(coords), NoCheck{}); }

double SpherePoint::pole_gap() const noexcept {
  const double h = coords_.back();
  if (h <= 0.0) return 1.0 - h;
  // 1 - h = (1 - h^2) / (1 + h) and 1 - h^2 = sum of the other squared coordinates.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < coords_.size(); ++i) s += coords_[i] * coords_[i];
  return s / (1.0 + h);
}

StereoChart::StereoChart(int d, double radius) : StereoChart(radius, Vector(d > 0 ? d : 0, 0.0)) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "chart dimension must be positive");
}

StereoChart::StereoChart(double radius, Vector center) : radius_(radius), center_(std::move(center)) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    throw Error(ErrorCode::InvalidArgument, "chart radius must be positive");
  if (center_.empty()) throw Error(ErrorCode::InvalidArgument, "chart center must have length d >= 1");
}

double StereoChart::centered_sq_norm(std::span<const double> x) const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < center_.size(); ++i) {
    const double u = x[i] - center_[i];
    s += u * u;
  }
  return s;
}

double StereoChart::log_jacobian(std::span<const double> x) const noexcept {
  return static_cast<double>(center_.size()) * std::log(radius_ * radius_ + centered_sq_norm(x));
}

Vector sp_forward(const StereoChart& chart, const SpherePoint& z) {
  const auto d = static_cast<std::size_t>(chart.dim());
  if (z.ambient_dim() != d + 1)
    throw Error(ErrorCode::DimensionMismatch, "sphere point does not match chart dimension");
  const double gap = z.pole_gap();
  if (gap < kNorthPoleGuard) throw Error(ErrorCode::NorthPoleSingularity, "point is at the north pole");
  const double scale = chart.radius() / gap;
  const auto c = z.coords();
  Vector x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = chart.center()[i] + scale * c[i];
  return x;
}

SpherePoint sp_inverse(const StereoChart& chart, std::span<const double> x) {
  const auto d = static_cast<std::size_t>(chart.dim());
  if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "point does not match chart dimension");
  const double r = chart.radius();
  const double r2 = r * r;
  const double t = chart.centered_sq_norm(x);
  const double denom = t + r2;
  Vector z(d + 1);
  for (std::size_t i = 0; i < d; ++i) z[i] = 2.0 * r * (x[i] - chart.center()[i]) / denom;
  z[d] = (t - r2) / denom;
  return SpherePoint::unchecked(std::move(z));
}

double log_sphere_density(const StereoChart& chart, const Target& target, const SpherePoint& z) {
  const Vector x = sp_forward(chart, z);
  return log_sphere_density_at(chart, x, target.log_density(x));
}

SpherePoint tangent_rw_propose(const StereoChart& chart, const SpherePoint& z, double h, rng::Engine& eng) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere step h must be positive");
  const auto n = z.ambient_dim();
  if (n != static_cast<std::size_t>(chart.dim()) + 1)
    throw Error(ErrorCode::DimensionMismatch, "sphere point does not match chart dimension");
  const auto zc = z.coords();
  std::normal_distribution<double> normal(0.0, h);
  Vector w(n);
  for (int attempt = 0; attempt < 2; ++attempt) {
    double dot = 0.0;
    double zz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = normal(eng);
      dot += zc[i] * w[i];
      zz += zc[i] * zc[i];
    }
    const double coef = dot / zz;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = zc[i] + (w[i] - coef * zc[i]);
      norm2 += w[i] * w[i];
    }
    const double norm = std::sqrt(norm2);
    if (norm >= 1e-12) {
      for (double& v : w) v /= norm;
      return SpherePoint::unchecked(std::move(w));
    }
  }
  throw Error(ErrorCode::DegenerateProposal, "tangent proposal collapsed to the origin twice");
}

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) noexcept {
  const auto ac = a.coords();
  const auto bc = b.coords();
  // atan2 form keeps precision for nearby points.
  double dot = 0.0;
  double cross2 = 0.0;
  for (std::size_t i = 0; i < ac.size(); ++i) dot += ac[i] * bc[i];
  for (std::size_t i = 0; i < ac.size(); ++i) {
    const double r = bc[i] - dot * ac[i];
    cross2 += r * r;
  }
  return std::atan2(std::sqrt(cross2), dot);
}

double log_tangent_proposal_density(int d, double h, double theta) noexcept {
  if (!(theta >= 0.0) || theta >= 0.5 * std::numbers::pi) return kNegInf;
  const double c = std::cos(theta);
  const double t = std::tan(theta);
  return -(d + 1.0) * std::log(c) - t * t / (2.0 * h * h);
}

}  // namespace smtm

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "smtm/error.hpp"
#include "smtm/geometry.hpp"
#include "smtm/rng.hpp"

using namespace smtm;

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

Vector random_direction(int d, rng::Engine& eng) {
  std::normal_distribution<double> n;
  Vector v(static_cast<std::size_t>(d));
  for (double& a : v) a = n(eng);
  const double r = norm(v);
  for (double& a : v) a /= r;
  return v;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("south pole maps to the center") {
  for (double r : {0.5, 1.0, 7.0}) {
    const StereoChart chart(3, r);
    const auto x = sp_forward(chart, SpherePoint({0.0, 0.0, 0.0, -1.0}));
    for (double v : x) CHECK(v == 0.0);
  }
}

TEST_CASE("hand-evaluated points") {
  const StereoChart chart(2, 1.0);
  const auto x = sp_forward(chart, SpherePoint({1.0, 0.0, 0.0}));
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == 0.0);

  const Vector p{1.0, 0.0};
  const auto z = sp_inverse(chart, p);
  CHECK(z.coords()[0] == doctest::Approx(1.0));
  CHECK(z.coords()[1] == 0.0);
  CHECK(z.coords()[2] == doctest::Approx(0.0));

  const StereoChart shifted(2.0, Vector{3.0, -1.0});
  const auto zc = sp_inverse(shifted, shifted.center());
  CHECK(zc.coords()[0] == 0.0);
  CHECK(zc.coords()[1] == 0.0);
  CHECK(zc.coords()[2] == -1.0);
}

TEST_CASE("north pole is singular") {
  const StereoChart chart(2, 1.0);
  CHECK_THROWS_AS(sp_forward(chart, SpherePoint({0.0, 0.0, 1.0})), Error);
  try {
    sp_forward(chart, SpherePoint({0.0, 0.0, 1.0}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NorthPoleSingularity);
  }
  CHECK(SpherePoint({0.0, 0.0, 1.0}).near_north_pole());
  CHECK_FALSE(SpherePoint({1.0, 0.0, 0.0}).near_north_pole());
}

TEST_CASE("sphere point validation") {
  CHECK_THROWS_AS(SpherePoint({1.0, 1.0, 0.0}), Error);
  CHECK_THROWS_AS(SpherePoint({1.0}), Error);
  CHECK_NOTHROW(SpherePoint({0.6, 0.8}));
}

TEST_CASE("height increases with distance from the center") {
  const StereoChart chart(3, 2.0);
  double last = -1.0;
  for (double r = 1e-3; r < 1e6; r *= 3.0) {
    const Vector x{r, 0.0, 0.0};
    const double h = sp_inverse(chart, x).height();
    CHECK(h > last);
    last = h;
  }
}

TEST_CASE("round trip over many scales and dimensions") {
  auto eng = rng::substream({1, 0, 0, rng::Purpose::Test, 0});
  std::uniform_real_distribution<double> logr(-6.0, 6.0);
  // |x - center| up to 1e6 stays outside the 1e-12 pole guard only for R >= 1/sqrt(2).
  std::uniform_real_distribution<double> logR(0.0, 2.0);
  for (int d : {1, 2, 10, 100}) {
    double worst_x = 0.0;
    double worst_z = 0.0;
    double worst_norm = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Vector mu = random_direction(d, eng);
      const StereoChart chart(std::pow(10.0, logR(eng)), mu);
      const double r = std::pow(10.0, logr(eng));
      const Vector dir = random_direction(d, eng);
      Vector x(mu);
      for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] += r * dir[static_cast<std::size_t>(i)];
      const SpherePoint z = sp_inverse(chart, x);
      worst_norm = std::max(worst_norm, std::abs(norm(z.coords()) - 1.0));
      const Vector back = sp_forward(chart, z);
      Vector du(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) du[i] = back[i] - x[i];
      worst_x = std::max(worst_x, norm(du) / r);
      const SpherePoint z2 = sp_inverse(chart, back);
      Vector dz(z.ambient_dim());
      for (std::size_t i = 0; i < dz.size(); ++i) dz[i] = z2.coords()[i] - z.coords()[i];
      worst_z = std::max(worst_z, norm(dz));
    }
    CAPTURE(d);
    CHECK(worst_x <= 1e-10);
    CHECK(worst_z <= 1e-10);
    CHECK(worst_norm <= 1e-12);
  }
}

TEST_CASE("pole gap avoids cancellation") {
  const StereoChart chart(2, 1.0);
  const Vector far{1e5, 0.0};
  const SpherePoint z = sp_inverse(chart, far);
  // 1 - z_3 = 2 R^2 / (|x|^2 + R^2)
  CHECK(z.pole_gap() == doctest::Approx(2.0 / (1e10 + 1.0)).epsilon(1e-9));
  CHECK(sp_forward(chart, z)[0] == doctest::Approx(1e5).epsilon(1e-10));
  // Past sqrt(2) 1e6 R the guard applies.
  CHECK(sp_inverse(chart, Vector{1e7, 0.0}).near_north_pole());
  CHECK_THROWS_AS(sp_forward(chart, sp_inverse(chart, Vector{1e7, 0.0})), Error);
}

TEST_CASE("lifted density") {
  SUBCASE("d = 1 Gaussian hand evaluation") {
    const StereoChart chart(1, 1.0);
    const Target t = Target::product_iid(GaussianComponent{0.0, 1.0}, 1);
    const double a = log_sphere_density(chart, t, sp_inverse(chart, Vector{0.0}));
    const double b = log_sphere_density(chart, t, sp_inverse(chart, Vector{1.0}));
    CHECK(a - b == doctest::Approx(0.5 - std::log(2.0)).epsilon(1e-12));
    CHECK(a - b == doctest::Approx(-0.19315).epsilon(1e-4));
  }
  SUBCASE("sphere-uniform pullback is flat") {
    const int d = 4;
    const double r = 1.7;
    const Target t = Target::custom(d, [=](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return -d * std::log(r * r + s);
    });
    const StereoChart chart(d, r);
    auto eng = rng::substream({2, 0, 0, rng::Purpose::Test, 0});
    const double ref = log_sphere_density(chart, t, SpherePoint({0.0, 0.0, 0.0, 0.0, -1.0}));
    for (int k = 0; k < 100; ++k) {
      Vector c = random_direction(d + 1, eng);
      if (c.back() > 0.99) continue;
      CHECK(log_sphere_density(chart, t, SpherePoint(c)) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
  SUBCASE("difference identity with a center") {
    const int d = 3;
    const StereoChart chart(2.0, Vector{1.0, 2.0, 3.0});
    const Target t = Target::product_iid(StudentTComponent{5.0, 0.0, 1.0}, d);
    const Vector x{0.3, -2.0, 5.0}, y{4.0, 1.0, -1.0};
    const double lhs = log_sphere_density(chart, t, sp_inverse(chart, x)) -
                       log_sphere_density(chart, t, sp_inverse(chart, y));
    auto c2 = [&](const Vector& v) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += (v[i] - chart.center()[i]) * (v[i] - chart.center()[i]);
      return s;
    };
    const double rhs = t.log_density(x) - t.log_density(y) + d * (std::log(4.0 + c2(x)) - std::log(4.0 + c2(y)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("Jacobian matches a finite-difference arc length in d = 1") {
  // On S^1, dx/dtheta for x = R cos t / (1 - sin t) parametrization equals
  // (R^2 + x^2) / (2R); the lifted density must carry exactly that factor.
  const double r = 1.3;
  const StereoChart chart(1, r);
  for (double x : {-4.0, -0.5, 0.0, 0.7, 3.0}) {
    const SpherePoint z = sp_inverse(chart, Vector{x});
    const double theta = std::atan2(z.coords()[1], z.coords()[0]);
    const double eps = 1e-6;
    const double xp = sp_forward(chart, SpherePoint({std::cos(theta + eps), std::sin(theta + eps)}))[0];
    const double xm = sp_forward(chart, SpherePoint({std::cos(theta - eps), std::sin(theta - eps)}))[0];
    const double dxdt = (xp - xm) / (2 * eps);
    CHECK(std::abs(dxdt) == doctest::Approx((r * r + x * x) / (2 * r)).epsilon(1e-6));
    CHECK(chart.log_jacobian(Vector{x}) == doctest::Approx(std::log(r * r + x * x)));
  }
}

TEST_CASE("tangent proposal") {
  auto eng = rng::substream({3, 0, 0, rng::Purpose::Test, 0});
  std::uniform_real_distribution<double> uh(1e-3, 2.0);

  SUBCASE("unit norm output") {
    const StereoChart chart(5, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const SpherePoint z(random_direction(6, eng));
      const SpherePoint w = tangent_rw_propose(chart, z, uh(eng), eng);
      worst = std::max(worst, std::abs(norm(w.coords()) - 1.0));
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("small steps stay close") {
    const StereoChart chart(10, 1.0);
    const double h = 1e-4;
    int close = 0;
    const int trials = 2000;
    for (int k = 0; k < trials; ++k) {
      const SpherePoint z(random_direction(11, eng));
      const SpherePoint w = tangent_rw_propose(chart, z, h, eng);
      // |dz| ~ h chi_10: P(chi_10 > 6.3) < 0.001; geodesic <= |dz|.
      if (geodesic_distance(z, w) <= 6.3 * h) ++close;
    }
    CHECK(close >= static_cast<int>(0.99 * trials));
  }

  SUBCASE("non-positive step is rejected") {
    const StereoChart chart(2, 1.0);
    CHECK_THROWS_AS(tangent_rw_propose(chart, SpherePoint({1.0, 0.0, 0.0}), 0.0, eng), Error);
  }
}

TEST_CASE("angular distance follows the closed-form proposal density") {
  for (int d : {2, 10}) {
    const double h = 0.4;
    const StereoChart chart(d, 1.0);
    auto eng = rng::substream({4, static_cast<std::uint64_t>(d), 0, rng::Purpose::Test, 0});
    const int n = 100000;
    const int bins = 40;
    const double top = std::atan(h * (std::sqrt(static_cast<double>(d)) + 7.0));
    std::vector<double> observed(bins + 1, 0.0);
    for (int k = 0; k < n; ++k) {
      const SpherePoint z(random_direction(d + 1, eng));
      const double th = geodesic_distance(z, tangent_rw_propose(chart, z, h, eng));
      const int b = std::min(bins, static_cast<int>(th / top * bins));
      observed[static_cast<std::size_t>(b)] += 1.0;
    }
    // Density in theta: sin^{d-1}(theta) (surface measure) times Q_S.
    auto dens = [&](double th) {
      if (th <= 0.0) return 0.0;
      return std::exp((d - 1) * std::log(std::sin(th)) + log_tangent_proposal_density(d, h, th));
    };
    std::vector<double> mass(bins + 1, 0.0);
    double total = 0.0;
    const int sub = 200;
    for (int b = 0; b < bins; ++b) {
      const double a = top * b / bins;
      const double w = top / bins / sub;
      double s = 0.0;
      for (int i = 0; i < sub; ++i) {
        const double t0 = a + i * w;
        s += w / 6.0 * (dens(t0) + 4 * dens(t0 + w / 2) + dens(t0 + w));
      }
      mass[static_cast<std::size_t>(b)] = s;
      total += s;
    }
    {
      const double a = top;
      const double b = 0.5 * std::numbers::pi - 1e-9;
      const int m = 20000;
      const double w = (b - a) / m;
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += w / 6.0 * (dens(a + i * w) + 4 * dens(a + (i + 0.5) * w) + dens(a + (i + 1) * w));
      mass[static_cast<std::size_t>(bins)] = s;
      total += s;
    }
    double chi2 = 0.0;
    int cells = 0;
    double pooled_o = 0.0, pooled_e = 0.0;
    for (int b = 0; b <= bins; ++b) {
      pooled_o += observed[static_cast<std::size_t>(b)];
      pooled_e += n * mass[static_cast<std::size_t>(b)] / total;
      if (pooled_e >= 5.0) {
        chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++cells;
        pooled_o = pooled_e = 0.0;
      }
    }
    if (pooled_e > 0.0) chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / std::max(pooled_e, 1e-300);
    const boost::math::chi_squared dist(cells - 1);
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    CAPTURE(d);
    CAPTURE(chi2);
    CHECK(p > 0.01);
  }
}

TEST_CASE("proposal density is symmetric and vanishes past a right angle") {
  CHECK(log_tangent_proposal_density(3, 0.5, 0.0) == 0.0);
  CHECK(log_tangent_proposal_density(3, 0.5, 0.5 * std::numbers::pi) == -std::numeric_limits<double>::infinity());
  const SpherePoint a({1.0, 0.0, 0.0});
  const SpherePoint b({0.6, 0.8, 0.0});
  CHECK(geodesic_distance(a, b) == doctest::Approx(geodesic_distance(b, a)).epsilon(1e-15));
  CHECK(geodesic_distance(a, b) == doctest::Approx(std::acos(0.6)));
}

}  // TEST_SUITE

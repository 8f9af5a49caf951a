#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "smtm/error.hpp"
#include "smtm/rng.hpp"
#include "smtm/targets.hpp"

using namespace smtm;

TEST_SUITE("targets") {

TEST_CASE("log-density examples") {
  const Vector zero(10, 0.0);
  const Target g = Target::product_iid(GaussianComponent{0.0, 1.0}, 10);
  CHECK(g.log_density(zero) == 0.0);

  const Target t = Target::product_iid(StudentTComponent{11.0, 0.0, 1.0}, 10);
  Vector x(10);
  for (int i = 0; i < 10; ++i) x[static_cast<std::size_t>(i)] = 0.3 * i - 1.0;
  double expect = 0.0;
  for (double v : x) expect += -6.0 * std::log(1.0 + v * v / 11.0);
  CHECK(t.log_density(x) - t.log_density(zero) == doctest::Approx(expect).epsilon(1e-13));

  const Target e = Target::exp_tail(1.0, 3);
  const Vector y{1.0, 2.0, 2.0};
  CHECK(e.log_density(y) - e.log_density(Vector(3, 0.0)) == doctest::Approx(-3.0));

  const Target p = Target::poly_tail(7.0, 3);
  CHECK(p.log_density(y) == doctest::Approx(-3.5 * std::log(10.0)));
}

TEST_CASE("dimension mismatch") {
  const Target g = Target::product_iid(GaussianComponent{}, 3);
  try {
    g.log_density(Vector(2, 0.0));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("family invariants are validated") {
  CHECK_THROWS_AS(Target::poly_tail(6.0, 3), Error);
  CHECK_NOTHROW(Target::poly_tail(6.5, 3));
  CHECK_THROWS_AS(Target::exp_tail(1.5, 3), Error);
  CHECK_THROWS_AS(Target::exp_tail(0.0, 3), Error);
  CHECK_THROWS_AS(Target::product_iid(GaussianComponent{0.0, -1.0}, 3), Error);
  CHECK_THROWS_AS(Target::product_iid(StudentTComponent{0.0, 0.0, 1.0}, 3), Error);
}

TEST_CASE("product separability is exact") {
  const Target t = Target::product_iid(StudentTComponent{3.0, 0.5, 2.0}, 4);
  const UnivariateComponent c = StudentTComponent{3.0, 0.5, 2.0};
  const Vector x{0.1, -3.0, 8.0, 2.5}, y{1.0, 1.0, -7.0, 0.0};
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += component_log_density(c, x[i]) - component_log_density(c, y[i]);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    sx += component_log_density(c, x[i]);
    sy += component_log_density(c, y[i]);
  }
  CHECK(t.log_density(x) == sx);
  CHECK(t.log_density(x) - t.log_density(y) == doctest::Approx(s).epsilon(1e-15));
}

TEST_CASE("isotropic families are rotation invariant") {
  auto eng = rng::substream({5, 0, 0, rng::Purpose::Test, 0});
  std::normal_distribution<double> n;
  const int d = 6;
  for (const Target& t : {Target::poly_tail(13.0, d), Target::exp_tail(0.5, d)}) {
    for (int k = 0; k < 20; ++k) {
      // Random orthogonal matrix by Gram-Schmidt.
      std::vector<Vector> q(d, Vector(d));
      for (int i = 0; i < d; ++i) {
        for (double& v : q[i]) v = n(eng);
        for (int j = 0; j < i; ++j) {
          double dot = 0.0;
          for (int c = 0; c < d; ++c) dot += q[i][c] * q[j][c];
          for (int c = 0; c < d; ++c) q[i][c] -= dot * q[j][c];
        }
        double nn = 0.0;
        for (double v : q[i]) nn += v * v;
        for (double& v : q[i]) v /= std::sqrt(nn);
      }
      Vector x(d), rx(d, 0.0);
      for (double& v : x) v = 5.0 * n(eng);
      for (int i = 0; i < d; ++i)
        for (int c = 0; c < d; ++c) rx[i] += q[i][c] * x[c];
      CHECK(std::abs(t.log_density(rx) - t.log_density(x)) <= 1e-10);
    }
  }
}

TEST_CASE("fisher moment") {
  CHECK(fisher_moment(GaussianComponent{0.5, 0.75}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(fisher_moment(GaussianComponent{0.0, 1.0}) == 1.0);
  for (double m : {0.0, 0.2, 0.5, 0.8}) CHECK(fisher_moment(GaussianComponent{m, 1 - m * m}) == 1.0 / (1 - m * m));

  for (double nu : {1.0, 3.0, 11.0, 30.0})
    for (double s : {1.0, 2.5}) {
      CAPTURE(nu);
      CHECK(fisher_moment(StudentTComponent{nu, 1.0, s}) ==
            doctest::Approx(oracle::student_t_fisher(nu, s)).epsilon(1e-9));
    }
}

TEST_CASE("student-t fisher moment against Monte Carlo") {
  const double nu = 11.0;
  auto eng = rng::substream({6, 0, 0, rng::Purpose::Test, 0});
  std::student_t_distribution<double> t(nu);
  const std::size_t n = 10'000'000;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = t(eng);
    const double score = (nu + 1) * u / (nu + u * u);
    s += score * score;
    s2 += score * score * score * score;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(fisher_moment(StudentTComponent{nu, 0.0, 1.0}) - mean) <= 3 * se);
}

TEST_CASE("cdf") {
  CHECK(component_cdf(GaussianComponent{0.0, 1.0}, 0.0) == 0.5);
  CHECK(component_cdf(StudentTComponent{3.0, 0.0, 1.0}, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(component_cdf(GaussianComponent{0.0, 1.0}, 1.959964) - 0.975) <= 1e-6);
  // Cauchy closed form.
  CHECK(component_cdf(StudentTComponent{1.0, 2.0, 3.0}, 5.0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("spec grammar") {
  const Target a = parse_target_spec("gaussian(0.5,0.75)^200");
  CHECK(a.dim() == 200);
  CHECK(a.describe() == "gaussian(0.5,0.75)^200");
  const Target b = parse_target_spec(" student_t(11, 0, 1)^10 ");
  CHECK(b.dim() == 10);
  CHECK(b.describe() == "student_t(11,0,1)^10");
  CHECK(parse_target_spec("poly_tail(21,10)").dim() == 10);
  CHECK(parse_target_spec("exp_tail(0.5,3)").describe() == "exp_tail(0.5,3)");
  CHECK(parse_target_spec("student_t(21,10,1)^20").mean() == Vector(20, 10.0));
  for (const char* bad : {"gaussian(0,1)", "normal(0,1)^3", "poly_tail(3,2)", "exp_tail(2,3)", ""}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_target_spec(bad), Error);
  }
}

}  // TEST_SUITE

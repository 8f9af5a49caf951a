#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "smtm/logsumexp.hpp"
#include "smtm/multi_try.hpp"
#include "smtm/rng.hpp"

using namespace smtm;

TEST_SUITE("multi_try") {

TEST_CASE("log-sum-exp edge cases") {
  const std::vector<double> one{3.25};
  CHECK(log_sum_exp(one) == 3.25);
  const std::vector<double> none{kNegInf, kNegInf};
  CHECK(log_sum_exp(none) == kNegInf);
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_add_exp(kNegInf, 2.0) == 2.0);
  CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("single candidate reduces to Metropolis") {
  const std::vector<double> empty;
  for (double l : {-3.0, -0.5, 0.0, 0.2, 5.0}) {
    const std::vector<double> c{l};
    for (WeightKind w : {WeightKind::GloballyBalanced, WeightKind::LocallyBalanced}) {
      CHECK(multi_try_log_alpha1(c, empty, 0, w) == std::min(0.0, l));
      CHECK(multi_try_log_alpha2(c, empty, 0, w) == std::min(0.0, l));
    }
  }
  // d = 1 Gaussian, x = 0 -> y = 1.
  const std::vector<double> c{-0.5};
  CHECK(std::exp(multi_try_log_alpha1(c, empty, 0, WeightKind::GloballyBalanced)) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("coinciding candidates give alpha one") {
  for (std::size_t n : {2u, 3u, 10u}) {
    const std::vector<double> c(n, 0.0), r(n - 1, 0.0);
    CHECK(multi_try_log_alpha1(c, r, 0, WeightKind::GloballyBalanced) == 0.0);
    CHECK(multi_try_log_alpha1(c, r, n - 1, WeightKind::LocallyBalanced) == 0.0);
  }
}

TEST_CASE("Euclidean MTM hand example N = 2") {
  // d = 1 standard Gaussian, x = 0, candidates (0.5, -0.3), reference 0.2.
  auto pi = [](double t) { return std::exp(-0.5 * t * t); };
  const std::vector<double> py{pi(0.5), pi(-0.3)};
  for (std::size_t j : {1u, 2u}) {
    const double yj = j == 1 ? 0.5 : -0.3;
    const std::vector<double> cand{-0.5 * 0.25, -0.5 * 0.09};
    const std::vector<double> ref{-0.5 * 0.04 + 0.5 * yj * yj};
    CAPTURE(j);
    CHECK(std::exp(multi_try_log_alpha1(cand, ref, j - 1, WeightKind::GloballyBalanced)) ==
          doctest::Approx(oracle::mtm_alpha_gb(pi(0.0), py, j, {pi(0.2)})).epsilon(1e-13));
    CHECK(std::exp(multi_try_log_alpha1(cand, ref, j - 1, WeightKind::LocallyBalanced)) ==
          doctest::Approx(oracle::mtm_alpha_lb(pi(0.0), py, j, {pi(0.2)})).epsilon(1e-13));
  }
}

TEST_CASE("random inputs agree with linear-domain formulas") {
  auto eng = rng::substream({10, 0, 0, rng::Purpose::Test, 0});
  std::normal_distribution<double> n(0.0, 2.0);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t N = 1 + static_cast<std::size_t>(k % 7);
    std::vector<double> x(N), y(N - 1);
    for (double& v : x) v = n(eng);
    for (double& v : y) v = n(eng);
    for (std::size_t j = 1; j <= N; ++j) {
      const double a1g = std::exp(multi_try_log_alpha1(x, y, j - 1, WeightKind::GloballyBalanced));
      const double a2g = std::exp(multi_try_log_alpha2(x, y, j - 1, WeightKind::GloballyBalanced));
      const double a1l = std::exp(multi_try_log_alpha1(x, y, j - 1, WeightKind::LocallyBalanced));
      const double a2l = std::exp(multi_try_log_alpha2(x, y, j - 1, WeightKind::LocallyBalanced));
      CHECK(a1g == doctest::Approx(oracle::phi1_gb(j, x, y)).epsilon(1e-12));
      CHECK(a2g == doctest::Approx(oracle::phi2_gb(j, x, y)).epsilon(1e-12));
      CHECK(a1l == doctest::Approx(oracle::phi1_lb(j, x, y)).epsilon(1e-12));
      CHECK(a2l == doctest::Approx(oracle::phi2_lb(j, x, y)).epsilon(1e-12));
      // alpha_2 = selection probability * alpha_1
      for (WeightKind w : {WeightKind::GloballyBalanced, WeightKind::LocallyBalanced}) {
        const double joint = std::exp(multi_try_log_selection(x, j - 1, w) + multi_try_log_alpha1(x, y, j - 1, w));
        CHECK(joint == doctest::Approx(std::exp(multi_try_log_alpha2(x, y, j - 1, w))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("extreme log-ratios stay finite") {
  const std::vector<double> x{800.0, -900.0, 0.0};
  const std::vector<double> y{-1200.0, 700.0};
  for (WeightKind w : {WeightKind::GloballyBalanced, WeightKind::LocallyBalanced}) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double a = multi_try_log_alpha1(x, y, j, w);
      CHECK(a <= 0.0);
      CHECK_FALSE(std::isnan(a));
    }
  }
  const std::vector<double> dead{kNegInf, 0.0};
  const std::vector<double> r{0.0};
  CHECK(multi_try_log_alpha2(dead, r, 0, WeightKind::GloballyBalanced) == kNegInf);
  CHECK(multi_try_log_selection(dead, 0, WeightKind::LocallyBalanced) == kNegInf);
}

}  // TEST_SUITE

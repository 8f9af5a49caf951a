#include "smtm/targets.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

#include "smtm/error.hpp"

namespace smtm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_dim(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

void validate(const UnivariateComponent& component) {
  std::visit(Overloaded{
                 [](const GaussianComponent& g) {
                   if (!(g.variance > 0.0) || !std::isfinite(g.mean))
                     throw Error(ErrorCode::InvalidArgument, "gaussian needs finite mean and variance > 0");
                 },
                 [](const StudentTComponent& t) {
                   if (!(t.dof > 0.0) || !(t.scale > 0.0) || !std::isfinite(t.location))
                     throw Error(ErrorCode::InvalidArgument, "student_t needs dof > 0 and scale > 0");
                 },
             },
             component);
}

double component_log_density(const UnivariateComponent& component, double t) {
  return std::visit(Overloaded{
                        [t](const GaussianComponent& g) {
                          const double u = t - g.mean;
                          return -0.5 * u * u / g.variance;
                        },
                        [t](const StudentTComponent& s) {
                          const double u = (t - s.location) / s.scale;
                          return -0.5 * (s.dof + 1.0) * std::log1p(u * u / s.dof);
                        },
                    },
                    component);
}

double component_density(const UnivariateComponent& component, double t) {
  return std::visit(Overloaded{
                        [t](const GaussianComponent& g) {
                          const double u = t - g.mean;
                          return std::exp(-0.5 * u * u / g.variance) /
                                 std::sqrt(2.0 * std::numbers::pi * g.variance);
                        },
                        [t](const StudentTComponent& s) {
                          const boost::math::students_t_distribution<double> dist(s.dof);
                          return boost::math::pdf(dist, (t - s.location) / s.scale) / s.scale;
                        },
                    },
                    component);
}

double component_cdf(const UnivariateComponent& component, double t) {
  return std::visit(Overloaded{
                        [t](const GaussianComponent& g) {
                          return 0.5 * std::erfc(-(t - g.mean) / std::sqrt(2.0 * g.variance));
                        },
                        [t](const StudentTComponent& s) {
                          const boost::math::students_t_distribution<double> dist(s.dof);
                          return boost::math::cdf(dist, (t - s.location) / s.scale);
                        },
                    },
                    component);
}

double component_mean(const UnivariateComponent& component) {
  return std::visit(Overloaded{
                        [](const GaussianComponent& g) { return g.mean; },
                        [](const StudentTComponent& s) { return s.location; },
                    },
                    component);
}

double fisher_moment(const UnivariateComponent& component) {
  validate(component);
  return std::visit(
      Overloaded{
          [](const GaussianComponent& g) { return 1.0 / g.variance; },
          [&](const StudentTComponent& s) {
            // (log f)'(t) = -(nu+1) u / (s (nu + u^2)), u = (t - m)/s. Integrate in u.
            const boost::math::students_t_distribution<double> dist(s.dof);
            auto integrand = [&](double u) {
              const double score = (s.dof + 1.0) * u / (s.scale * (s.dof + u * u));
              return score * score * boost::math::pdf(dist, u);
            };
            double error = 0.0;
            const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                integrand, -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), 20, 1e-12, &error);
            if (!std::isfinite(value) || error > 1e-8)
              throw Error(ErrorCode::NonIntegrable, "fisher moment quadrature did not converge");
            return value;
          },
      },
      component);
}

std::string describe(const UnivariateComponent& component) {
  return std::visit(Overloaded{
                        [](const GaussianComponent& g) {
                          return "gaussian(" + fmt_num(g.mean) + "," + fmt_num(g.variance) + ")";
                        },
                        [](const StudentTComponent& s) {
                          return "student_t(" + fmt_num(s.dof) + "," + fmt_num(s.location) + "," +
                                 fmt_num(s.scale) + ")";
                        },
                    },
                    component);
}

Target Target::product_iid(UnivariateComponent component, int d) {
  check_dim(d);
  validate(component);
  return Target(ProductIID{component}, d);
}

Target Target::poly_tail(double alpha, int d) {
  check_dim(d);
  if (!(alpha > 2.0 * d))
    throw Error(ErrorCode::InvalidArgument, "poly_tail requires alpha > 2d");
  return Target(PolyTail{alpha}, d);
}

Target Target::exp_tail(double beta, int d) {
  check_dim(d);
  if (!(beta > 0.0 && beta <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "exp_tail requires 0 < beta <= 1");
  return Target(ExpTail{beta}, d);
}

Target Target::custom(int d, LogDensityFn log_density, std::string name) {
  check_dim(d);
  if (!log_density) throw Error(ErrorCode::InvalidArgument, "custom target needs a log-density");
  return Target(Custom{std::move(log_density), std::move(name)}, d);
}

double Target::log_density(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_))
    throw Error(ErrorCode::DimensionMismatch,
                "expected length " + std::to_string(dim_) + ", got " + std::to_string(x.size()));
  return std::visit(
      Overloaded{
          [x](const ProductIID& p) {
            double acc = 0.0;
            if (const auto* g = std::get_if<GaussianComponent>(&p.component)) {
              const double inv = 0.5 / g->variance;
              for (double t : x) {
                const double u = t - g->mean;
                acc -= u * u * inv;
              }
            } else {
              const auto& s = std::get<StudentTComponent>(p.component);
              const double inv_scale = 1.0 / s.scale;
              double sum = 0.0;
              for (double t : x) {
                const double u = (t - s.location) * inv_scale;
                sum += std::log1p(u * u / s.dof);
              }
              acc = -0.5 * (s.dof + 1.0) * sum;
            }
            return acc;
          },
          [x](const PolyTail& p) {
            double sq = 0.0;
            for (double t : x) sq += t * t;
            return -0.5 * p.alpha * std::log1p(sq);
          },
          [x](const ExpTail& e) {
            double sq = 0.0;
            for (double t : x) sq += t * t;
            return -std::pow(std::sqrt(sq), e.beta);
          },
          [x](const Custom& c) { return c.log_density(x); },
      },
      kind_);
}

Vector Target::mean() const {
  if (const auto* p = std::get_if<ProductIID>(&kind_))
    return Vector(dim_, component_mean(p->component));
  return Vector(dim_, 0.0);
}

std::string Target::describe() const {
  return std::visit(Overloaded{
                        [this](const ProductIID& p) {
                          return smtm::describe(p.component) + "^" + std::to_string(dim_);
                        },
                        [this](const PolyTail& p) {
                          return "poly_tail(" + fmt_num(p.alpha) + "," + std::to_string(dim_) + ")";
                        },
                        [this](const ExpTail& e) {
                          return "exp_tail(" + fmt_num(e.beta) + "," + std::to_string(dim_) + ")";
                        },
                        [](const Custom& c) { return c.name; },
                    },
                    kind_);
}

Target parse_target_spec(std::string_view spec_view) {
  static const std::string num = R"(\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*)";
  static const std::regex gaussian_re(R"(\s*gaussian\()" + num + "," + num + R"(\)\s*\^\s*([0-9]+)\s*)");
  static const std::regex student_re(R"(\s*student_t\()" + num + "," + num + "," + num +
                                     R"(\)\s*\^\s*([0-9]+)\s*)");
  static const std::regex poly_re(R"(\s*poly_tail\()" + num + R"(,\s*([0-9]+)\s*\)\s*)");
  static const std::regex exp_re(R"(\s*exp_tail\()" + num + R"(,\s*([0-9]+)\s*\)\s*)");

  const std::string spec(spec_view);
  std::smatch m;
  if (std::regex_match(spec, m, gaussian_re))
    return Target::product_iid(GaussianComponent{std::stod(m[1]), std::stod(m[2])}, std::stoi(m[3]));
  if (std::regex_match(spec, m, student_re))
    return Target::product_iid(StudentTComponent{std::stod(m[1]), std::stod(m[2]), std::stod(m[3])},
                               std::stoi(m[4]));
  if (std::regex_match(spec, m, poly_re)) return Target::poly_tail(std::stod(m[1]), std::stoi(m[2]));
  if (std::regex_match(spec, m, exp_re)) return Target::exp_tail(std::stod(m[1]), std::stoi(m[2]));
  throw Error(ErrorCode::ConfigError, "cannot parse target spec '" + spec + "'");
}

}  // namespace smtm

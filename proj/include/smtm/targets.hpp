#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smtm {

using Vector = std::vector<double>;

struct GaussianComponent {
  double mean = 0.0;
  double variance = 1.0;
};

/// Location-scale Student-t with `dof` degrees of freedom.
struct StudentTComponent {
  double dof = 1.0;
  double location = 0.0;
  double scale = 1.0;
};

using UnivariateComponent = std::variant<GaussianComponent, StudentTComponent>;

void validate(const UnivariateComponent& component);

/// Unnormalized log f(t).
double component_log_density(const UnivariateComponent& component, double t);

/// Normalized density f(t).
double component_density(const UnivariateComponent& component, double t);

double component_cdf(const UnivariateComponent& component, double t);

double component_mean(const UnivariateComponent& component);

/// I = E_f[((log f)')^2]. Closed form for the Gaussian, Gauss-Kronrod
/// quadrature over the real line for the Student-t.
double fisher_moment(const UnivariateComponent& component);

std::string describe(const UnivariateComponent& component);

/// Unnormalized log-density on R^d.
class Target {
 public:
  using LogDensityFn = std::function<double(std::span<const double>)>;

  struct ProductIID {
    UnivariateComponent component;
  };
  /// pi(x) proportional to (1 + |x|^2)^(-alpha/2).
  struct PolyTail {
    double alpha;
  };
  /// pi(x) proportional to exp(-|x|^beta).
  struct ExpTail {
    double beta;
  };
  struct Custom {
    LogDensityFn log_density;
    std::string name;
  };
  using Kind = std::variant<ProductIID, PolyTail, ExpTail, Custom>;

  static Target product_iid(UnivariateComponent component, int d);
  static Target poly_tail(double alpha, int d);
  static Target exp_tail(double beta, int d);
  static Target custom(int d, LogDensityFn log_density, std::string name = "custom");

  int dim() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return kind_; }

  double log_density(std::span<const double> x) const;

  /// Location used as the burn-in reference point.
  Vector mean() const;

  /// Spec-grammar form, e.g. "student_t(11,0,1)^10".
  std::string describe() const;

 private:
  Target(Kind kind, int d) : kind_(std::move(kind)), dim_(d) {}

  Kind kind_;
  int dim_;
};

/// Parses `gaussian(m,s2)^d`, `student_t(nu,m,s)^d`, `poly_tail(alpha,d)`,
/// `exp_tail(beta,d)`.
Target parse_target_spec(std::string_view spec);

}  // namespace smtm

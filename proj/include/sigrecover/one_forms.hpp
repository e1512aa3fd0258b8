#pragma once

#include "sigrecover/ext_real.hpp"
#include "sigrecover/tensor_algebra.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sigrecover {

/// The standard mollifier h(t) = exp(-1 / (1 - t^2)) on (-1, 1), zero elsewhere.
double mollifier(double t);
/// ln h(t); -inf outside (-1, 1).
double log_mollifier(double t);
/// h'(t) = -2t / (1 - t^2)^2 * h(t).
double mollifier_derivative(double t);

/// Closed axis-aligned box [lower, upper].
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box cube(std::span<const double> center, double half_width);
  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(std::span<const double> x) const;
  bool intersects(const Box& other) const;
};

/// Differential one-form phi = sum_j phi_j(x) dx^j on R^d. Component indices
/// are 0-based in this interface.
///
/// A form with a support box must vanish outside it; the integrator relies on
/// this to skip empty parts of a path.
class OneForm {
public:
  virtual ~OneForm() = default;

  virtual int dim() const = 0;
  virtual double component(int j, std::span<const double> x) const = 0;
  /// d phi_j / d x^k.
  virtual double partial(int j, int k, std::span<const double> x) const = 0;
  /// nullopt means unbounded support.
  virtual std::optional<Box> support() const = 0;
  /// sup_x |phi(x)| over the support, used to scale zero thresholds.
  virtual double sup_norm() const = 0;
  /// The form is continuous across the support boundary, hence zero on it.
  /// Quadrature then pins boundary nodes to exactly zero.
  virtual bool vanishes_on_boundary() const { return false; }

  /// phi(x)[v] = sum_j phi_j(x) v^j, in extended range. Forms whose values
  /// can underflow (the bump) override this.
  virtual ExtReal pair(std::span<const double> x, std::span<const double> v) const;
};

using OneFormPtr = std::shared_ptr<const OneForm>;

/// One-form supported on the closed cube of half-width eta around `center`:
///   phi_1(x) = prod_i h((x^i - c^i)/eta) * exp(h^2((x^2 - c^2)/eta)),
///   phi_i = 0 for i >= 2.
/// Its x^2-derivative vanishes in the open cube only on the slice x^2 = c^2.
class BumpOneForm final : public OneForm {
public:
  BumpOneForm(std::vector<double> center, double eta);

  int dim() const override { return static_cast<int>(center_.size()); }
  double component(int j, std::span<const double> x) const override;
  double partial(int j, int k, std::span<const double> x) const override;
  std::optional<Box> support() const override;
  double sup_norm() const override;
  bool vanishes_on_boundary() const override { return true; }
  ExtReal pair(std::span<const double> x, std::span<const double> v) const override;

  /// ln phi_1(x); -inf outside the open cube.
  double log_phi1(std::span<const double> x) const;

  const std::vector<double>& center() const { return center_; }
  double eta() const { return eta_; }

private:
  std::vector<double> center_;
  double eta_;
};

OneFormPtr bump_one_form(std::vector<double> center, double eta);

/// phi = dx^j (0-based j) on a box, zero outside. Discontinuous on the box
/// boundary; meant for boxes that contain the whole path.
class CoordinateOneForm final : public OneForm {
public:
  CoordinateOneForm(int dim, int j, std::optional<Box> box = std::nullopt);

  int dim() const override { return dim_; }
  double component(int j, std::span<const double> x) const override;
  double partial(int, int, std::span<const double>) const override { return 0.0; }
  std::optional<Box> support() const override { return box_; }
  double sup_norm() const override { return 1.0; }

private:
  int dim_;
  int j_;
  std::optional<Box> box_;
};

/// One monomial c * x^alpha dx^j.
struct Monomial {
  double coeff = 1.0;
  std::vector<int> alpha; ///< exponents, length d
  int j = 1;              ///< 1-based differential index

  int degree() const;
};

/// Finite sum of monomials c * x^alpha dx^j. Unbounded support.
class PolynomialOneForm final : public OneForm {
public:
  PolynomialOneForm(int dim, std::vector<Monomial> terms);

  /// dx^j (1-based).
  static PolynomialOneForm coordinate(int dim, int j);

  int dim() const override { return dim_; }
  double component(int j, std::span<const double> x) const override;
  double partial(int j, int k, std::span<const double> x) const override;
  std::optional<Box> support() const override { return std::nullopt; }
  /// Unbounded support: reports 1 so thresholds scale with the path only.
  double sup_norm() const override { return 1.0; }

  const std::vector<Monomial>& terms() const { return terms_; }
  int degree() const;

private:
  int dim_;
  std::vector<Monomial> terms_;
};

/// JSON: {"dim": d, "terms": [{"coeff", "alpha", "j"}, ...]}.
nlohmann::json to_json(const PolynomialOneForm& form);
PolynomialOneForm polynomial_form_from_json(const nlohmann::json& doc);

/// f(S) = sum_w coeff(w) S(w).
class LinearFunctional {
public:
  LinearFunctional(int dim, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }
  const std::map<Word, double>& coefficients() const { return coeffs_; }

  void add(const Word& w, double c);
  double coefficient(const Word& w) const;
  double operator()(const TensorSeries& s) const;

private:
  int dim_;
  int level_;
  std::map<Word, double> coeffs_;
};

/// Level budget smaller than n + total polynomial degree.
class LevelBudgetError : public std::invalid_argument {
public:
  LevelBudgetError(int required, int given);
  int required() const { return required_; }

private:
  int required_;
};

/// Minimal truncation level that polynomial_functional needs for `forms`.
int required_level(std::span<const PolynomialOneForm> forms);

/// Linear functional f with f(S(x)_{0,1}) = [phi^1, ..., phi^n]_{0,1}(x) for
/// every bounded-variation x with x_0 = 0.
///
/// Built innermost-first: x_u^alpha is the shuffle product of the level-1
/// words in S(x)_{0,u}, and integrating against dx^j appends the letter j.
LinearFunctional polynomial_functional(std::span<const PolynomialOneForm> forms,
                                       int level_budget);

} // namespace sigrecover

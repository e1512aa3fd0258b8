#include "sigrecover/one_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sigrecover {

namespace {
// 1 - t^2 without cancellation near |t| = 1.
double one_minus_sq(double t) { return (1.0 - t) * (1.0 + t); }
} // namespace

double mollifier(double t) {
  if (!(std::fabs(t) < 1.0)) {
    return 0.0;
  }
  return std::exp(-1.0 / one_minus_sq(t));
}

double log_mollifier(double t) {
  if (!(std::fabs(t) < 1.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return -1.0 / one_minus_sq(t);
}

double mollifier_derivative(double t) {
  if (!(std::fabs(t) < 1.0)) {
    return 0.0;
  }
  const double q = one_minus_sq(t);
  return -2.0 * t / (q * q) * std::exp(-1.0 / q);
}

Box Box::cube(std::span<const double> center, double half_width) {
  Box b;
  b.lower.resize(center.size());
  b.upper.resize(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    b.lower[i] = center[i] - half_width;
    b.upper[i] = center[i] + half_width;
  }
  return b;
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) {
      return false;
    }
  }
  return true;
}

bool Box::intersects(const Box& other) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (upper[i] < other.lower[i] || other.upper[i] < lower[i]) {
      return false;
    }
  }
  return true;
}

ExtReal OneForm::pair(std::span<const double> x, std::span<const double> v) const {
  double s = 0.0;
  for (int j = 0; j < dim(); ++j) {
    const double vj = v[static_cast<std::size_t>(j)];
    if (vj != 0.0) {
      s += component(j, x) * vj;
    }
  }
  return ExtReal(s);
}

BumpOneForm::BumpOneForm(std::vector<double> center, double eta)
    : center_(std::move(center)), eta_(eta) {
  if (center_.size() < 2) {
    throw std::invalid_argument("bump one-form needs dimension >= 2, got " +
                                std::to_string(center_.size()));
  }
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
    throw std::invalid_argument("bump one-form needs eta > 0");
  }
}

double BumpOneForm::log_phi1(std::span<const double> x) const {
  double l = 0.0;
  for (std::size_t i = 0; i < center_.size(); ++i) {
    const double t = (x[i] - center_[i]) / eta_;
    if (!(std::fabs(t) < 1.0)) {
      return -std::numeric_limits<double>::infinity();
    }
    l -= 1.0 / one_minus_sq(t);
  }
  const double h2 = mollifier((x[1] - center_[1]) / eta_);
  return l + h2 * h2;
}

double BumpOneForm::component(int j, std::span<const double> x) const {
  if (j != 0) {
    return 0.0;
  }
  const double l = log_phi1(x);
  return l == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(l);
}

double BumpOneForm::partial(int j, int k, std::span<const double> x) const {
  if (j != 0) {
    return 0.0;
  }
  const std::size_t d = center_.size();
  std::vector<double> t(d);
  for (std::size_t i = 0; i < d; ++i) {
    t[i] = (x[i] - center_[i]) / eta_;
    if (!(std::fabs(t[i]) < 1.0)) {
      return 0.0;
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  double others = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i != kk) {
      others *= mollifier(t[i]);
    }
  }
  const double h2 = mollifier(t[1]);
  const double g = std::exp(h2 * h2);
  if (kk == 1) {
    // d/dx^2 [h(t2) exp(h(t2)^2)] = h'(t2) exp(h^2) (1 + 2 h^2) / eta
    return others * mollifier_derivative(t[1]) * g * (1.0 + 2.0 * h2 * h2) / eta_;
  }
  return others * mollifier_derivative(t[kk]) * g / eta_;
}

std::optional<Box> BumpOneForm::support() const { return Box::cube(center_, eta_); }

double BumpOneForm::sup_norm() const {
  // Maximum at the center: h(0)^d exp(h(0)^2).
  const double d = static_cast<double>(center_.size());
  return std::exp(-d + std::exp(-2.0));
}

ExtReal BumpOneForm::pair(std::span<const double> x, std::span<const double> v) const {
  if (v[0] == 0.0) {
    return {};
  }
  const double l = log_phi1(x);
  if (l == -std::numeric_limits<double>::infinity()) {
    return {};
  }
  return ExtReal::from_log(l + std::log(std::fabs(v[0])), v[0] < 0.0);
}

OneFormPtr bump_one_form(std::vector<double> center, double eta) {
  return std::make_shared<BumpOneForm>(std::move(center), eta);
}

CoordinateOneForm::CoordinateOneForm(int dim, int j, std::optional<Box> box)
    : dim_(dim), j_(j), box_(std::move(box)) {
  if (j < 0 || j >= dim) {
    throw std::invalid_argument("coordinate one-form: index out of range");
  }
}

double CoordinateOneForm::component(int j, std::span<const double> x) const {
  if (j != j_) {
    return 0.0;
  }
  if (box_ && !box_->contains(x)) {
    return 0.0;
  }
  return 1.0;
}

int Monomial::degree() const {
  int s = 0;
  for (int a : alpha) {
    s += a;
  }
  return s;
}

PolynomialOneForm::PolynomialOneForm(int dim, std::vector<Monomial> terms)
    : dim_(dim), terms_(std::move(terms)) {
  if (dim < 1) {
    throw std::invalid_argument("polynomial one-form: dimension must be >= 1");
  }
  for (auto& m : terms_) {
    if (m.alpha.empty()) {
      m.alpha.assign(static_cast<std::size_t>(dim), 0);
    }
    if (static_cast<int>(m.alpha.size()) != dim) {
      throw std::invalid_argument("polynomial one-form: multi-index length != dim");
    }
    if (std::any_of(m.alpha.begin(), m.alpha.end(), [](int a) { return a < 0; })) {
      throw std::invalid_argument("polynomial one-form: negative exponent");
    }
    if (m.j < 1 || m.j > dim) {
      throw std::invalid_argument("polynomial one-form: differential index out of range");
    }
  }
}

PolynomialOneForm PolynomialOneForm::coordinate(int dim, int j) {
  return PolynomialOneForm(dim, {Monomial{1.0, std::vector<int>(static_cast<std::size_t>(dim), 0), j}});
}

double PolynomialOneForm::component(int j, std::span<const double> x) const {
  double s = 0.0;
  for (const auto& m : terms_) {
    if (m.j - 1 != j) {
      continue;
    }
    double v = m.coeff;
    for (std::size_t i = 0; i < m.alpha.size(); ++i) {
      for (int p = 0; p < m.alpha[i]; ++p) {
        v *= x[i];
      }
    }
    s += v;
  }
  return s;
}

double PolynomialOneForm::partial(int j, int k, std::span<const double> x) const {
  double s = 0.0;
  const auto kk = static_cast<std::size_t>(k);
  for (const auto& m : terms_) {
    if (m.j - 1 != j || m.alpha[kk] == 0) {
      continue;
    }
    double v = m.coeff * m.alpha[kk];
    for (std::size_t i = 0; i < m.alpha.size(); ++i) {
      const int p = m.alpha[i] - (i == kk ? 1 : 0);
      for (int r = 0; r < p; ++r) {
        v *= x[i];
      }
    }
    s += v;
  }
  return s;
}

int PolynomialOneForm::degree() const {
  int d = 0;
  for (const auto& m : terms_) {
    d = std::max(d, m.degree());
  }
  return d;
}

nlohmann::json to_json(const PolynomialOneForm& form) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& m : form.terms()) {
    terms.push_back({{"coeff", m.coeff}, {"alpha", m.alpha}, {"j", m.j}});
  }
  return {{"dim", form.dim()}, {"terms", terms}};
}

PolynomialOneForm polynomial_form_from_json(const nlohmann::json& doc) {
  try {
    const int dim = doc.at("dim").get<int>();
    std::vector<Monomial> terms;
    for (const auto& t : doc.at("terms")) {
      for (const auto& [key, _] : t.items()) {
        if (key != "coeff" && key != "alpha" && key != "j") {
          throw std::invalid_argument("polynomial one-form json: unknown key '" + key + "'");
        }
      }
      Monomial m;
      m.coeff = t.at("coeff").get<double>();
      m.alpha = t.at("alpha").get<std::vector<int>>();
      m.j = t.at("j").get<int>();
      terms.push_back(std::move(m));
    }
    return PolynomialOneForm(dim, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("polynomial one-form json: ") + e.what());
  }
}

LinearFunctional::LinearFunctional(int dim, int level) : dim_(dim), level_(level) {
  if (dim < 1 || level < 0) {
    throw std::invalid_argument("linear functional: need dim >= 1 and level >= 0");
  }
}

void LinearFunctional::add(const Word& w, double c) {
  if (w.size() > static_cast<std::size_t>(level_) || !w.valid_for(dim_)) {
    throw ShapeMismatch("linear functional: word " + w.to_string() + " out of range");
  }
  if (c == 0.0) {
    return;
  }
  auto [it, inserted] = coeffs_.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) {
      coeffs_.erase(it);
    }
  }
}

double LinearFunctional::coefficient(const Word& w) const {
  auto it = coeffs_.find(w);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double LinearFunctional::operator()(const TensorSeries& s) const {
  if (s.dim() != dim_ || s.level() < level_) {
    throw ShapeMismatch("linear functional: series has dim " + std::to_string(s.dim()) +
                        " level " + std::to_string(s.level()) + ", functional needs dim " +
                        std::to_string(dim_) + " level >= " + std::to_string(level_));
  }
  double acc = 0.0;
  for (const auto& [w, c] : coeffs_) {
    acc += c * s[w];
  }
  return acc;
}

LevelBudgetError::LevelBudgetError(int required, int given)
    : std::invalid_argument("level budget " + std::to_string(given) +
                            " too small; polynomial functional needs level " +
                            std::to_string(required)),
      required_(required) {}

} // namespace sigrecover

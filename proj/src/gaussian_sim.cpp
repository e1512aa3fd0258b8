#include "sigrecover/gaussian_sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace sigrecover {

std::string to_string(GaussianVariant v) {
  switch (v) {
  case GaussianVariant::FBM:
    return "fbm";
  case GaussianVariant::OU:
    return "ou";
  case GaussianVariant::BRIDGE:
    return "bridge";
  }
  return "?";
}

GaussianVariant parse_variant(const std::string& name) {
  if (name == "fbm" || name == "bm") {
    return GaussianVariant::FBM;
  }
  if (name == "ou") {
    return GaussianVariant::OU;
  }
  if (name == "bridge") {
    return GaussianVariant::BRIDGE;
  }
  throw std::invalid_argument("unknown model '" + name + "' (expected fbm, bm, ou, bridge)");
}

void GaussianModel::validate() const {
  if (variant == GaussianVariant::FBM && !(hurst > 0.25 && hurst < 1.0)) {
    throw std::invalid_argument("fbm: Hurst parameter must lie in (1/4, 1)");
  }
  if (dim < 1) {
    throw std::invalid_argument("gaussian model: dim must be >= 1");
  }
  if (n_points < 2) {
    throw std::invalid_argument("gaussian model: n_points must be >= 2");
  }
}

double covariance(const GaussianModel& model, double s, double t) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("covariance: arguments must lie in [0, 1]");
  }
  switch (model.variant) {
  case GaussianVariant::FBM: {
    const double h2 = 2.0 * model.hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::fabs(t - s), h2));
  }
  case GaussianVariant::OU:
    return std::exp(-std::fabs(t - s)) * -std::expm1(-2.0 * std::min(s, t)) / 2.0;
  case GaussianVariant::BRIDGE:
    return std::min(s, t) - s * t;
  }
  return 0.0;
}

CovarianceError::CovarianceError(const std::string& what, double min_eigenvalue)
    : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}

namespace {

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  t.back() = 1.0;
  return t;
}

} // namespace

GaussianSampler::GaussianSampler(const GaussianModel& model)
    : GaussianSampler(model, uniform_grid(model.n_points)) {}

GaussianSampler::GaussianSampler(const GaussianModel& model, std::vector<double> times)
    : model_(model), times_(std::move(times)) {
  model_.validate();
  if (times_.size() < 2 || times_.front() != 0.0 || times_.back() != 1.0) {
    throw std::invalid_argument("sampler: grid must run from 0 to 1");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    // X_0 = 0 always, X_1 = 0 for the bridge: drop pinned points.
    const double t = times_[i];
    if (t == 0.0 || (model_.variant == GaussianVariant::BRIDGE && t == 1.0)) {
      continue;
    }
    free_.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(free_.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double c = covariance(model_, times_[free_[a]], times_[free_[b]]);
      gram(a, b) = c;
      gram(b, a) = c;
    }
  }
  if (n == 0) {
    return;
  }
  for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
    Eigen::MatrixXd m = gram;
    m.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  throw CovarianceError("sampler: covariance matrix not positive definite (min eigenvalue " +
                            std::to_string(lmin) + ")",
                        lmin);
}

Eigen::VectorXd GaussianSampler::sample_coordinate(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(factor_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z[i] = normal(rng);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(times_.size()));
  if (z.size() > 0) {
    const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      out[static_cast<Eigen::Index>(free_[k])] = x[static_cast<Eigen::Index>(k)];
    }
  }
  return out;
}

PiecewiseLinearPath GaussianSampler::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  const std::size_t n = times_.size();
  const auto d = static_cast<std::size_t>(model_.dim);
  std::vector<Point> pts(n, Point(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    const Eigen::VectorXd x = sample_coordinate(rng);
    for (std::size_t k = 0; k < n; ++k) {
      pts[k][i] = x[static_cast<Eigen::Index>(k)];
    }
  }
  return PiecewiseLinearPath(times_, std::move(pts));
}

PiecewiseLinearPath sample_path(const GaussianModel& model) {
  return GaussianSampler(model).sample(model.seed);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

nlohmann::json to_json(const GaussianModel& m) {
  nlohmann::json j = {{"model", to_string(m.variant)},
                      {"dim", m.dim},
                      {"n_points", m.n_points},
                      {"seed", m.seed}};
  if (m.variant == GaussianVariant::FBM) {
    j["hurst"] = m.hurst;
  }
  return j;
}

} // namespace sigrecover

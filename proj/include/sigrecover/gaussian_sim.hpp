#pragma once

#include "sigrecover/paths.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sigrecover {

enum class GaussianVariant { FBM, OU, BRIDGE };

std::string to_string(GaussianVariant v);
/// "fbm", "bm" (fBM with H = 1/2), "ou" or "bridge".
GaussianVariant parse_variant(const std::string& name);

struct GaussianModel {
  GaussianVariant variant = GaussianVariant::FBM;
  double hurst = 0.5; ///< FBM only, in (1/4, 1)
  int dim = 2;
  std::size_t n_points = 513; ///< grid 0, 1/(n-1), ..., 1
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Per-coordinate covariance R(s, t) of the model, s, t in [0, 1].
double covariance(const GaussianModel& model, double s, double t);

/// The Gram matrix is not positive definite even after jitter.
class CovarianceError : public std::runtime_error {
public:
  CovarianceError(const std::string& what, double min_eigenvalue);
  double min_eigenvalue() const { return min_eigenvalue_; }

private:
  double min_eigenvalue_;
};

/// Exact-covariance sampler on a fixed time grid. The Cholesky factor of the
/// Gram matrix (over grid times with nonzero variance) is computed once.
class GaussianSampler {
public:
  /// Uniform grid with model.n_points knots.
  explicit GaussianSampler(const GaussianModel& model);
  /// Arbitrary grid; must start at 0 and end at 1.
  GaussianSampler(const GaussianModel& model, std::vector<double> times);

  const GaussianModel& model() const { return model_; }
  const std::vector<double>& times() const { return times_; }
  /// Diagonal jitter that was needed, 0 if none.
  double jitter() const { return jitter_; }

  /// One path with independent coordinates, seeded by `seed`.
  PiecewiseLinearPath sample(std::uint64_t seed) const;
  /// Values at the grid for one coordinate using the supplied draws.
  Eigen::VectorXd sample_coordinate(std::mt19937_64& rng) const;

private:
  GaussianModel model_;
  std::vector<double> times_;
  std::vector<std::size_t> free_; ///< grid indices with nonzero variance
  Eigen::MatrixXd factor_;        ///< lower Cholesky factor over free_
  double jitter_ = 0.0;
};

/// Path drawn with the model's own seed.
PiecewiseLinearPath sample_path(const GaussianModel& model);

/// Seed of trial `trial` derived from a base seed (splitmix64 of
/// seed + golden-ratio increment * (trial + 1)).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

nlohmann::json to_json(const GaussianModel& m);

} // namespace sigrecover

#pragma once

#include "sigrecover/gaussian_sim.hpp"
#include "sigrecover/reconstruct.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace sigrecover {

struct ConvergenceConfig {
  GaussianModel model; ///< model.seed is the base seed for all trials
  std::vector<int> n_list{4, 8, 16, 32};
  /// delta_n = delta_ratio * eps_n with eps_n = 1 / n.
  double delta_ratio = 0.1;
  std::size_t trials = 200;
  unsigned threads = 1;
  /// Also recover each word from extended signatures (slow for large n).
  bool recover = false;
  /// Search settings for `recover`; the lattice is replaced per n.
  ReconstructionConfig recovery;

  void validate() const;
};

struct ConvergenceRow {
  int n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t trial = 0;
  double sup_error = 0.0;
  double bound = 0.0; ///< 11 sqrt(d) eps_n
  bool violated = false;
  std::size_t word_len = 0; ///< moves m of the visited word
  std::optional<bool> recovered_ok;
};

struct ConvergenceLevel {
  int n = 0;
  double epsilon = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  double violation_fraction = 0.0;
  double median_ratio = 0.0; ///< median sup_error / eps_n
  std::optional<double> recovery_rate;
};

struct ConvergenceResult {
  ConvergenceConfig config;
  std::vector<ConvergenceRow> rows; ///< ordered by (n, trial)
  std::vector<ConvergenceLevel> levels;

  bool median_strictly_decreasing() const;
};

/// One sampled path per trial (the same paths for every n), its geometric
/// visit record on the (1/n, delta_ratio/n) lattice, and the sup distance
/// between the polygonal approximation and the path.
ConvergenceResult convergence_study(const ConvergenceConfig& config);

/// Long format: n,epsilon,delta,trial,sup_error,bound,violated,word_len,recovered_ok
void write_convergence_csv(std::ostream& os, const ConvergenceResult& r);
nlohmann::json convergence_summary(const ConvergenceResult& r);

} // namespace sigrecover

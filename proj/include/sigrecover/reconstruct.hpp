#pragma once

#include "sigrecover/ext_real.hpp"
#include "sigrecover/iterated_integral.hpp"
#include "sigrecover/lattice.hpp"
#include "sigrecover/paths.hpp"

#include "json.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigrecover {

/// Cut-off below which an extended signature of n letters counts as zero:
///   tau(n) = 10^(log10_base + n * log10_per_letter) * prod_k |phi^k|_inf * (1 + V)^n
/// with V the polygonal length of the path.
///
/// {log10_base = -8, log10_per_letter = 0} is the plain relative rule. It is
/// far above the true-word value of long words (each letter contributes a
/// factor well below |phi|_inf * (1 + V)), so the default keeps a per-letter
/// floor instead. Wrong words evaluate to exactly zero in the integrator.
struct ZeroThreshold {
  double log10_base = 0.0;
  double log10_per_letter = -1.0e6;

  ExtReal operator()(std::size_t letters, double sup_norm, double path_length) const;
};

struct ReconstructionConfig {
  CubeLattice lattice{0.25, 0.025};
  /// Largest number of moves m in a recovered word.
  std::size_t max_word_length = 4096;
  ZeroThreshold zero;
  /// Candidate letters are the cubes whose closure meets [-r, r]^d.
  double candidate_radius = 4.0;
  /// Upper bound on oracle evaluations during one search.
  std::size_t search_budget = 2'000'000;
  /// Recovery only needs zero versus nonzero, so refinement is looser than
  /// the signature default.
  QuadratureOptions quadrature{.adaptive_tolerance = 1e-8};
};

/// Extended-signature queries for lattice words, by letter index.
///
/// Words are built incrementally from opaque prefix states. Only the letters
/// returned by letters() can occur in a word of nonzero value; index 0 must be
/// the origin.
class WordOracle {
public:
  struct State {
    virtual ~State() = default;
  };
  using StatePtr = std::shared_ptr<const State>;

  virtual ~WordOracle() = default;

  virtual int dim() const = 0;
  virtual const std::vector<LatticePoint>& letters() const = 0;

  /// State of the empty word.
  virtual StatePtr root() const = 0;
  virtual StatePtr extend(const StatePtr& prefix, std::size_t letter) const = 0;
  virtual ExtReal value(const StatePtr& word) const = 0;
  /// tau_zero for a word with the given number of letters.
  virtual ExtReal threshold(std::size_t letters) const = 0;

  /// Values of `word` with position `pos` replaced by each of `replacements`.
  /// The default rebuilds every word from scratch.
  virtual std::vector<ExtReal> substitutions(const std::vector<std::size_t>& word,
                                             std::size_t pos,
                                             const std::vector<std::size_t>& replacements) const;

  ExtReal value_of(const std::vector<std::size_t>& word) const;
  bool is_zero(const ExtReal& v, std::size_t letters) const;
};

/// Oracle backed by nested quadrature along a path. Bump forms are built only
/// for candidate cubes whose closure the path meets.
class PathWordOracle final : public WordOracle {
public:
  PathWordOracle(const PiecewiseLinearPath& path, const ReconstructionConfig& config);

  int dim() const override { return dim_; }
  const std::vector<LatticePoint>& letters() const override { return letters_; }
  StatePtr root() const override;
  StatePtr extend(const StatePtr& prefix, std::size_t letter) const override;
  ExtReal value(const StatePtr& word) const override;
  ExtReal threshold(std::size_t letters) const override;
  /// One forward/backward sweep, then one integral per replacement.
  std::vector<ExtReal> substitutions(const std::vector<std::size_t>& word, std::size_t pos,
                                     const std::vector<std::size_t>& replacements) const override;

  const IteratedIntegrator& integrator() const { return *integrator_; }

private:
  int dim_;
  ZeroThreshold zero_;
  double sup_norm_;
  double path_length_;
  std::vector<LatticePoint> letters_;
  std::unique_ptr<IteratedIntegrator> integrator_;

  // Sweep cache for repeated substitution queries on one word.
  mutable std::vector<std::size_t> sweep_word_;
  mutable std::vector<IteratedIntegrator::Level> forward_;
  mutable std::vector<IteratedIntegrator::Level> backward_;
};

/// Oracle from an arbitrary evaluation function, with no incremental reuse.
class FunctionWordOracle final : public WordOracle {
public:
  using Evaluator = std::function<ExtReal(const LatticeWord&)>;

  /// `letters` must start with the origin.
  FunctionWordOracle(std::vector<LatticePoint> letters, Evaluator evaluate, ExtReal threshold);

  int dim() const override;
  const std::vector<LatticePoint>& letters() const override { return letters_; }
  StatePtr root() const override;
  StatePtr extend(const StatePtr& prefix, std::size_t letter) const override;
  ExtReal value(const StatePtr& word) const override;
  ExtReal threshold(std::size_t) const override { return threshold_; }

private:
  std::vector<LatticePoint> letters_;
  Evaluator evaluate_;
  ExtReal threshold_;
};

/// No candidate word passed verification.
class AmbiguousRecovery : public std::runtime_error {
public:
  AmbiguousRecovery(const std::string& what, std::vector<LatticeWord> candidates);
  const std::vector<LatticeWord>& candidates() const { return candidates_; }

private:
  std::vector<LatticeWord> candidates_;
};

class SearchBudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct WordRecovery {
  LatticeWord word;
  ExtReal value;
  std::size_t evaluations = 0;
};

/// The unique admissible word with nonzero extended signature that admits no
/// nonzero one-letter extension.
///
/// Greedy prefix extension: among the letters c for which prefix + c is
/// nonzero, the next letter of the visited word is the one whose alternating
/// chain prefix + c + a + c + ... outlives that of every rival a. A final pass
/// checks that the word is nonzero while every single-letter substitution and
/// every one-letter extension is zero; any surviving competitor raises
/// AmbiguousRecovery.
WordRecovery recover_word(const WordOracle& oracle, const ReconstructionConfig& config);

/// [phi_{z_0}, ..., phi_{z_m}]_{0,1}(x) with bump forms on the cubes of `word`.
ExtReal word_extended_signature(const PiecewiseLinearPath& path, const LatticeWord& word,
                                const CubeLattice& lattice, QuadratureOptions options = {});

/// Linear from eps z_{k-1} to eps z_k over [tau_{k-1}, tau_k] (tau_0 = 0),
/// constant eps z_m on [tau_m, 1].
PiecewiseLinearPath polygonal_path(const LatticeWord& word, const std::vector<double>& times,
                                   const CubeLattice& lattice);

/// sup_t |a(t) - b(t)|, exact for piecewise-linear paths.
double sup_distance(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b);

struct ReconstructionResult {
  LatticeWord word;
  ExtReal value;
  PiecewiseLinearPath polygon;
  VisitRecord geometric;
  bool agrees = false;
  double sup_error = 0.0;
  std::size_t evaluations = 0;
};

/// Recovers the word from extended signatures of `path`, and places the
/// polygon at the geometric visit times (the signature cannot determine them).
/// Throws AmbiguousRecovery or SearchBudgetExceeded from the search.
ReconstructionResult reconstruct(const PiecewiseLinearPath& path,
                                 const ReconstructionConfig& config);

nlohmann::json to_json(const ReconstructionConfig& c);

} // namespace sigrecover

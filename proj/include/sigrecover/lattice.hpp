#pragma once

#include "sigrecover/one_forms.hpp"
#include "sigrecover/paths.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigrecover {

using LatticePoint = std::vector<long>;

std::string to_string(const LatticePoint& z);

/// Decomposition of R^d into open cubes
///   H_z = {x : |x^i - eps z^i| < (eps - delta)/2 for all i}
/// separated by closed tunnels of width delta.
class CubeLattice {
public:
  CubeLattice(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  /// (eps - delta) / 2.
  double half_width() const { return 0.5 * (epsilon_ - delta_); }

  std::vector<double> center(const LatticePoint& z) const;
  /// Closure of H_z.
  Box closed_cube(const LatticePoint& z) const;
  bool in_open_cube(std::span<const double> x, const LatticePoint& z) const;

  /// The bump one-form supported on the closure of H_z.
  OneFormPtr bump_form(const LatticePoint& z) const;

private:
  double epsilon_;
  double delta_;
};

/// (z_0 = 0, z_1, ..., z_m) with z_k != z_{k+1}.
class LatticeWord {
public:
  explicit LatticeWord(int dim);
  explicit LatticeWord(std::vector<LatticePoint> letters);

  int dim() const { return dim_; }
  /// Number of letters, m + 1.
  std::size_t size() const { return letters_.size(); }
  /// m, the number of moves.
  std::size_t moves() const { return letters_.size() - 1; }
  const LatticePoint& operator[](std::size_t i) const { return letters_[i]; }
  const LatticePoint& back() const { return letters_.back(); }
  const std::vector<LatticePoint>& letters() const { return letters_; }

  /// Throws if z equals the current last letter or has the wrong dimension.
  void push_back(LatticePoint z);
  LatticeWord with_letter(std::size_t i, LatticePoint z) const;

  std::string to_string() const;

  friend bool operator==(const LatticeWord&, const LatticeWord&) = default;

private:
  int dim_;
  std::vector<LatticePoint> letters_;
};

/// Cubes visited in order and their entry times.
struct VisitRecord {
  LatticeWord word;
  std::vector<double> times; ///< tau_1 < ... < tau_m in (0, 1)

  std::size_t count() const { return times.size(); }
};

/// The z with x in the open cube H_z, or nullopt when x lies in a tunnel.
std::optional<LatticePoint> locate(std::span<const double> x, const CubeLattice& lattice);

/// Exact visit sequence of a path started at the origin.
///
/// tau_k is the first time after tau_{k-1} at which the path enters an open
/// cube other than the current one; it is found per segment by intersecting
/// the segment with each nearby open cube in closed form. Re-entering the
/// current cube does not count. Entries at the same parameter are ordered by
/// lexicographically smallest z.
VisitRecord visit_sequence(const PiecewiseLinearPath& path, const CubeLattice& lattice);

/// Lattice points whose closed cube meets the path, sorted.
std::vector<LatticePoint> touched_cubes(const PiecewiseLinearPath& path,
                                        const CubeLattice& lattice);

std::ostream& operator<<(std::ostream& os, const LatticeWord& w);

nlohmann::json to_json(const LatticeWord& w);
LatticeWord lattice_word_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const VisitRecord& r);
VisitRecord visit_record_from_json(const nlohmann::json& doc);

} // namespace sigrecover

#pragma once

#include "sigrecover/ext_real.hpp"
#include "sigrecover/one_forms.hpp"
#include "sigrecover/paths.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace sigrecover {

struct QuadratureOptions {
  /// Composite Simpson sub-intervals per piece. A piece is a stretch of a
  /// path segment between consecutive support-boundary crossings.
  int substeps = 64;
  /// A piece is bisected until, on each half and for every form on it,
  /// composite Simpson changes by at most this fraction of the form's
  /// integral of |integrand| over the whole piece when the step count is
  /// halved. Bumps grazed by a chord are sharply peaked and need it.
  /// 0 disables refinement.
  double adaptive_tolerance = 1e-10;
  int max_bisections = 48;
  /// Also evaluate with half the substeps and report the difference.
  bool estimate_error = false;
};

struct IteratedIntegral {
  ExtReal value;
  /// |I(K) - I(K/2)| when requested, NaN otherwise.
  double error_estimate = std::numeric_limits<double>::quiet_NaN();
  int substeps = 0;

  double to_double() const { return value.to_double(); }
};

/// Nested quadrature of iterated integrals
///   J_0 = 1,  J_k(u) = int_s^u J_{k-1}(r) phi^k(dx_r),
/// along a piecewise-linear path, for a fixed family of one-forms.
///
/// Every path segment is split where it crosses a support box boundary and
/// each resulting piece carries its own Simpson refinement, so thin excursions
/// into a support still get the full node count. J_k only changes on pieces
/// inside the support of phi^k; elsewhere it is carried as a constant, which
/// makes integrals over forms the path never meets exactly zero.
///
/// Values are kept in extended range (per-piece binary scale) because
/// products of many bump integrals underflow double.
class IteratedIntegrator {
public:
  struct ActivePiece {
    std::size_t piece;
    std::int64_t scale;
    std::vector<double> values; ///< J at the piece's 2K+1 nodes, times 2^scale
  };

  /// A running iterated integral as a function on the quadrature grid.
  /// Between active pieces it is constant: equal to the last value of the
  /// preceding active piece, or `initial` before the first one.
  struct Level {
    ExtReal initial;
    std::vector<ActivePiece> active;
    ExtReal final;

    bool is_zero() const { return active.empty() && initial.is_zero() && final.is_zero(); }
  };

  IteratedIntegrator(const PiecewiseLinearPath& path, std::vector<OneFormPtr> forms,
                     double s = 0.0, double t = 1.0, QuadratureOptions options = {});

  std::size_t form_count() const { return forms_.size(); }
  const OneForm& form(std::size_t i) const { return *forms_[i]; }
  /// The path meets the support of form i with a nonzero integrand somewhere.
  bool touches(std::size_t i) const { return !tracks_[i].empty(); }
  int substeps() const { return substeps_; }
  double piece_width(std::size_t piece) const { return pieces_[piece].u1 - pieces_[piece].u0; }
  std::size_t piece_count() const { return pieces_.size(); }

  /// The constant function 1 (J_0, and also the empty backward integral).
  Level unit() const;
  /// J_k(u) = int_s^u J_{k-1} phi(dx) for the registered form `form`.
  Level extend(const Level& prev, std::size_t form) const;
  /// K_k(u) = int_u^t phi(dx) K_{k+1}, the backward counterpart.
  Level extend_backward(const Level& next, std::size_t form) const;
  /// int_s^t J(u) K(u) phi(dx_u). With J a forward level for a prefix and
  /// K a backward level for a suffix this is the value of the word
  /// prefix + form + suffix.
  ExtReal combine(const Level& prefix, std::size_t form, const Level& suffix) const;
  /// Iterated integral along the given form indices, innermost first.
  ExtReal evaluate(std::span<const std::size_t> sequence) const;

private:
  struct Piece {
    double u0;
    double u1;
    int substeps;
  };
  struct FormPiece {
    std::size_t piece = 0;
    std::int64_t scale = 0;
    std::vector<double> integrand; ///< phi(x)[dx/du] at nodes, times 2^scale
  };

  int substeps_;
  std::vector<OneFormPtr> forms_;
  std::vector<Piece> pieces_;
  std::vector<std::vector<FormPiece>> tracks_;
};

/// [phi^1, ..., phi^n]_{s,t}(x) by nested composite Simpson quadrature.
IteratedIntegral extended_signature(const PiecewiseLinearPath& path,
                                    std::span<const OneFormPtr> forms, double s = 0.0,
                                    double t = 1.0, QuadratureOptions options = {});

/// Parameter interval {lambda : p + lambda * dir in box} on the whole line,
/// or empty. With `open`, the box is taken as open and the interval is open.
struct LineInterval {
  double lo;
  double hi;
};
std::optional<LineInterval> line_box_interval(std::span<const double> p,
                                              std::span<const double> dir,
                                              std::span<const double> lower,
                                              std::span<const double> upper, bool open);

} // namespace sigrecover

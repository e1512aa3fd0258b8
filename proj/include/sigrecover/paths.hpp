#pragma once

#include "sigrecover/tensor_algebra.hpp"

#include <span>
#include <vector>

namespace sigrecover {

using Point = std::vector<double>;

/// Piecewise-linear path on [0, 1]: knots (t_i, x_i) with t_0 = 0, t_n = 1,
/// strictly increasing times, and at least two knots.
///
/// Most of the library works with paths started at the origin; operations
/// that require it check starts_at_origin() themselves.
class PiecewiseLinearPath {
public:
  PiecewiseLinearPath(std::vector<double> times, std::vector<Point> points);
  /// Uniform time grid over the given points.
  static PiecewiseLinearPath uniform(std::vector<Point> points);
  /// Straight line from the origin to `end`.
  static PiecewiseLinearPath line(const Point& end);
  /// Polyline through the origin and the given vertices, uniform in time.
  static PiecewiseLinearPath polyline(const std::vector<Point>& vertices_after_origin);

  int dim() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  std::size_t segments() const { return times_.size() - 1; }

  double time(std::size_t i) const { return times_[i]; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& times() const { return times_; }
  std::vector<Point> points() const;

  /// Linear interpolation at t in [0, 1].
  Point at(double t) const;
  void at(double t, std::span<double> out) const;
  /// Index i of the segment [t_i, t_{i+1}] containing t (last segment for t = 1).
  std::size_t segment_of(double t) const;

  /// x_{i+1} - x_i.
  Point increment(std::size_t segment) const;
  /// x_1 - x_0.
  Point total_increment() const;
  /// Euclidean length of the polyline.
  double polygonal_length() const;

  bool starts_at_origin() const;
  /// Copy translated by c.
  PiecewiseLinearPath translated(std::span<const double> c) const;
  /// The same knots restricted to [s, t] and rescaled to [0, 1]; not translated.
  PiecewiseLinearPath restricted(double s, double t) const;

private:
  int dim_;
  std::vector<double> times_;
  std::vector<double> coords_;
};

/// Continuous strictly increasing self-map of [0, 1] fixing the endpoints,
/// represented by piecewise-linear knots.
class Reparametrization {
public:
  /// knots_in and knots_out both strictly increasing from 0 to 1.
  Reparametrization(std::vector<double> knots_in, std::vector<double> knots_out);
  static Reparametrization identity();
  /// Piecewise-linear interpolation of t -> t^p on n+1 uniform knots.
  static Reparametrization power(double p, std::size_t n);

  double operator()(double t) const;
  double inverse(double s) const;

  const std::vector<double>& knots_in() const { return in_; }
  const std::vector<double>& knots_out() const { return out_; }

private:
  std::vector<double> in_;
  std::vector<double> out_;
};

/// Signature of the path to truncation level L (left fold of segment
/// signatures under Chen concatenation).
TensorSeries path_signature(const PiecewiseLinearPath& path, int level);
/// Signature of the path restricted to [s, t].
TensorSeries path_signature(const PiecewiseLinearPath& path, int level, double s,
                            double t);

/// t -> x_{sigma(t)}, sampled on n_out uniform knots merged with the
/// preimages under sigma of the path's own knots, so the image polyline is
/// reproduced exactly.
PiecewiseLinearPath reparametrize(const PiecewiseLinearPath& path,
                                  const Reparametrization& sigma, std::size_t n_out);

/// a on [0, 1/2] followed by b translated to start at a's endpoint on [1/2, 1].
PiecewiseLinearPath concat_paths(const PiecewiseLinearPath& a,
                                 const PiecewiseLinearPath& b);
/// t -> x_{1-t} - x_1, which again starts at the origin.
PiecewiseLinearPath reverse_path(const PiecewiseLinearPath& p);

/// Lower bound on the p-variation distance between the level-<=floor(p)
/// signatures of x and y, taken over dyadic partitions of depth <= max_depth.
/// Only a diagnostic: the true metric is a supremum over all partitions.
double dyadic_pvariation_lower_bound(const PiecewiseLinearPath& x,
                                     const PiecewiseLinearPath& y, double p,
                                     int max_depth);

} // namespace sigrecover

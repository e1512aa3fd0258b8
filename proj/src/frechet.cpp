#include "sigrecover/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigrecover {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double grid_time(std::size_t i, std::size_t r) {
  return i + 1 == r ? 1.0 : static_cast<double>(i) / static_cast<double>(r - 1);
}

std::vector<Point> samples(const PiecewiseLinearPath& x, std::size_t r) {
  std::vector<Point> out;
  out.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    out.push_back(x.at(grid_time(i, r)));
  }
  return out;
}

} // namespace

double frechet_variant(const PiecewiseLinearPath& x, const PiecewiseLinearPath& y,
                       FrechetConfig config) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("frechet_variant: dimension mismatch (" +
                                std::to_string(x.dim()) + " vs " + std::to_string(y.dim()) +
                                ")");
  }
  const std::size_t r = config.resolution;
  if (r < 2) {
    throw std::invalid_argument("frechet_variant: resolution must be >= 2");
  }
  const auto xs = samples(x, r);
  const auto ys = samples(y, r);
  std::vector<double> prev(r);
  std::vector<double> cur(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const double d = distance(xs[i], ys[j]);
      double best = 0.0;
      if (i == 0 && j == 0) {
        best = d;
      } else if (i == 0) {
        best = cur[j - 1];
      } else if (j == 0) {
        best = prev[0];
      } else {
        best = std::min({prev[j], cur[j - 1], prev[j - 1]});
      }
      cur[j] = std::max(d, best);
    }
    std::swap(prev, cur);
  }
  return prev[r - 1];
}

double mesh_oscillation(const PiecewiseLinearPath& x, std::size_t resolution) {
  if (resolution < 2) {
    throw std::invalid_argument("mesh_oscillation: resolution must be >= 2");
  }
  double worst = 0.0;
  std::size_t knot = 0;
  std::vector<Point> pts;
  for (std::size_t i = 0; i + 1 < resolution; ++i) {
    const double a = grid_time(i, resolution);
    const double b = grid_time(i + 1, resolution);
    // The cell's image is the polyline through x(a), interior knots, x(b);
    // its diameter is attained at two of those vertices.
    pts.assign({x.at(a)});
    while (knot < x.size() && x.time(knot) <= a) {
      ++knot;
    }
    for (std::size_t k = knot; k < x.size() && x.time(k) < b; ++k) {
      const auto p = x.point(k);
      pts.emplace_back(p.begin(), p.end());
    }
    pts.push_back(x.at(b));
    for (std::size_t p = 0; p < pts.size(); ++p) {
      for (std::size_t q = p + 1; q < pts.size(); ++q) {
        worst = std::max(worst, distance(pts[p], pts[q]));
      }
    }
  }
  return worst;
}

bool is_degenerate(const PiecewiseLinearPath& x, double tolerance) {
  for (std::size_t i = 0; i < x.segments(); ++i) {
    if (distance(x.point(i), x.point(i + 1)) <= tolerance) {
      return true;
    }
  }
  return false;
}

} // namespace sigrecover

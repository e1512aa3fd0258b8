#pragma once

#include "sigrecover/paths.hpp"

namespace sigrecover {

struct FrechetConfig {
  /// Samples per path at times i / (resolution - 1).
  std::size_t resolution = 512;
};

/// Discrete Frechet distance between x and y sampled on a uniform grid,
/// with monotone couplings that match both endpoints. It estimates
///   inf over increasing sigma of sup_t |x_t - y_sigma(t)|
/// from above, up to the oscillation of the paths over one grid cell.
double frechet_variant(const PiecewiseLinearPath& x, const PiecewiseLinearPath& y,
                       FrechetConfig config = {});

/// Largest diameter of x over one grid cell [i/(r-1), (i+1)/(r-1)].
double mesh_oscillation(const PiecewiseLinearPath& x, std::size_t resolution);

/// Some stretch of positive duration stays within `tolerance` of a point,
/// i.e. two consecutive knots are at most `tolerance` apart.
bool is_degenerate(const PiecewiseLinearPath& x, double tolerance);

} // namespace sigrecover

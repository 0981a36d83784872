#pragma once

#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

/// Spray coefficients G^i(x, y) = Gamma^i_jk(x, y) y^j y^k, assembled as
/// g^ij (1/2 d2G/dy^j dx^k y^k - 1/2 dG/dx^j). Geodesics satisfy
/// x'' = -G(x, x').
Vec spray_coefficients(const FinslerMetric& metric, const TangentVector& v);

struct GeodesicPath {
  std::vector<double> times;
  std::vector<Vec> points;      // canonical chart points
  std::vector<Vec> velocities;
  double speed_drift = 0.0;     // max |F - F0| / F0 over nodes
  bool left_chart = false;
  bool inaccurate = false;      // speed_drift > 1e-3
};

/// Classical fourth-order Runge-Kutta on (x, y)' = (y, -G(x, y)) with a fixed
/// step (rounded so that an integer number of steps covers the horizon).
GeodesicPath integrate_geodesic(const FinslerMetric& metric, const TangentVector& start,
                                double horizon, double step);

/// exp_x(v), or the exponential map of the reversed metric when `reversed`.
/// The step is halved until the speed drift is at most 1e-6.
Vec exponential_map(const FinslerMetric& metric, const Vec& x, const Vec& v, bool reversed = false);

double constant_speed_drift(const FinslerMetric& metric, const GeodesicPath& path);

}  // namespace finsler

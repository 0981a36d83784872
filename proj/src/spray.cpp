#include "finsler/spray.hpp"

#include <cmath>
#include <sstream>

namespace finsler {

namespace {

constexpr double kDriftWarning = 1e-3;
constexpr double kExpDriftTarget = 1e-6;

}  // namespace

Vec spray_coefficients(const FinslerMetric& metric, const TangentVector& v) {
  const auto tensor = metric.fundamental_tensor(v.x, v.y);
  const auto e = metric.energy_derivatives(v.x, v.y);
  const Vec rhs = 0.5 * (metric.mixed_contraction(v.x, v.y) - e.dx);
  Eigen::LLT<Mat> llt(tensor.g);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::convexity_violation, "singular fundamental tensor in spray");
  return llt.solve(rhs);
}

GeodesicPath integrate_geodesic(const FinslerMetric& metric, const TangentVector& start,
                                double horizon, double step) {
  if (!(horizon > 0.0) || !(step > 0.0) || step > horizon)
    throw Error(ErrorKind::invalid_argument, "integrate_geodesic needs 0 < step <= horizon");
  if (start.y.isZero(0.0))
    throw Error(ErrorKind::zero_section, "geodesic needs a nonzero initial velocity");
  const Chart& chart = metric.chart();
  chart.require_valid(start.x);

  const auto steps = static_cast<long>(std::ceil(horizon / step - 1e-9));
  const double h = horizon / static_cast<double>(steps);

  GeodesicPath path;
  Vec x = chart.canonical(start.x);
  Vec y = start.y;
  const double f0 = metric.F(x, y);
  path.times.push_back(0.0);
  path.points.push_back(x);
  path.velocities.push_back(y);

  auto accel = [&](const Vec& px, const Vec& py) -> Vec {
    return -spray_coefficients(metric, TangentVector{px, py});
  };

  for (long n = 0; n < steps; ++n) {
    try {
      const Vec k1x = y;
      const Vec k1y = accel(x, y);
      const Vec k2x = y + 0.5 * h * k1y;
      const Vec k2y = accel(x + 0.5 * h * k1x, k2x);
      const Vec k3x = y + 0.5 * h * k2y;
      const Vec k3y = accel(x + 0.5 * h * k2x, k3x);
      const Vec k4x = y + h * k3y;
      const Vec k4y = accel(x + h * k3x, k4x);
      const Vec xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      const Vec yn = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      if (!chart.valid(xn)) {
        path.left_chart = true;
        break;
      }
      x = chart.canonical(xn);
      y = yn;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::invalid_point) throw;
      path.left_chart = true;
      break;
    }
    path.times.push_back(static_cast<double>(n + 1) * h);
    path.points.push_back(x);
    path.velocities.push_back(y);
    path.speed_drift = std::max(path.speed_drift, std::abs(metric.F(x, y) - f0) / f0);
  }
  path.inaccurate = path.speed_drift > kDriftWarning;
  return path;
}

Vec exponential_map(const FinslerMetric& metric, const Vec& x, const Vec& v, bool reversed) {
  const Chart& chart = metric.chart();
  chart.require_valid(x);
  if (v.isZero(0.0)) return chart.canonical(x);
  const FinslerMetric m = reversed ? reversed_metric(metric) : metric;
  for (int steps = 64; steps <= (1 << 18); steps *= 2) {
    const auto path = integrate_geodesic(m, TangentVector{x, v}, 1.0, 1.0 / steps);
    if (path.left_chart) {
      std::ostringstream os;
      os << "exponential map left the chart near (" << path.points.back().transpose() << ")";
      throw ChartExitError(os.str(), path.points.back());
    }
    if (path.speed_drift <= kExpDriftTarget) return path.points.back();
  }
  throw Error(ErrorKind::no_convergence, "exponential map: speed drift stays above 1e-6");
}

double constant_speed_drift(const FinslerMetric& metric, const GeodesicPath& path) {
  if (path.points.empty()) throw Error(ErrorKind::invalid_argument, "empty geodesic path");
  const double f0 = metric.F(path.points.front(), path.velocities.front());
  if (!(f0 > 0.0)) throw Error(ErrorKind::degenerate_path, "degenerate path: zero speed at start");
  double drift = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const double f = metric.F(path.points[i], path.velocities[i]);
    if (!(f > 0.0)) throw Error(ErrorKind::degenerate_path, "degenerate path: zero speed at a node");
    drift = std::max(drift, std::abs(f - f0) / f0);
  }
  return drift;
}

}  // namespace finsler

#include "finsler/presets.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace finsler::presets {

Chart plane() { return Chart(2); }

Chart flat_cylinder() {
  Chart c(2);
  c.set_period(0, 2.0 * std::numbers::pi);
  return c;
}

Chart upper_half_plane() {
  Chart c(2);
  c.set_bounds(1, 0.0, std::numeric_limits<double>::infinity());
  return c;
}

FinslerMetric euclidean(int dim) { return euclidean_on(Chart(dim)); }

FinslerMetric euclidean_on(Chart chart) {
  const int n = chart.dim();
  return FinslerMetric::riemannian(std::move(chart), MatrixField::constant(Mat::Identity(n, n)));
}

FinslerMetric hyperbolic_half_plane() {
  MatrixField a;
  a.value = [](const Vec& x) -> Mat {
    return Mat::Identity(2, 2) / (x[1] * x[1]);
  };
  a.derivatives = [](const Vec& x) -> std::vector<Mat> {
    return {Mat::Zero(2, 2), Mat::Identity(2, 2) * (-2.0 / (x[1] * x[1] * x[1]))};
  };
  return FinslerMetric::riemannian(upper_half_plane(), std::move(a));
}

FinslerMetric constant_randers(Chart chart, Vec b) {
  const int n = chart.dim();
  return FinslerMetric::randers(std::move(chart), MatrixField::constant(Mat::Identity(n, n)),
                                CovectorField::constant(std::move(b)));
}

Domain disk(Chart chart, double radius) {
  const double r2 = radius * radius;
  return Domain(std::move(chart),
                BoundaryFunction([r2](const Vec& x) { return 1.0 - x.squaredNorm() / r2; },
                                 [r2](const Vec& x) -> Vec { return -2.0 * x / r2; },
                                 [r2](const Vec& x) -> Mat {
                                   return -2.0 * Mat::Identity(x.size(), x.size()) / r2;
                                 }));
}

Domain half_plane(Chart chart, double level) {
  return Domain(std::move(chart),
                BoundaryFunction([level](const Vec& x) { return x[1] - level; },
                                 [](const Vec& x) -> Vec {
                                   Vec g = Vec::Zero(x.size());
                                   g[1] = 1.0;
                                   return g;
                                 },
                                 [](const Vec& x) -> Mat { return Mat::Zero(x.size(), x.size()); }));
}

Domain annulus(Chart chart, double inner, double outer) {
  const double a = inner * inner;
  const double b = outer * outer;
  return Domain(
      std::move(chart),
      BoundaryFunction(
          [a, b](const Vec& x) {
            const double s = x.squaredNorm();
            return (s - a) * (b - s);
          },
          [a, b](const Vec& x) -> Vec {
            const double s = x.squaredNorm();
            return 2.0 * (a + b - 2.0 * s) * x;
          },
          [a, b](const Vec& x) -> Mat {
            const double s = x.squaredNorm();
            const auto n = x.size();
            return 2.0 * (a + b - 2.0 * s) * Mat::Identity(n, n) - 8.0 * x * x.transpose();
          }));
}

Domain exterior_disk(Chart chart, double radius) {
  const double r2 = radius * radius;
  return Domain(std::move(chart),
                BoundaryFunction([r2](const Vec& x) { return x.squaredNorm() - r2; },
                                 [](const Vec& x) -> Vec { return 2.0 * x; },
                                 [](const Vec& x) -> Mat {
                                   return 2.0 * Mat::Identity(x.size(), x.size());
                                 }));
}

}  // namespace finsler::presets

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

/// Level-set description of a domain: phi = 0 on the boundary, phi > 0 inside.
/// Gradient and Hessian are analytic when supplied, central differences otherwise.
class BoundaryFunction {
 public:
  using ScalarFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  static constexpr double default_gradient_step = 1e-6;
  static constexpr double default_hessian_step = 1e-4;

  BoundaryFunction(ScalarFn value, GradientFn gradient = {}, HessianFn hessian = {});

  double value(const Vec& x) const { return value_(x); }
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  bool analytic_gradient() const { return static_cast<bool>(gradient_); }

 private:
  ScalarFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
};

class Domain {
 public:
  static constexpr double default_band = 1e-8;

  Domain(Chart chart, BoundaryFunction boundary, double boundary_band = default_band);

  // The whole chart, guarded by phi = 1.
  static Domain full_chart(Chart chart);

  const Chart& chart() const { return chart_; }
  const BoundaryFunction& boundary() const { return boundary_; }
  double boundary_band() const { return band_; }
  bool is_full_chart() const { return full_chart_; }

  double phi(const Vec& x) const { return boundary_.value(chart_.canonical(x)); }
  Vec grad_phi(const Vec& x) const { return boundary_.gradient(chart_.canonical(x)); }
  Mat hess_phi(const Vec& x) const { return boundary_.hessian(chart_.canonical(x)); }

  bool contains(const Vec& x) const { return chart_.valid(x) && phi(x) > 0.0; }
  // |phi| <= band * (1 + |grad phi|)
  double boundary_tolerance(const Vec& x) const;
  bool on_boundary(const Vec& x) const;

 private:
  Chart chart_;
  BoundaryFunction boundary_;
  double band_;
  bool full_chart_ = false;
};

/// H_phi(x,y)[y,y] = Hess phi[y,y] - dphi . G(x,y).
double finsler_hessian(const FinslerMetric& metric, const Domain& domain, const TangentVector& v);

struct NormalSolution {
  Vec n;
  double multiplier = 0.0;  // mu in g(x,n) n = mu grad phi
  double residual = 0.0;
  int iterations = 0;
};

/// Inner unit normal: F(x,n) = 1, g(x,n)[n, w] = 0 for every w tangent to the
/// boundary, dphi[n] > 0. Damped Newton on (g(x,n) n - mu grad phi, F - 1).
NormalSolution inner_normal(const FinslerMetric& metric, const Domain& domain, const Vec& x);

/// Lambda_n(y) = -H_phi(x,y)[y,y] / dphi(x)[n]; non-negative means the
/// boundary bends toward the inside along y.
double normal_curvature(const FinslerMetric& metric, const Domain& domain, const TangentVector& v);

enum class Verdict { convex, nonconvex, inconclusive };
const char* to_string(Verdict v);

struct ConvexitySample {
  Vec point;
  Vec direction;
  double radius = 0.0;  // 0 for infinitesimal samples
  double value = 0.0;   // H_phi, or phi at the exponential image
  bool reversed = false;
  bool inconclusive = false;
};

struct ConvexityReport {
  std::vector<ConvexitySample> samples;
  Verdict verdict = Verdict::inconclusive;
  Verdict reversed_verdict = Verdict::inconclusive;
  std::optional<ConvexitySample> witness;
  std::optional<ConvexitySample> reversed_witness;
  double tolerance = 0.0;
  double max_value = 0.0;
  // Largest radius up to which every sample was conclusive and within
  // tolerance (local check only).
  double largest_verified_radius = 0.0;
};

/// Unit (F-norm) directions tangent to the level set of phi through x,
/// deterministic in `seed`.
std::vector<Vec> tangent_directions(const FinslerMetric& metric, const Domain& domain,
                                    const Vec& x, int count, std::uint64_t seed);

ConvexityReport infinitesimal_convexity_check(const FinslerMetric& metric, const Domain& domain,
                                              const Vec& x, int direction_samples,
                                              std::uint64_t seed);

ConvexityReport local_convexity_check(const FinslerMetric& metric, const Domain& domain,
                                      const Vec& x, std::span<const double> radii,
                                      int direction_samples, std::uint64_t seed);

enum class TangencyOutcome { stays_on_boundary, exits_D, enters_D };
const char* to_string(TangencyOutcome t);

struct TangencyResult {
  TangencyOutcome outcome = TangencyOutcome::stays_on_boundary;
  double witness_time = 0.0;
  double witness_phi = 0.0;
  double max_phi = 0.0;
  double min_phi = 0.0;
  double tolerance = 0.0;
};

/// Follows the geodesic with tangent initial velocity and reports which side
/// of the boundary it moves to first.
TangencyResult tangency_probe(const FinslerMetric& metric, const Domain& domain, const Vec& x,
                              const Vec& y_tangent, double horizon, double step);

/// Newton iteration along grad phi onto phi = 0.
Vec boundary_projection(const Domain& domain, const Vec& w);

}  // namespace finsler

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "finsler/chart.hpp"
#include "finsler/errors.hpp"

namespace finsler {

struct TangentVector {
  Vec x;
  Vec y;
};

// Symmetric matrix field a(x). `derivatives`, when set, returns the list of
// partial derivatives da/dx^k; otherwise they are taken by central differences.
struct MatrixField {
  std::function<Mat(const Vec&)> value;
  std::function<std::vector<Mat>(const Vec&)> derivatives;

  static MatrixField constant(Mat a);
};

// Covector field b(x). `derivatives`, when set, returns the Jacobian whose
// column k is db/dx^k; otherwise it is taken by central differences.
struct CovectorField {
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> derivatives;

  static CovectorField constant(Vec b);
};

struct EnergyDerivatives {
  double G = 0.0;
  Vec dx;  // dG/dx
  Vec dy;  // dG/dy
};

struct FundamentalTensor {
  Mat g;

  double min_eigenvalue() const;
};

enum class MetricKind { riemannian, randers, reversed };

namespace detail {
class MetricModel;
}

/// Immutable Finsler structure F on a chart. Copies share the same model.
///
/// Derivatives in y are closed-form for both kinds. x-derivatives of the
/// coefficient fields come from the fields themselves when supplied, and from
/// central differences with step fd_step * max(1, |x_k|) otherwise.
class FinslerMetric {
 public:
  static constexpr double default_fd_step = 1e-5;

  static FinslerMetric riemannian(Chart chart, MatrixField a,
                                  double fd_step = default_fd_step);

  /// F = sqrt(a(y,y)) + b(y). Throws `randers_positivity` if |b|_a >= 1 at
  /// any probe point; probes default to a deterministic sample of the chart.
  static FinslerMetric randers(Chart chart, MatrixField a, CovectorField b,
                               std::span<const Vec> probes = {},
                               double fd_step = default_fd_step);

  MetricKind kind() const;
  const Chart& chart() const;
  double fd_step() const;
  // True when every derivative is exact (riemannian, possibly reversed).
  bool analytic() const;
  // The wrapped metric for the reversed kind, or nullptr.
  const FinslerMetric* inner() const;

  double F(const Vec& x, const Vec& y) const;
  double G(const Vec& x, const Vec& y) const;
  EnergyDerivatives energy_derivatives(const Vec& x, const Vec& y) const;
  FundamentalTensor fundamental_tensor(const Vec& x, const Vec& y) const;
  // sum_k y^k d^2 G / dy^j dx^k
  Vec mixed_contraction(const Vec& x, const Vec& y) const;

 private:
  explicit FinslerMetric(std::shared_ptr<const detail::MetricModel> model);
  friend FinslerMetric reversed_metric(const FinslerMetric& metric);

  std::shared_ptr<const detail::MetricModel> model_;
};

double eval_F(const FinslerMetric& metric, const TangentVector& v);
EnergyDerivatives energy_G(const FinslerMetric& metric, const TangentVector& v);
FundamentalTensor fundamental_tensor(const FinslerMetric& metric, const TangentVector& v);

/// F~(x, y) = F(x, -y). Reversing twice returns the original metric.
FinslerMetric reversed_metric(const FinslerMetric& metric);

struct AuditReport {
  int samples = 0;
  int skipped = 0;
  double homogeneity_residual = 0.0;  // max |F(x,ly) - l F(x,y)| / F(x,ly)
  double euler_residual = 0.0;        // max |dyG.y - 2G| / max(1, G)
  double tensor_residual = 0.0;       // max |g[y,y] - F^2| / F^2
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Statistical check of the Finsler axioms on random tangent vectors.
AuditReport axiom_audit(const FinslerMetric& metric, int sample_count, std::uint64_t seed);

/// Deterministic random points inside the chart's "sampling box": periodic
/// coordinates over one period, bounded ones over the middle 90% of the
/// interval, half-bounded ones over [lo + 0.1, lo + 2.1] (resp. mirrored) and
/// free ones over [-1, 1].
std::vector<Vec> sample_chart_points(const Chart& chart, int count, std::uint64_t seed);

}  // namespace finsler

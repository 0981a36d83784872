#include "finsler/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "finsler/sampling.hpp"
#include "finsler/spray.hpp"

namespace finsler {

namespace {

constexpr double kInfinitesimalTolerance = 1e-8;
constexpr double kLocalTolerance = 1e-7;
constexpr double kTangentTolerance = 1e-8;
constexpr double kNormalResidual = 1e-10;
constexpr int kNewtonIterations = 50;

double fd_scale(const Vec& x, int k) { return std::max(1.0, std::abs(x[k])); }

}  // namespace

BoundaryFunction::BoundaryFunction(ScalarFn value, GradientFn gradient, HessianFn hessian)
    : value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
  if (!value_) throw Error(ErrorKind::invalid_argument, "boundary function needs a value");
}

Vec BoundaryFunction::gradient(const Vec& x) const {
  if (gradient_) return gradient_(x);
  Vec g(x.size());
  for (int k = 0; k < x.size(); ++k) {
    const double h = default_gradient_step * fd_scale(x, k);
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (value_(xp) - value_(xm)) / (2.0 * h);
  }
  return g;
}

Mat BoundaryFunction::hessian(const Vec& x) const {
  if (hessian_) return hessian_(x);
  const auto n = x.size();
  Mat H(n, n);
  if (gradient_) {
    for (int k = 0; k < n; ++k) {
      const double h = default_gradient_step * fd_scale(x, k);
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      H.col(k) = (gradient_(xp) - gradient_(xm)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
  }
  const double f0 = value_(x);
  for (int i = 0; i < n; ++i) {
    const double hi = default_hessian_step * fd_scale(x, i);
    Vec xp = x, xm = x;
    xp[i] += hi;
    xm[i] -= hi;
    H(i, i) = (value_(xp) - 2.0 * f0 + value_(xm)) / (hi * hi);
    for (int j = i + 1; j < n; ++j) {
      const double hj = default_hessian_step * fd_scale(x, j);
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += hi; pp[j] += hj;
      pm[i] += hi; pm[j] -= hj;
      mp[i] -= hi; mp[j] += hj;
      mm[i] -= hi; mm[j] -= hj;
      const double v = (value_(pp) - value_(pm) - value_(mp) + value_(mm)) / (4.0 * hi * hj);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return H;
}

Domain::Domain(Chart chart, BoundaryFunction boundary, double boundary_band)
    : chart_(std::move(chart)), boundary_(std::move(boundary)), band_(boundary_band) {
  if (!(band_ > 0.0)) throw Error(ErrorKind::invalid_argument, "boundary band must be positive");
}

Domain Domain::full_chart(Chart chart) {
  const auto n = chart.dim();
  Domain d(std::move(chart),
           BoundaryFunction([](const Vec&) { return 1.0; },
                            [n](const Vec&) { return Vec(Vec::Zero(n)); },
                            [n](const Vec&) { return Mat(Mat::Zero(n, n)); }));
  d.full_chart_ = true;
  return d;
}

double Domain::boundary_tolerance(const Vec& x) const {
  return band_ * (1.0 + grad_phi(x).norm());
}

bool Domain::on_boundary(const Vec& x) const {
  return chart_.valid(x) && std::abs(phi(x)) <= boundary_tolerance(x);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::convex: return "convex";
    case Verdict::nonconvex: return "nonconvex";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(TangencyOutcome t) {
  switch (t) {
    case TangencyOutcome::stays_on_boundary: return "stays_on_boundary";
    case TangencyOutcome::exits_D: return "exits_D";
    case TangencyOutcome::enters_D: return "enters_D";
  }
  return "unknown";
}

double finsler_hessian(const FinslerMetric& metric, const Domain& domain, const TangentVector& v) {
  if (v.y.isZero(0.0))
    throw Error(ErrorKind::zero_section, "zero-section derivative: Hessian needs y != 0");
  const Vec spray = spray_coefficients(metric, v);
  return v.y.dot(domain.hess_phi(v.x) * v.y) - domain.grad_phi(v.x).dot(spray);
}

namespace {

void require_on_boundary(const Domain& domain, const Vec& x) {
  if (!domain.on_boundary(x)) {
    std::ostringstream os;
    os << "point is not on the boundary: phi = " << domain.phi(x);
    throw Error(ErrorKind::not_on_boundary, os.str());
  }
}

void require_tangent(const Domain& domain, const Vec& x, const Vec& y) {
  const Vec grad = domain.grad_phi(x);
  if (std::abs(grad.dot(y)) > kTangentTolerance * y.norm() * grad.norm()) {
    std::ostringstream os;
    os << "direction is not tangent to the boundary: dphi[y] = " << grad.dot(y);
    throw Error(ErrorKind::non_tangent, os.str());
  }
}

}  // namespace

NormalSolution inner_normal(const FinslerMetric& metric, const Domain& domain, const Vec& x) {
  if (std::abs(domain.phi(x)) > domain.boundary_tolerance(x)) require_on_boundary(domain, x);
  const Vec grad = domain.grad_phi(x);
  if (grad.norm() == 0.0) throw Error(ErrorKind::invalid_argument, "grad phi vanishes");
  const auto n = x.size();

  auto residual = [&](const Vec& nv, double mu, Vec& r) {
    const auto e = metric.energy_derivatives(x, nv);
    r.resize(n + 1);
    r.head(n) = 0.5 * e.dy - mu * grad;
    r[n] = std::sqrt(e.G) - 1.0;
  };

  NormalSolution sol;
  sol.n = grad / metric.F(x, grad);
  {
    const Vec gn = metric.fundamental_tensor(x, sol.n).g * sol.n;
    sol.multiplier = grad.dot(gn) / grad.squaredNorm();
  }
  Vec r;
  residual(sol.n, sol.multiplier, r);
  double rnorm = r.norm();

  for (int it = 0; it < kNewtonIterations; ++it) {
    sol.iterations = it;
    sol.residual = r.head(n).norm();
    if (sol.residual <= kNormalResidual && std::abs(r[n]) <= kNormalResidual) break;
    const Mat g = metric.fundamental_tensor(x, sol.n).g;
    const double f = metric.F(x, sol.n);
    Mat J = Mat::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = g;
    J.topRightCorner(n, 1) = -grad;
    J.bottomLeftCorner(1, n) = (g * sol.n).transpose() / f;
    const Vec step = J.fullPivLu().solve(-r);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      const Vec nn = sol.n + t * step.head(n);
      if (nn.isZero(0.0)) continue;
      const double mu = sol.multiplier + t * step[n];
      Vec rt;
      residual(nn, mu, rt);
      if (rt.norm() < rnorm || k == 29) {
        sol.n = nn;
        sol.multiplier = mu;
        r = rt;
        rnorm = rt.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    sol.iterations = it + 1;
  }
  sol.residual = r.head(n).norm();
  if (sol.residual > kNormalResidual || std::abs(r[n]) > kNormalResidual) {
    std::ostringstream os;
    os << "inner normal: Newton did not converge in " << kNewtonIterations
       << " iterations, residual " << sol.residual;
    throw Error(ErrorKind::no_convergence, os.str());
  }
  if (!(grad.dot(sol.n) > 0.0))
    throw Error(ErrorKind::orientation, "inner normal points out of the domain");
  return sol;
}

double normal_curvature(const FinslerMetric& metric, const Domain& domain, const TangentVector& v) {
  require_on_boundary(domain, v.x);
  if (v.y.isZero(0.0)) throw Error(ErrorKind::zero_section, "normal curvature needs y != 0");
  require_tangent(domain, v.x, v.y);
  const auto normal = inner_normal(metric, domain, v.x);
  const double h = finsler_hessian(metric, domain, v);
  return -h / domain.grad_phi(v.x).dot(normal.n);
}

std::vector<Vec> tangent_directions(const FinslerMetric& metric, const Domain& domain,
                                    const Vec& x, int count, std::uint64_t seed) {
  const Vec grad = domain.grad_phi(x);
  const Mat basis = orthogonal_complement(grad);
  const auto sphere = sphere_sequence(static_cast<int>(basis.cols()), count, seed);
  std::vector<Vec> out;
  out.reserve(sphere.size());
  for (const auto& s : sphere) {
    const Vec y = basis * s;
    out.push_back(y / metric.F(x, y));
  }
  return out;
}

namespace {

struct VerdictAccumulator {
  explicit VerdictAccumulator(double tol) : tolerance(tol) {}

  double tolerance;
  bool any_positive = false;
  bool any_inconclusive = false;
  double max_value = -std::numeric_limits<double>::infinity();
  std::optional<ConvexitySample> witness;

  void add(const ConvexitySample& s) {
    if (s.inconclusive) {
      any_inconclusive = true;
      return;
    }
    if (s.value > max_value) max_value = s.value;
    if (s.value > tolerance) {
      any_positive = true;
      if (!witness || s.value > witness->value) witness = s;
    }
  }

  Verdict verdict() const {
    if (any_positive) return Verdict::nonconvex;
    if (any_inconclusive) return Verdict::inconclusive;
    return Verdict::convex;
  }
};

}  // namespace

ConvexityReport infinitesimal_convexity_check(const FinslerMetric& metric, const Domain& domain,
                                              const Vec& x, int direction_samples,
                                              std::uint64_t seed) {
  require_on_boundary(domain, x);
  const FinslerMetric reversed = reversed_metric(metric);
  ConvexityReport report;
  report.tolerance = kInfinitesimalTolerance;
  VerdictAccumulator fwd(kInfinitesimalTolerance), rev(kInfinitesimalTolerance);
  for (const auto& y : tangent_directions(metric, domain, x, direction_samples, seed)) {
    ConvexitySample s{x, y, 0.0, finsler_hessian(metric, domain, {x, y}), false, false};
    fwd.add(s);
    report.samples.push_back(s);
    ConvexitySample t{x, y, 0.0, finsler_hessian(reversed, domain, {x, y}), true, false};
    rev.add(t);
    report.samples.push_back(t);
  }
  report.verdict = fwd.verdict();
  report.reversed_verdict = rev.verdict();
  report.witness = fwd.witness;
  report.reversed_witness = rev.witness;
  report.max_value = fwd.max_value;
  return report;
}

ConvexityReport local_convexity_check(const FinslerMetric& metric, const Domain& domain,
                                      const Vec& x, std::span<const double> radii,
                                      int direction_samples, std::uint64_t seed) {
  require_on_boundary(domain, x);
  for (double r : radii)
    if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "radii must be positive");
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());

  ConvexityReport report;
  report.tolerance = kLocalTolerance;
  VerdictAccumulator both(kLocalTolerance), rev(kLocalTolerance);
  const auto directions = tangent_directions(metric, domain, x, direction_samples, seed);
  bool verified = true;
  for (double r : sorted) {
    bool radius_ok = true;
    for (const auto& y : directions) {
      for (bool reversed : {false, true}) {
        ConvexitySample s{x, y, r, 0.0, reversed, false};
        try {
          s.value = domain.phi(exponential_map(metric, x, r * y, reversed));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::left_chart && e.kind() != ErrorKind::invalid_point &&
              e.kind() != ErrorKind::no_convergence)
            throw;
          s.inconclusive = true;
        }
        both.add(s);
        if (reversed) rev.add(s);
        if (s.inconclusive || s.value > kLocalTolerance) radius_ok = false;
        report.samples.push_back(s);
      }
    }
    if (verified && radius_ok) {
      report.largest_verified_radius = r;
    } else {
      verified = false;
    }
  }
  report.verdict = both.verdict();
  report.reversed_verdict = rev.verdict();
  report.witness = both.witness;
  report.reversed_witness = rev.witness;
  report.max_value = both.max_value;
  return report;
}

TangencyResult tangency_probe(const FinslerMetric& metric, const Domain& domain, const Vec& x,
                              const Vec& y_tangent, double horizon, double step) {
  require_on_boundary(domain, x);
  if (y_tangent.isZero(0.0)) throw Error(ErrorKind::zero_section, "tangency probe needs y != 0");
  require_tangent(domain, x, y_tangent);
  const auto path = integrate_geodesic(metric, TangentVector{x, y_tangent}, horizon, step);
  TangencyResult result;
  result.tolerance = domain.boundary_tolerance(x);
  result.max_phi = -std::numeric_limits<double>::infinity();
  result.min_phi = std::numeric_limits<double>::infinity();
  bool decided = false;
  for (std::size_t i = 1; i < path.points.size(); ++i) {
    const double v = domain.phi(path.points[i]);
    result.max_phi = std::max(result.max_phi, v);
    result.min_phi = std::min(result.min_phi, v);
    if (decided) continue;
    if (v > result.tolerance) {
      result.outcome = TangencyOutcome::enters_D;
    } else if (v < -result.tolerance) {
      result.outcome = TangencyOutcome::exits_D;
    } else {
      continue;
    }
    result.witness_time = path.times[i];
    result.witness_phi = v;
    decided = true;
  }
  return result;
}

Vec boundary_projection(const Domain& domain, const Vec& w) {
  const Chart& chart = domain.chart();
  Vec p = chart.canonical(w);
  for (int it = 0; it <= kNewtonIterations; ++it) {
    const double v = domain.phi(p);
    if (std::abs(v) <= 1e-10) return p;
    if (it == kNewtonIterations) break;
    const Vec g = domain.grad_phi(p);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) throw Error(ErrorKind::no_convergence, "boundary projection: grad phi vanishes");
    p = chart.canonical(p - (v / g2) * g);
  }
  std::ostringstream os;
  os << "boundary projection did not converge in " << kNewtonIterations
     << " steps; phi = " << domain.phi(p);
  throw Error(ErrorKind::no_convergence, os.str());
}

}  // namespace finsler

#include "finsler/connector.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "finsler/spray.hpp"

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kRoundoff = 1e-12;
constexpr double kSufficient = 0.1;
constexpr double kCurvature = 0.9;
constexpr int kMaxBacktracks = 60;
constexpr double kRegularization = 1e-10;
constexpr double kDistinctCurves = 1e-3;

// Lifted view of a curve with fixed endpoints; the unknowns are the interior
// nodes stacked into one vector.
class Problem {
 public:
  Problem(const FinslerMetric& metric, const Domain& domain, const DiscreteCurve& curve, double eps)
      : metric_(metric), domain_(domain), chart_(metric.chart()), eps_(eps) {
    if (curve.segments() < 2) throw Error(ErrorKind::invalid_argument, "a discrete curve needs N >= 2");
    if (!(eps >= 0.0)) throw Error(ErrorKind::invalid_argument, "eps must be non-negative");
    if (chart_.dim() != domain.chart().dim())
      throw Error(ErrorKind::invalid_argument, "metric and domain charts differ in dimension");
    lifted_ = lifted_nodes(chart_, curve);
    N_ = curve.segments();
    d_ = chart_.dim();
    v_reg_ = kRegularization * (lifted_.back() - lifted_.front()).norm();
  }

  int N() const { return N_; }
  int dim() const { return d_; }
  int unknowns() const { return (N_ - 1) * d_; }
  const std::vector<Vec>& lifted() const { return lifted_; }

  Vec pack(const std::vector<Vec>& x) const {
    Vec z(unknowns());
    for (int i = 1; i < N_; ++i) z.segment((i - 1) * d_, d_) = x[i];
    return z;
  }

  std::vector<Vec> unpack(const Vec& z) const {
    std::vector<Vec> x = lifted_;
    for (int i = 1; i < N_; ++i) x[i] = z.segment((i - 1) * d_, d_);
    return x;
  }

  bool inside(const Vec& x) const { return chart_.valid(x) && domain_.phi(x) > 0.0; }

  bool feasible(const std::vector<Vec>& x) const {
    for (int i = 0; i <= N_; ++i) {
      if (!inside(x[i])) return false;
      if (i < N_ && !inside(0.5 * (x[i] + x[i + 1]))) return false;
    }
    return true;
  }

  double min_phi(const std::vector<Vec>& x) const {
    double m = kInf;
    for (const auto& v : x) m = std::min(m, domain_.phi(v));
    return m;
  }

  // Infinite when the curve is not strictly inside.
  double energy(const std::vector<Vec>& x) const {
    if (!feasible(x)) return kInf;
    double total = 0.0;
    for (int i = 0; i < N_; ++i) {
      const Vec m = 0.5 * (x[i] + x[i + 1]);
      const double phi = domain_.phi(m);
      total += 0.5 * metric_.G(m, N_ * (x[i + 1] - x[i])) + eps_ / (phi * phi);
    }
    return total / N_;
  }

  Vec gradient(const std::vector<Vec>& x) const {
    Vec g = Vec::Zero(unknowns());
    const double c = 1.0 / N_;
    for (int i = 0; i < N_; ++i) {
      const Vec dx = x[i + 1] - x[i];
      const Vec m = 0.5 * (x[i] + x[i + 1]);
      const double phi = domain_.phi(m);
      const Vec penalty = (eps_ / (phi * phi * phi)) * domain_.grad_phi(m);
      Vec left = -penalty;
      Vec right = -penalty;
      if (dx.norm() > v_reg_) {
        const auto e = metric_.energy_derivatives(m, N_ * dx);
        left += 0.25 * e.dx - 0.5 * N_ * e.dy;
        right += 0.25 * e.dx + 0.5 * N_ * e.dy;
      }
      if (i >= 1) g.segment((i - 1) * d_, d_) += c * left;
      if (i + 1 <= N_ - 1) g.segment(i * d_, d_) += c * right;
    }
    return g;
  }

  // Solves (N * tridiag(-1, 2, -1)) u = r independently per coordinate.
  Vec precondition(const Vec& r) const {
    const int M = N_ - 1;
    Vec u(r.size());
    std::vector<double> cp(M), dp(M);
    for (int k = 0; k < d_; ++k) {
      const double a = -static_cast<double>(N_), b = 2.0 * N_;
      cp[0] = a / b;
      dp[0] = r[k] / b;
      for (int i = 1; i < M; ++i) {
        const double den = b - a * cp[i - 1];
        cp[i] = a / den;
        dp[i] = (r[i * d_ + k] - a * dp[i - 1]) / den;
      }
      u[(M - 1) * d_ + k] = dp[M - 1];
      for (int i = M - 2; i >= 0; --i) u[i * d_ + k] = dp[i] - cp[i] * u[(i + 1) * d_ + k];
    }
    return u;
  }

 private:
  const FinslerMetric& metric_;
  const Domain& domain_;
  const Chart& chart_;
  double eps_;
  std::vector<Vec> lifted_;
  int N_ = 0;
  int d_ = 0;
  double v_reg_ = 0.0;
};

double grad_measure(const Vec& g, int N) { return N * g.lpNorm<Eigen::Infinity>(); }

struct Pair {
  Vec s;
  Vec y;
  double rho;
};

Vec two_loop(const Problem& prob, const std::deque<Pair>& memory, const Vec& g) {
  Vec q = g;
  std::vector<double> alpha(memory.size());
  for (int i = static_cast<int>(memory.size()) - 1; i >= 0; --i) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  Vec r = prob.precondition(q);
  if (!memory.empty()) {
    const auto& last = memory.back();
    r *= last.s.dot(last.y) / last.y.dot(prob.precondition(last.y));
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(r);
    r += (alpha[i] - beta) * memory[i].s;
  }
  return -r;
}

}  // namespace

PenaltySchedule PenaltySchedule::geometric(double eps0, double ratio, int count) {
  if (!(ratio > 0.0 && ratio < 1.0) || count < 1)
    throw Error(ErrorKind::invalid_argument, "schedule needs 0 < ratio < 1 and count >= 1");
  PenaltySchedule s;
  for (int k = 0; k < count; ++k) s.eps_values.push_back(eps0 * std::pow(ratio, k));
  s.validate();
  return s;
}

PenaltySchedule PenaltySchedule::standard() { return geometric(1.0, 0.1, 7); }

void PenaltySchedule::validate() const {
  if (eps_values.empty()) throw Error(ErrorKind::invalid_argument, "empty penalty schedule");
  if (!(eps_values.front() > 0.0 && eps_values.front() <= 1.0))
    throw Error(ErrorKind::invalid_argument, "schedule must start in (0, 1]");
  for (std::size_t k = 1; k < eps_values.size(); ++k) {
    if (!(eps_values[k] > 0.0 && eps_values[k] < eps_values[k - 1]))
      throw Error(ErrorKind::invalid_argument, "schedule must be strictly decreasing and positive");
    if (k >= 2) {
      const double r0 = eps_values[1] / eps_values[0];
      const double rk = eps_values[k] / eps_values[k - 1];
      if (std::abs(rk - r0) > 1e-9 * r0)
        throw Error(ErrorKind::invalid_argument, "schedule ratio must be constant");
    }
  }
}

double discrete_energy(const FinslerMetric& metric, const Domain& domain,
                       const DiscreteCurve& curve, double eps) {
  const Problem prob(metric, domain, curve, eps);
  const double e = prob.energy(prob.lifted());
  if (!std::isfinite(e)) throw Error(ErrorKind::left_domain, "curve left domain");
  return e;
}

std::vector<Vec> energy_gradient(const FinslerMetric& metric, const Domain& domain,
                                 const DiscreteCurve& curve, double eps) {
  const Problem prob(metric, domain, curve, eps);
  if (!prob.feasible(prob.lifted())) throw Error(ErrorKind::left_domain, "curve left domain");
  const Vec g = prob.gradient(prob.lifted());
  std::vector<Vec> out;
  for (int i = 1; i < prob.N(); ++i) out.push_back(g.segment((i - 1) * prob.dim(), prob.dim()));
  return out;
}

double geodesic_residual(const FinslerMetric& metric, const DiscreteCurve& curve) {
  const int N = curve.segments();
  if (N < 4) throw Error(ErrorKind::invalid_argument, "geodesic residual needs N >= 4");
  const auto x = lifted_nodes(metric.chart(), curve);
  for (int i = 0; i < N; ++i)
    if ((x[i + 1] - x[i]).isZero(0.0))
      throw Error(ErrorKind::degenerate_segment, "degenerate segment: zero velocity");
  const double N2 = static_cast<double>(N) * N;
  double worst = 0.0;
  for (int i = 1; i < N; ++i) {
    const Vec acc = N2 * (x[i + 1] - 2.0 * x[i] + x[i - 1]);
    const Vec vel = 0.5 * N * (x[i + 1] - x[i - 1]);
    // the spray extends continuously by 0 to the zero section
    const Vec r = vel.isZero(0.0) ? acc : Vec(acc + spray_coefficients(metric, TangentVector{x[i], vel}));
    worst = std::max(worst, r.norm());
  }
  return worst;
}

CriticalDiagnostics critical_diagnostics(const FinslerMetric& metric, const Domain& domain,
                                         const DiscreteCurve& curve, double eps) {
  const Problem prob(metric, domain, curve, eps);
  const auto& x = prob.lifted();
  if (!prob.feasible(x)) throw Error(ErrorKind::left_domain, "curve left domain");
  const int N = prob.N();
  CriticalDiagnostics d;
  d.energy = prob.energy(x);
  d.grad_norm = grad_measure(prob.gradient(x), N);
  double lo = kInf, hi = -kInf;
  for (int i = 0; i < N; ++i) {
    const Vec m = 0.5 * (x[i] + x[i + 1]);
    const double phi = domain.phi(m);
    const double e = 0.5 * metric.G(m, N * (x[i + 1] - x[i])) - eps / (phi * phi);
    d.energy_values.push_back(e);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  d.conservation_residual = hi - lo;
  d.min_phi = kInf;
  for (const auto& v : x) {
    const double phi = domain.phi(v);
    d.min_phi = std::min(d.min_phi, phi);
    d.lambda_field.push_back(2.0 * eps / (phi * phi * phi));
  }
  d.lambda_sup = *std::max_element(d.lambda_field.begin(), d.lambda_field.end());
  bool constant = true;
  for (int i = 0; i < N && constant; ++i) constant = (x[i + 1] - x[i]).isZero(0.0);
  if (constant) {
    d.geodesic_residual = 0.0;
  } else if (N >= 4) {
    try {
      d.geodesic_residual = geodesic_residual(metric, curve);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_segment) throw;
      d.geodesic_residual = kInf;
    }
  }
  return d;
}

MinimizeResult minimize_penalized(const FinslerMetric& metric, const Domain& domain,
                                  const DiscreteCurve& init, double eps,
                                  const MinimizeOptions& options) {
  if (!(options.tol_grad > 0.0) || options.max_iterations < 0 || options.memory < 1)
    throw Error(ErrorKind::invalid_argument, "invalid minimizer options");
  const Problem prob(metric, domain, init, eps);
  const Chart& chart = metric.chart();
  if (!prob.feasible(prob.lifted()))
    throw Error(ErrorKind::left_domain, "curve left domain: initial curve is not strictly inside");

  Vec z = prob.pack(prob.lifted());
  double f = prob.energy(prob.unpack(z));
  Vec g = prob.gradient(prob.unpack(z));
  std::deque<Pair> memory;
  MinimizeResult result;
  int failures = 0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (grad_measure(g, prob.N()) <= options.tol_grad) {
      result.converged = true;
      break;
    }
    Vec dir = two_loop(prob, memory, g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -prob.precondition(g);
      slope = g.dot(dir);
    }

    double t = 1.0;
    bool accepted = false;
    Vec z_new, g_new;
    double f_new = kInf;
    for (int k = 0; k < kMaxBacktracks; ++k, t *= 0.5) {
      z_new = z + t * dir;
      const auto x_new = prob.unpack(z_new);
      f_new = prob.energy(x_new);
      if (!std::isfinite(f_new)) continue;
      if (f_new <= f + kArmijo * t * slope) {
        g_new = prob.gradient(x_new);
        accepted = true;
        break;
      }
      // Near the minimum the energy decrease drops below roundoff. There the
      // step is judged by the directional derivative instead (approximate
      // Wolfe condition).
      if (f_new <= f + kRoundoff * (1.0 + std::abs(f))) {
        g_new = prob.gradient(x_new);
        const double slope_new = g_new.dot(dir);
        if (slope_new >= kCurvature * slope && slope_new <= (1.0 - 2.0 * kSufficient) * -slope) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      if (++failures >= 2 || memory.empty()) break;
      memory.clear();
      continue;
    }
    failures = 0;
    const Vec s = z_new - z;
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm() && sy > 0.0) {
      memory.push_back(Pair{s, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }
    z = z_new;
    f = f_new;
    g = g_new;
    if (options.observer) options.observer(f, prob.min_phi(prob.unpack(z)));
  }
  if (!result.converged && grad_measure(g, prob.N()) <= options.tol_grad) result.converged = true;
  result.iterations = it;
  result.curve = from_lifted(chart, prob.unpack(z));
  result.diagnostics = critical_diagnostics(metric, domain, result.curve, eps);
  return result;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::interior_geodesic: return "interior_geodesic";
    case Classification::boundary_touching: return "boundary_touching";
    case Classification::failed: return "failed";
  }
  return "unknown";
}

DiscreteCurve initial_curve(const Domain& domain, const Vec& p, const Vec& q, int N, int winding) {
  const Chart& chart = domain.chart();
  if (!domain.contains(p) || !domain.contains(q))
    throw Error(ErrorKind::left_domain, "endpoints must lie strictly inside the domain");
  const DiscreteCurve chord = straight_curve(chart, p, q, N, winding);
  auto x = lifted_nodes(chart, chord);
  const double target = 0.5 * std::min(domain.phi(p), domain.phi(q));
  auto good = [&](const Vec& v) { return chart.valid(v) && domain.phi(v) >= target; };
  for (int i = 1; i < N; ++i) {
    if (good(x[i])) continue;
    Vec dir = domain.grad_phi(x[i]);
    if (!(dir.norm() > 0.0) || !dir.allFinite())
      throw Error(ErrorKind::invalid_argument, "initial curve: grad phi vanishes off the domain");
    dir.normalize();
    // March with a capped step so that thin bands of the domain are not skipped.
    double lo = 0.0, hi = 1e-3, h = 1e-3;
    while (!good(x[i] + hi * dir)) {
      lo = hi;
      h = std::min(2.0 * h, 0.01);
      hi += h;
      if (hi > 1e3) throw Error(ErrorKind::invalid_argument, "initial curve: cannot reach the domain");
    }
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (good(x[i] + mid * dir) ? hi : lo) = mid;
    }
    x[i] = x[i] + hi * dir;
  }
  return from_lifted(chart, x);
}

ConnectorResult epsilon_continuation(const FinslerMetric& metric, const Domain& domain,
                                     const Vec& p, const Vec& q, const PenaltySchedule& schedule,
                                     const ConnectorOptions& options) {
  return epsilon_continuation(metric, domain, initial_curve(domain, p, q, options.N), schedule,
                              options);
}

ConnectorResult epsilon_continuation(const FinslerMetric& metric, const Domain& domain,
                                     const DiscreteCurve& init, const PenaltySchedule& schedule,
                                     const ConnectorOptions& options) {
  schedule.validate();
  ConnectorResult result;
  DiscreteCurve current = init;
  for (std::size_t k = 0; k < schedule.eps_values.size(); ++k) {
    const double eps = schedule.eps_values[k];
    auto m = minimize_penalized(metric, domain, current, eps, options.minimize);
    current = m.curve;
    result.per_eps.push_back(ContinuationStage{eps, m.curve, m.diagnostics, m.converged, m.iterations});
    if (!m.converged && !result.failed_stage) result.failed_stage = static_cast<int>(k);
  }
  result.limit_curve = current;
  result.length = path_length(metric, current);

  if (result.failed_stage) {
    std::ostringstream os;
    os << "stage " << *result.failed_stage << " did not converge (grad_norm "
       << result.per_eps[*result.failed_stage].diagnostics.grad_norm << ")";
    result.note = os.str();
    return result;
  }

  const auto& st = result.per_eps;
  const std::size_t K = st.size();
  const int N = current.segments();
  const double residual_tol = options.residual_factor / (static_cast<double>(N) * N);
  const auto& last = st.back().diagnostics;

  bool phi_stable = true;
  double lambda_ratio = 0.0;
  double phi_shrink = 0.0;
  if (K >= 3) {
    double lo = kInf, hi = 0.0;
    for (std::size_t k = K - 3; k < K; ++k) {
      lo = std::min(lo, st[k].diagnostics.min_phi);
      hi = std::max(hi, st[k].diagnostics.min_phi);
    }
    phi_stable = lo >= options.delta_ratio * hi;
    lambda_ratio = st[K - 1].diagnostics.lambda_sup / st[K - 3].diagnostics.lambda_sup;
    phi_shrink = st[K - 3].diagnostics.min_phi / st[K - 1].diagnostics.min_phi;
  }

  // Interior limits have lambda_sup ~ eps, so it collapses with the schedule.
  // A limit resting on the boundary keeps a multiplier of order one while
  // min phi goes to zero.
  std::ostringstream os;
  if (last.geodesic_residual <= residual_tol && phi_stable) {
    result.classification = Classification::interior_geodesic;
    os << "geodesic residual " << last.geodesic_residual << " <= " << residual_tol;
  } else if (K >= 3 && phi_shrink >= options.lambda_growth &&
             lambda_ratio >= 1.0 / options.lambda_growth) {
    result.classification = Classification::boundary_touching;
    os << "min phi shrinks by " << phi_shrink << " and lambda_sup changes by " << lambda_ratio
       << " over the last three stages";
  } else {
    result.classification = Classification::failed;
    os << "unclassified: geodesic residual " << last.geodesic_residual << " (tolerance "
       << residual_tol << "), min phi shrink " << phi_shrink << ", lambda_sup ratio "
       << lambda_ratio;
  }
  result.note = os.str();
  return result;
}

namespace {

std::vector<ConnectorResult> keep_distinct(const Chart& chart, std::vector<ConnectorResult> all) {
  std::stable_sort(all.begin(), all.end(),
                   [](const ConnectorResult& a, const ConnectorResult& b) { return a.length < b.length; });
  std::vector<ConnectorResult> kept;
  for (auto& r : all) {
    bool distinct = true;
    for (const auto& k : kept) {
      const auto a = lifted_nodes(chart, r.limit_curve);
      const auto b = lifted_nodes(chart, k.limit_curve);
      double d = 0.0;
      for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
        d = std::max(d, (a[i] - b[i]).norm());
      if (a.size() != b.size()) d = kInf;
      if (d <= kDistinctCurves) distinct = false;
    }
    if (distinct) kept.push_back(std::move(r));
  }
  return kept;
}

}  // namespace

std::vector<ConnectorResult> multiplicity_search(const FinslerMetric& metric, const Domain& domain,
                                                 const Vec& p, const Vec& q, int class_count,
                                                 const PenaltySchedule& schedule,
                                                 const ConnectorOptions& options) {
  if (class_count < 1) throw Error(ErrorKind::invalid_argument, "class count must be >= 1");
  if (class_count > 1 && !domain.chart().has_periodic())
    throw Error(ErrorKind::invalid_argument,
                "multiplicity search needs a periodic coordinate or explicit initial curves");
  std::vector<DiscreteCurve> inits;
  for (int w = 0; w < class_count; ++w) inits.push_back(initial_curve(domain, p, q, options.N, w));
  auto results = multiplicity_search(metric, domain, inits, schedule, options);
  return results;
}

std::vector<ConnectorResult> multiplicity_search(const FinslerMetric& metric, const Domain& domain,
                                                 const std::vector<DiscreteCurve>& inits,
                                                 const PenaltySchedule& schedule,
                                                 const ConnectorOptions& options) {
  std::vector<ConnectorResult> all;
  const Chart& chart = metric.chart();
  const auto k = chart.first_periodic();
  for (const auto& init : inits) {
    auto r = epsilon_continuation(metric, domain, init, schedule, options);
    if (k) {
      const auto x = lifted_nodes(chart, r.limit_curve);
      const double turns = (x.back()[*k] - x.front()[*k]) / chart.period(*k);
      const double chord = chart.difference(x.front(), x.back())[*k] / chart.period(*k);
      r.winding = static_cast<int>(std::lround(turns - chord));
    }
    all.push_back(std::move(r));
  }
  return keep_distinct(chart, std::move(all));
}

}  // namespace finsler

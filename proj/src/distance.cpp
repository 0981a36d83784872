#include "finsler/distance.hpp"

#include <algorithm>
#include <sstream>

namespace finsler {

const char* to_string(EstimateKind k) {
  return k == EstimateKind::converged ? "converged" : "upper_bound";
}

const char* to_string(BallDirection d) {
  switch (d) {
    case BallDirection::forward: return "forward";
    case BallDirection::backward: return "backward";
    case BallDirection::symmetrized: return "symmetrized";
  }
  return "unknown";
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::non_member: return "non_member";
    case Membership::inconclusive: return "inconclusive";
  }
  return "unknown";
}

DistanceContext DistanceContext::full_chart(FinslerMetric metric) {
  return DistanceContext{std::move(metric), std::nullopt};
}

DistanceContext DistanceContext::inside(FinslerMetric metric, Domain domain) {
  return DistanceContext{std::move(metric), std::move(domain)};
}

DistanceEstimate distance_estimate(const DistanceContext& context, const Vec& p, const Vec& q,
                                   const DistanceBudget& budget) {
  const FinslerMetric& metric = context.metric;
  const Chart& chart = metric.chart();
  chart.require_valid(p);
  chart.require_valid(q);
  DistanceEstimate est;
  if (chart.difference(p, q).isZero(0.0)) {
    est.witness = straight_curve(chart, p, q, budget.N);
    est.value = 0.0;
    est.kind = EstimateKind::converged;
    return est;
  }

  if (!context.domain) {
    const Domain guard = Domain::full_chart(chart);
    const DiscreteCurve init = initial_curve(guard, p, q, budget.N);
    MinimizeResult m;
    try {
      m = minimize_penalized(metric, guard, init, 0.0, budget.minimize);
    } catch (const Error& e) {
      est.witness = init;
      est.value = path_length(metric, init);
      est.note = e.what();
      return est;
    }
    est.witness = m.curve;
    est.value = path_length(metric, m.curve);
    const double tol = budget.residual_factor / (static_cast<double>(budget.N) * budget.N);
    std::ostringstream os;
    os << "grad_norm " << m.diagnostics.grad_norm << ", geodesic residual "
       << m.diagnostics.geodesic_residual;
    est.note = os.str();
    if (m.converged && m.diagnostics.geodesic_residual <= tol) est.kind = EstimateKind::converged;
    return est;
  }

  ConnectorOptions options;
  options.N = budget.N;
  options.minimize = budget.minimize;
  options.residual_factor = budget.residual_factor;
  try {
    const auto r = epsilon_continuation(metric, *context.domain, p, q, budget.schedule, options);
    est.witness = r.limit_curve;
    est.value = r.length;
    est.note = r.note;
    if (r.classification == Classification::interior_geodesic) est.kind = EstimateKind::converged;
  } catch (const Error& e) {
    est.witness = straight_curve(chart, p, q, budget.N);
    est.value = path_length(metric, est.witness);
    est.note = e.what();
  }
  return est;
}

SymmetrizedDistance symmetrized_distance(const DistanceContext& context, const Vec& p,
                                         const Vec& q, const DistanceBudget& budget) {
  const Chart& chart = context.metric.chart();
  const Vec a = chart.canonical(p);
  const Vec b = chart.canonical(q);
  const bool swap = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(),
                                                 a.data() + a.size());
  const Vec& first = swap ? b : a;
  const Vec& second = swap ? a : b;
  DistanceEstimate there = distance_estimate(context, first, second, budget);
  DistanceEstimate back = distance_estimate(context, second, first, budget);
  SymmetrizedDistance out;
  out.value = 0.5 * (there.value + back.value);
  out.forward = swap ? std::move(back) : std::move(there);
  out.backward = swap ? std::move(there) : std::move(back);
  return out;
}

Membership ball_membership(const DistanceContext& context, const Vec& center, double radius,
                           const Vec& point, BallDirection direction,
                           const DistanceBudget& budget, double tol) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "ball radius must be positive");
  const Chart& chart = context.metric.chart();
  if (chart.difference(center, point).isZero(0.0)) return Membership::member;

  double value = 0.0;
  bool converged = false;
  switch (direction) {
    case BallDirection::forward: {
      const auto e = distance_estimate(context, center, point, budget);
      value = e.value;
      converged = e.kind == EstimateKind::converged;
      break;
    }
    case BallDirection::backward: {
      const auto e = distance_estimate(context, point, center, budget);
      value = e.value;
      converged = e.kind == EstimateKind::converged;
      break;
    }
    case BallDirection::symmetrized: {
      const auto s = symmetrized_distance(context, center, point, budget);
      value = s.value;
      converged = s.forward.kind == EstimateKind::converged &&
                  s.backward.kind == EstimateKind::converged;
      break;
    }
  }
  if (!converged && value >= radius - tol && value <= radius + tol) return Membership::inconclusive;
  return value < radius ? Membership::member : Membership::non_member;
}

}  // namespace finsler

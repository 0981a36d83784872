#pragma once

#include <optional>
#include <string>

#include "finsler/connector.hpp"

namespace finsler {

enum class EstimateKind { upper_bound, converged };
const char* to_string(EstimateKind k);

/// Directed distance estimate. `value` is exactly the F-length of `witness`.
struct DistanceEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::upper_bound;
  DiscreteCurve witness;
  std::string note;
};

struct DistanceBudget {
  int N = 128;
  PenaltySchedule schedule = PenaltySchedule::standard();
  MinimizeOptions minimize;
  double residual_factor = 10.0;
};

/// Where curves may run: inside a domain (penalized continuation), or anywhere
/// in the chart (plain energy minimization, the chart bounds act as barrier).
struct DistanceContext {
  FinslerMetric metric;
  std::optional<Domain> domain;

  static DistanceContext full_chart(FinslerMetric metric);
  static DistanceContext inside(FinslerMetric metric, Domain domain);
};

/// d(p, q). Never throws on non-convergence; the estimate is then an upper bound.
DistanceEstimate distance_estimate(const DistanceContext& context, const Vec& p, const Vec& q,
                                   const DistanceBudget& budget = {});

struct SymmetrizedDistance {
  double value = 0.0;
  DistanceEstimate forward;   // d(p, q)
  DistanceEstimate backward;  // d(q, p)
};

/// (d(p,q) + d(q,p)) / 2, evaluated in a fixed point order so the result is
/// bitwise symmetric in p and q.
SymmetrizedDistance symmetrized_distance(const DistanceContext& context, const Vec& p,
                                         const Vec& q, const DistanceBudget& budget = {});

enum class BallDirection { forward, backward, symmetrized };
enum class Membership { member, non_member, inconclusive };
const char* to_string(BallDirection d);
const char* to_string(Membership m);

/// forward: d(center, point) < radius; backward: d(point, center) < radius.
/// Upper-bound estimates within `tol` of the radius are inconclusive.
Membership ball_membership(const DistanceContext& context, const Vec& center, double radius,
                           const Vec& point, BallDirection direction,
                           const DistanceBudget& budget = {}, double tol = 1e-6);

}  // namespace finsler

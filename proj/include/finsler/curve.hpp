#pragma once

#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

/// Polyline on the uniform grid s_i = i / N, i = 0..N. Nodes are stored in
/// canonical chart coordinates; consecutive nodes are joined by the minimal
/// image displacement on periodic coordinates.
struct DiscreteCurve {
  std::vector<Vec> nodes;

  int segments() const { return static_cast<int>(nodes.size()) - 1; }
  const Vec& front() const { return nodes.front(); }
  const Vec& back() const { return nodes.back(); }
};

/// Chord from p to q with N segments. A nonzero `winding` adds that many full
/// turns along the first periodic coordinate.
DiscreteCurve straight_curve(const Chart& chart, const Vec& p, const Vec& q, int N, int winding = 0);

/// Unwrapped copy of the nodes, starting at the canonical first node.
std::vector<Vec> lifted_nodes(const Chart& chart, const DiscreteCurve& curve);
DiscreteCurve from_lifted(const Chart& chart, const std::vector<Vec>& lifted);

/// Midpoint rule for the F-length: sum_i F(m_i, N dx_i) / N.
double path_length(const FinslerMetric& metric, const DiscreteCurve& curve);

/// Same nodes traversed from q back to p.
DiscreteCurve reversed_traversal(const DiscreteCurve& curve);

/// max_i |a_i - b_i| (period aware); both curves need the same node count.
double sup_distance(const Chart& chart, const DiscreteCurve& a, const DiscreteCurve& b);

}  // namespace finsler

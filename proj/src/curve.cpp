#include "finsler/curve.hpp"

#include <algorithm>

namespace finsler {

DiscreteCurve straight_curve(const Chart& chart, const Vec& p, const Vec& q, int N, int winding) {
  if (N < 2) throw Error(ErrorKind::invalid_argument, "a discrete curve needs N >= 2");
  chart.require_valid(p);
  chart.require_valid(q);
  Vec d = chart.difference(p, q);
  if (winding != 0) {
    const auto k = chart.first_periodic();
    if (!k) throw Error(ErrorKind::invalid_argument, "winding needs a periodic coordinate");
    d[*k] += winding * chart.period(*k);
  }
  const Vec start = chart.canonical(p);
  DiscreteCurve curve;
  curve.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double s = static_cast<double>(i) / N;
    curve.nodes.push_back(chart.canonical(start + s * d));
  }
  curve.nodes.back() = chart.canonical(q);
  return curve;
}

std::vector<Vec> lifted_nodes(const Chart& chart, const DiscreteCurve& curve) {
  std::vector<Vec> out;
  out.reserve(curve.nodes.size());
  if (curve.nodes.empty()) return out;
  out.push_back(chart.canonical(curve.nodes.front()));
  for (std::size_t i = 1; i < curve.nodes.size(); ++i)
    out.push_back(out.back() + chart.difference(curve.nodes[i - 1], curve.nodes[i]));
  return out;
}

DiscreteCurve from_lifted(const Chart& chart, const std::vector<Vec>& lifted) {
  DiscreteCurve curve;
  curve.nodes.reserve(lifted.size());
  for (const auto& x : lifted) curve.nodes.push_back(chart.canonical(x));
  return curve;
}

double path_length(const FinslerMetric& metric, const DiscreteCurve& curve) {
  if (curve.nodes.empty()) throw Error(ErrorKind::invalid_argument, "empty curve");
  const int N = curve.segments();
  if (N == 0) return 0.0;
  const auto x = lifted_nodes(metric.chart(), curve);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const Vec m = 0.5 * (x[i] + x[i + 1]);
    terms.push_back(metric.F(m, N * (x[i + 1] - x[i])));
  }
  // Sorted so that the sum does not depend on the traversal order.
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total / N;
}

DiscreteCurve reversed_traversal(const DiscreteCurve& curve) {
  DiscreteCurve out = curve;
  std::reverse(out.nodes.begin(), out.nodes.end());
  return out;
}

double sup_distance(const Chart& chart, const DiscreteCurve& a, const DiscreteCurve& b) {
  if (a.nodes.size() != b.nodes.size())
    throw Error(ErrorKind::invalid_argument, "curves have different node counts");
  double d = 0.0;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    d = std::max(d, chart.difference(a.nodes[i], b.nodes[i]).norm());
  return d;
}

}  // namespace finsler

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "finsler/distance.hpp"
#include "finsler/presets.hpp"

using namespace finsler;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

FinslerMetric randers05() { return presets::constant_randers(presets::plane(), v2(0.5, 0.0)); }

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("path length") {
  const auto e = presets::euclidean();
  CHECK(path_length(e, straight_curve(e.chart(), v2(0, 0), v2(3, 4), 16)) == doctest::Approx(5.0).epsilon(1e-14));
  const auto r = randers05();
  const auto c = straight_curve(r.chart(), v2(0, 0), v2(1, 0), 16);
  CHECK(path_length(r, c) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(path_length(r, reversed_traversal(c)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(path_length(r, straight_curve(r.chart(), v2(1, 1), v2(1, 1), 16)) == 0.0);
}

TEST_CASE("property: reversed traversal under F is forward traversal under the reversed metric") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  const auto r = presets::constant_randers(presets::plane(), v2(0.3, -0.4));
  for (int k = 0; k < 20; ++k) {
    DiscreteCurve c;
    for (int i = 0; i <= 10; ++i) c.nodes.push_back(v2(n(rng), n(rng)));
    CHECK(path_length(r, reversed_traversal(c)) == path_length(reversed_metric(r), c));
  }
}

TEST_CASE("euclidean distance") {
  const auto d = distance_estimate(DistanceContext::full_chart(presets::euclidean()), v2(0, 0), v2(1, 1));
  CHECK(d.kind == EstimateKind::converged);
  CHECK(std::abs(d.value - std::sqrt(2.0)) < 1e-6);
  CHECK(d.value == path_length(presets::euclidean(), d.witness));
}

TEST_CASE("hyperbolic distance") {
  const auto ctx = DistanceContext::full_chart(presets::hyperbolic_half_plane());
  const auto d = distance_estimate(ctx, v2(0, 1), v2(0, std::exp(1.0)));
  CHECK(d.kind == EstimateKind::converged);
  CHECK(std::abs(d.value - 1.0) < 1e-4);
  // arccosh(1 + |p - q|^2 / (2 p2 q2))
  const auto o = distance_estimate(ctx, v2(-1, 1), v2(1, 1));
  CHECK(std::abs(o.value - std::acosh(3.0)) < 1e-3);
}

TEST_CASE("randers asymmetry") {
  const auto ctx = DistanceContext::full_chart(randers05());
  const Vec p = v2(0.2, -0.1), q = v2(1.1, 0.6);
  const auto fwd = distance_estimate(ctx, p, q);
  const auto bwd = distance_estimate(ctx, q, p);
  CHECK(fwd.kind == EstimateKind::converged);
  CHECK(bwd.kind == EstimateKind::converged);
  CHECK(std::abs((fwd.value - bwd.value) - 2 * v2(0.5, 0).dot(q - p)) < 1e-6);
  const auto s = symmetrized_distance(ctx, p, q);
  CHECK(std::abs(s.value - (q - p).norm()) < 1e-6);
  // never below the chord under F >= (1 - |b|) |y|
  CHECK(fwd.value >= 0.5 * (q - p).norm());
  CHECK(bwd.value >= 0.5 * (q - p).norm());
}

TEST_CASE("symmetrized distance is bitwise symmetric") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto ctx = DistanceContext::inside(presets::constant_randers(presets::plane(), v2(0.3, 0.4)),
                                           presets::disk(presets::plane(), 2.0));
  for (int k = 0; k < 4; ++k) {
    const Vec p = v2(u(rng), u(rng)), q = v2(u(rng), u(rng));
    CHECK(bitwise_equal(symmetrized_distance(ctx, p, q).value, symmetrized_distance(ctx, q, p).value));
  }
  const auto e = DistanceContext::full_chart(presets::euclidean());
  const auto s = symmetrized_distance(e, v2(0, 0), v2(0.3, 0.4));
  CHECK(s.value == doctest::Approx(s.forward.value).epsilon(1e-14));
}

TEST_CASE("property: triangle inequality for the symmetrized distance") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto ctx = DistanceContext::inside(presets::constant_randers(presets::plane(), v2(-0.2, 0.6)),
                                           presets::disk(presets::plane(), 2.0));
  for (int k = 0; k < 3; ++k) {
    const Vec p = v2(u(rng), u(rng)), q = v2(u(rng), u(rng)), r = v2(u(rng), u(rng));
    const double pr = symmetrized_distance(ctx, p, r).value;
    const double pq = symmetrized_distance(ctx, p, q).value;
    const double qr = symmetrized_distance(ctx, q, r).value;
    CHECK(pr <= pq + qr + 1e-5);
  }
}

TEST_CASE("ball membership") {
  const auto e = DistanceContext::full_chart(presets::euclidean());
  CHECK(ball_membership(e, v2(0, 0), 1.0, v2(0.5, 0), BallDirection::forward) == Membership::member);
  CHECK(ball_membership(e, v2(0, 0), 1.0, v2(1.5, 0), BallDirection::forward) == Membership::non_member);

  // d(0, (0.9,0)) = 1.35 and d((0.9,0), 0) = 0.45
  const auto r = DistanceContext::full_chart(randers05());
  const Vec c = v2(0, 0), x = v2(0.9, 0);
  CHECK(ball_membership(r, c, 1.4, x, BallDirection::forward) == Membership::member);
  CHECK(ball_membership(r, c, 1.4, x, BallDirection::backward) == Membership::member);
  CHECK(ball_membership(r, c, 1.0, x, BallDirection::forward) == Membership::non_member);
  CHECK(ball_membership(r, c, 1.0, x, BallDirection::backward) == Membership::member);
  CHECK(ball_membership(r, c, 0.5, x, BallDirection::symmetrized) == Membership::non_member);
  CHECK(ball_membership(r, c, 1.0, x, BallDirection::symmetrized) == Membership::member);

  for (auto dir : {BallDirection::forward, BallDirection::backward, BallDirection::symmetrized})
    CHECK(ball_membership(r, x, 1e-9, x, dir) == Membership::member);
}

TEST_CASE("non-convergence gives an upper bound, not an exception") {
  DistanceBudget tight;
  tight.minimize.max_iterations = 1;
  const auto d = distance_estimate(DistanceContext::inside(presets::euclidean(), presets::annulus(presets::plane())),
                                   v2(-1.5, 0.1), v2(1.5, 0.1), tight);
  CHECK(d.kind == EstimateKind::upper_bound);
  CHECK(d.value == path_length(presets::euclidean(), d.witness));
  CHECK(!d.note.empty());
}

TEST_CASE("membership near the radius with an upper bound is inconclusive") {
  DistanceBudget tight;
  tight.minimize.max_iterations = 0;
  const auto ctx = DistanceContext::inside(presets::euclidean(), presets::disk(presets::plane(), 2.0));
  // the initial chord is already optimal, so the upper bound equals 1
  CHECK(ball_membership(ctx, v2(-0.5, 0), 1.0, v2(0.5, 0), BallDirection::forward, tight) ==
        Membership::inconclusive);
}

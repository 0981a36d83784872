#include <doctest.h>

#include <cmath>

#include "finsler/domain.hpp"
#include "finsler/presets.hpp"
#include "finsler/sampling.hpp"

using namespace finsler;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

const std::vector<double> kRadii{0.025, 0.05, 0.1};

FinslerMetric randers05() { return presets::constant_randers(presets::plane(), v2(0.5, 0.0)); }

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("finslerian hessian") {
  const auto e = presets::euclidean();
  const auto disk = presets::disk(presets::plane());
  for (const auto& y : {v2(1, 0), v2(0.3, -2), v2(-1, 1)})
    CHECK(finsler_hessian(e, disk, {v2(0.2, 0.1), y}) == doctest::Approx(-2 * y.squaredNorm()).epsilon(1e-14));
  CHECK(finsler_hessian(e, presets::half_plane(presets::plane()), {v2(3, 0), v2(1, 1)}) == 0.0);
  // horocycle x2 = 1: Hess phi = 0, dphi . G = (y1^2 - y2^2) / x2
  const auto h = presets::hyperbolic_half_plane();
  const auto horoball = presets::half_plane(presets::upper_half_plane(), 1.0);
  CHECK(finsler_hessian(h, horoball, {v2(0, 1), v2(1, 0)}) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(kind_of([&] { finsler_hessian(e, disk, {v2(1, 0), v2(0, 0)}); }) == ErrorKind::zero_section);
}

TEST_CASE("boundary function derivatives fall back to differences") {
  BoundaryFunction f([](const Vec& x) { return 1.0 - x.squaredNorm(); });
  CHECK(!f.analytic_gradient());
  CHECK((f.gradient(v2(0.3, -0.4)) - v2(-0.6, 0.8)).norm() < 1e-8);
  CHECK((f.hessian(v2(0.3, -0.4)) + 2 * Mat::Identity(2, 2)).norm() < 1e-5);
}

TEST_CASE("inner normal") {
  const auto disk = presets::disk(presets::plane());
  const auto n = inner_normal(presets::euclidean(), disk, v2(1, 0));
  CHECK((n.n - v2(-1, 0)).norm() < 1e-10);
  // F = |y| + y1/2 on {x2 > 0}: n/|n| + b is parallel to (0,1) and F(n) = 1,
  // so n = (4/3) (-1/2, sqrt(3)/2).
  const auto r = inner_normal(randers05(), presets::half_plane(presets::plane()), v2(0.7, 0));
  CHECK(r.n[0] == doctest::Approx(-2.0 / 3).epsilon(1e-9));
  CHECK(r.n[1] == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(randers05().F(v2(0.7, 0), r.n) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(kind_of([&] { inner_normal(presets::euclidean(), disk, v2(0.5, 0)); }) == ErrorKind::not_on_boundary);
}

TEST_CASE("property: inner normal is g-orthogonal to the boundary") {
  const auto m = reversed_metric(presets::constant_randers(presets::plane(), v2(0.3, -0.4)));
  const auto disk = presets::disk(presets::plane(), 1.5);
  for (int k = 0; k < 12; ++k) {
    const double t = 0.5 * k;
    const Vec x = 1.5 * v2(std::cos(t), std::sin(t));
    const auto n = inner_normal(m, disk, x);
    const Mat g = m.fundamental_tensor(x, n.n).g;
    const Vec tangent = v2(-std::sin(t), std::cos(t));
    CHECK(std::abs(tangent.dot(g * n.n)) < 1e-9);
    CHECK(m.F(x, n.n) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(disk.grad_phi(x).dot(n.n) > 0.0);
  }
}

TEST_CASE("normal curvature") {
  const auto e = presets::euclidean();
  CHECK(normal_curvature(e, presets::disk(presets::plane()), {v2(1, 0), v2(0, 1)}) == doctest::Approx(1.0));
  CHECK(normal_curvature(e, presets::exterior_disk(presets::plane()), {v2(1, 0), v2(0, 1)}) ==
        doctest::Approx(-1.0));
  CHECK(normal_curvature(e, presets::disk(presets::plane(), 2.0), {v2(0, 2), v2(1, 0)}) ==
        doctest::Approx(0.5));
  const auto h = presets::hyperbolic_half_plane();
  const auto horoball = presets::half_plane(presets::upper_half_plane(), 1.0);
  CHECK(normal_curvature(h, horoball, {v2(0, 1), v2(1, 0)}) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(kind_of([&] { normal_curvature(e, presets::disk(presets::plane()), {v2(1, 0), v2(1, 1)}); }) ==
        ErrorKind::non_tangent);
}

TEST_CASE("tangent directions") {
  const auto m = randers05();
  const auto disk = presets::disk(presets::plane());
  const Vec x = v2(0.6, 0.8);
  const auto dirs = tangent_directions(m, disk, x, 8, 1);
  CHECK(dirs.size() == 8);
  for (const auto& y : dirs) {
    CHECK(std::abs(disk.grad_phi(x).dot(y)) < 1e-12);
    CHECK(m.F(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("infinitesimal convexity") {
  const auto e = presets::euclidean();
  const auto disk = presets::disk(presets::plane());
  const auto r = infinitesimal_convexity_check(e, disk, v2(1, 0), 64, 1);
  CHECK(r.verdict == Verdict::convex);
  CHECK(r.reversed_verdict == Verdict::convex);
  CHECK(r.max_value == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(!r.witness);

  const auto a = infinitesimal_convexity_check(e, presets::annulus(presets::plane()), v2(1, 0), 64, 1);
  CHECK(a.verdict == Verdict::nonconvex);
  REQUIRE(a.witness);
  CHECK(a.witness->value > 0.0);

  const auto again = infinitesimal_convexity_check(e, presets::annulus(presets::plane()), v2(1, 0), 64, 1);
  CHECK(again.witness->direction == a.witness->direction);
  CHECK(again.max_value == a.max_value);
}

TEST_CASE("local convexity") {
  const auto e = presets::euclidean();
  const auto disk = presets::disk(presets::plane());
  const auto r = local_convexity_check(e, disk, v2(1, 0), kRadii, 64, 1);
  CHECK(r.verdict == Verdict::convex);
  CHECK(r.largest_verified_radius == doctest::Approx(0.1));
  // phi(x + r y) = -r^2 for a unit tangent y
  for (const auto& s : r.samples) CHECK(s.value == doctest::Approx(-s.radius * s.radius).epsilon(1e-9));

  const auto x = local_convexity_check(e, presets::exterior_disk(presets::plane()), v2(1, 0), kRadii, 64, 1);
  CHECK(x.verdict == Verdict::nonconvex);
  REQUIRE(x.witness);
  CHECK(x.witness->value > 0.0);
  CHECK(x.largest_verified_radius == 0.0);
}

TEST_CASE("local check near the chart edge is inconclusive, not a verdict") {
  Chart chart(2);
  chart.set_bounds(1, -1, 0.05);
  const auto m = presets::euclidean_on(chart);
  const auto r = local_convexity_check(m, presets::half_plane(chart, -0.5), v2(0, -0.5), std::vector<double>{0.3}, 8, 1);
  CHECK(r.verdict == Verdict::convex);
  BoundaryFunction tilted([](const Vec& x) { return x[1] + 0.5 - x[0]; },
                          [](const Vec&) { return v2(-1, 1); });
  const auto t = local_convexity_check(m, Domain(chart, tilted), v2(0, -0.5), std::vector<double>{1.0}, 8, 1);
  bool any_inconclusive = false;
  for (const auto& s : t.samples) any_inconclusive |= s.inconclusive;
  CHECK(any_inconclusive);
}

TEST_CASE("tangency probe") {
  const auto e = presets::euclidean();
  const auto hp = presets::half_plane(presets::plane());
  CHECK(tangency_probe(e, hp, v2(0, 0), v2(1, 0), 1.0, 1e-3).outcome == TangencyOutcome::stays_on_boundary);
  const auto d = tangency_probe(e, presets::disk(presets::plane()), v2(1, 0), v2(0, 1), 1.0, 1e-3);
  CHECK(d.outcome == TangencyOutcome::exits_D);
  CHECK(d.min_phi == doctest::Approx(-1.0).epsilon(1e-9));
  const auto x = tangency_probe(e, presets::exterior_disk(presets::plane()), v2(1, 0), v2(0, 1), 1.0, 1e-3);
  CHECK(x.outcome == TangencyOutcome::enters_D);
  CHECK(x.witness_time > 0.0);
  CHECK(x.witness_phi > x.tolerance);
}

TEST_CASE("boundary projection") {
  const auto disk = presets::disk(presets::plane());
  CHECK((boundary_projection(disk, v2(0.5, 0)) - v2(1, 0)).norm() < 1e-10);
  const Vec p = boundary_projection(presets::annulus(presets::plane()), v2(0.3, 1.2));
  CHECK(std::abs(p.norm() - 1.0) < 1e-10);
  CHECK(std::abs(p[0] / p[1] - 0.25) < 1e-8);
}

TEST_CASE("property: reversibility of the infinitesimal verdict") {
  const auto m = presets::constant_randers(presets::plane(), v2(0.5, 0.2));
  const Domain domains[] = {presets::disk(presets::plane()), presets::annulus(presets::plane()),
                            presets::exterior_disk(presets::plane())};
  for (const auto& d : domains) {
    for (int k = 0; k < 10; ++k) {
      const double t = 0.6 * k + 0.1;
      const Vec x = v2(std::cos(t), std::sin(t));
      const auto r = infinitesimal_convexity_check(m, d, x, 32, k);
      const auto rr = infinitesimal_convexity_check(reversed_metric(m), d, x, 32, k);
      CHECK(r.verdict == r.reversed_verdict);
      CHECK(rr.verdict == r.verdict);
    }
  }
}

TEST_CASE("property: infinitesimal convexity agrees with local convexity") {
  struct Case {
    FinslerMetric metric;
    Domain domain;
    Vec x;
    bool convex;
  };
  const std::vector<Case> cases{
      {presets::euclidean(), presets::half_plane(presets::plane()), v2(0, 0), true},
      {presets::euclidean(), presets::disk(presets::plane()), v2(0, 1), true},
      {presets::hyperbolic_half_plane(), presets::half_plane(presets::upper_half_plane(), 1.0), v2(0, 1), true},
      {randers05(), presets::half_plane(presets::plane()), v2(0, 0), true},
      {presets::euclidean(), presets::annulus(presets::plane()), v2(1, 0), false},
      {presets::euclidean(), presets::exterior_disk(presets::plane()), v2(0, -1), false},
  };
  for (const auto& c : cases) {
    const auto inf = infinitesimal_convexity_check(c.metric, c.domain, c.x, 64, 2);
    const auto loc = local_convexity_check(c.metric, c.domain, c.x, kRadii, 64, 2);
    CHECK((inf.verdict == Verdict::convex) == c.convex);
    CHECK((loc.verdict == Verdict::convex) == c.convex);
    if (!c.convex) {
      REQUIRE(inf.witness);
      const auto t = tangency_probe(c.metric, c.domain, c.x, inf.witness->direction, 1.0, 1e-3);
      CHECK(t.outcome == TangencyOutcome::enters_D);
    }
  }
}

TEST_CASE("sphere sequence and complements") {
  const auto s = sphere_sequence(3, 50, 4);
  for (const auto& u : s) CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
  const Mat c = orthogonal_complement(v2(1, 2));
  CHECK(c.cols() == 1);
  CHECK(std::abs(c.col(0).dot(v2(1, 2))) < 1e-14);
}

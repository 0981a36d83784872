#include <doctest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/oracles.hpp"

using namespace finsler;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
  return t;
}

}  // namespace

TEST_CASE("golden ratio roots for A = 1") {
  const auto s = comparison_solution(1.0, 0.0, 1.0);
  CHECK(s.lambda_plus == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
  CHECK(s.lambda_minus == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-15));
}

TEST_CASE("property: root signs and the characteristic polynomial") {
  for (double A : {0.1, 1.0, 10.0, 1e-4, 1e4}) {
    const auto s = comparison_solution(A, 0.0, 1.0);
    CHECK(s.lambda_minus < 0.0);
    CHECK(s.lambda_plus > 0.0);
    for (double l : {s.lambda_minus, s.lambda_plus}) CHECK(std::abs(l * l - A * l - A) <= 1e-12 * (1 + A * A));
    CHECK(s.lambda_minus * s.lambda_plus == doctest::Approx(-A).epsilon(1e-13));
  }
}

TEST_CASE("anchor conditions") {
  for (double A : {0.1, 1.0, 2.0, 10.0}) {
    for (double ta : {0.0, 0.7, 40.0}) {
      const auto s = comparison_solution(A, ta, 1.0);
      CHECK(std::abs(s.value(ta) - 1.0) <= 1e-12);
      CHECK(std::abs(s.derivative(ta)) <= 1e-12);
      CHECK(s.C_minus > 0.0);
      CHECK(s.C_plus > 0.0);
    }
  }
  const auto s = comparison_solution(2.0, 0.0, 1.0);
  for (double t : grid(-3, 3, 61)) {
    CHECK(s.second_derivative(t) > 0.0);
    // the ODE itself
    CHECK(std::abs(s.second_derivative(t) - 2.0 * (s.value(t) + s.derivative(t))) <=
          1e-12 * (1 + std::abs(s.second_derivative(t))));
  }
}

TEST_CASE("zero anchor gives the zero solution") {
  const auto s = comparison_solution(3.0, 1.0, 0.0);
  CHECK(s.C_minus == 0.0);
  CHECK(s.C_plus == 0.0);
  CHECK(s.value(5.0) == 0.0);
}

TEST_CASE("argument errors") {
  CHECK_THROWS_AS(comparison_solution(1.0, 0.0, -1.0), Error);
  CHECK_THROWS_AS(comparison_solution(0.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(gronwall_null_check(1.0, {0, 0.1, 0.3, 0.4, 0.5}, {0, 0, 0, 0, 0}), Error);
  CHECK_THROWS_AS(gronwall_null_check(1.0, {0, 0.1, 0.2}, {0, 0, 0}), Error);
  CHECK_THROWS_AS(gronwall_null_check(1.0, grid(0, 1, 5), {0, -1, 0, 0, 0}), Error);
}

TEST_CASE("null check on simple functions") {
  const auto t = grid(0, 0.1, 101);
  const auto zero = gronwall_null_check(1.0, t, std::vector<double>(t.size(), 0.0));
  CHECK(zero.hypothesis_holds);
  CHECK(zero.conclusion_holds);

  std::vector<double> sq;
  for (double v : t) sq.push_back(v * v);
  const auto r = gronwall_null_check(1.0, t, sq);
  CHECK(!r.hypothesis_holds);
  CHECK(!r.conclusion_holds);
  CHECK(r.worst_violation > 1.0);

  // comparison solution with zero anchor data at t = 0
  const auto s = comparison_solution(1.0, 0.0, 0.0);
  std::vector<double> psi;
  for (double v : t) psi.push_back(s.value(v));
  const auto c = gronwall_null_check(1.0, t, psi);
  CHECK(c.hypothesis_holds);
  CHECK(c.conclusion_holds);
}

TEST_CASE("a function with a nonzero anchor slope is rejected") {
  const auto t = grid(0, 1, 201);
  std::vector<double> psi;
  for (double v : t) psi.push_back(v);
  const auto r = gronwall_null_check(1.0, t, psi);
  CHECK(!r.hypothesis_holds);
  CHECK(r.anchor_slope == doctest::Approx(1.0));
}

TEST_CASE("generated family") {
  const auto fam = gronwall_family(100, 401, 7);
  REQUIRE(fam.size() == 100);
  int zeros = 0, counterexamples = 0;
  for (const auto& f : fam) {
    REQUIRE(f.t.size() == 401);
    CHECK(f.t.front() == 0.0);
    CHECK(f.t.back() == doctest::Approx(1.0));
    CHECK(f.psi.front() == doctest::Approx(0.0));
    bool zero = true;
    for (double v : f.psi) {
      CHECK(v >= 0.0);
      zero &= v == 0.0;
    }
    zeros += zero;
    for (double A : {0.1, 1.0, 10.0}) {
      const auto c = gronwall_null_check(A, f.t, f.psi);
      counterexamples += c.hypothesis_holds && !c.conclusion_holds;
      if (zero) CHECK(c.hypothesis_holds);
      if (!zero) CHECK(std::abs(c.anchor_value) < 1e-12);
    }
  }
  CHECK(zeros == 10);
  CHECK(counterexamples == 0);
  const auto again = gronwall_family(100, 401, 7);
  CHECK(again[37].psi == fam[37].psi);
  CHECK(gronwall_family(100, 401, 8)[37].psi != fam[37].psi);
}

#pragma once

#include <cstdint>
#include <vector>

namespace finsler {

/// Solution of phi'' = A (phi + phi') with phi(t_anchor) = psi_anchor and
/// phi'(t_anchor) = 0, written as C_minus e^{lambda_minus t} + C_plus e^{lambda_plus t}.
struct ComparisonSolution {
  double A = 0.0;
  double t_anchor = 0.0;
  double psi_anchor = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double C_minus = 0.0;
  double C_plus = 0.0;

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

 private:
  friend ComparisonSolution comparison_solution(double, double, double);
  // Coefficients relative to the anchor, used for evaluation so that large
  // anchors do not overflow.
  double a_minus_ = 0.0;
  double a_plus_ = 0.0;
};

ComparisonSolution comparison_solution(double A, double t_anchor, double psi_anchor);

struct GronwallCheck {
  bool hypothesis_holds = false;
  bool conclusion_holds = false;
  double worst_violation = 0.0;  // max of psi'' - A (psi + |psi'|) over interior nodes
  double anchor_value = 0.0;
  double anchor_slope = 0.0;
};

/// Checks psi'' <= A (psi + |psi'|) (within 1e-6) at the interior nodes of a
/// uniform grid starting at t = 0, together with psi(0) = psi'(0) = 0, and
/// whether psi vanishes (max psi <= 1e-8). Derivatives are central
/// differences; psi'(0) is one-sided of second order. The anchor tolerance is
/// 1e-6 + h^2 max |psi''|, the truncation scale of that difference.
GronwallCheck gronwall_null_check(double A, const std::vector<double>& t,
                                  const std::vector<double>& psi);

struct SampledFunction {
  std::vector<double> t;
  std::vector<double> psi;
};

/// Deterministic family of non-negative functions on [0, 1] with
/// psi(0) = psi'(0) = 0: squares of random cubic splines through the origin,
/// plus every tenth member identically zero.
std::vector<SampledFunction> gronwall_family(int count, int grid_points, std::uint64_t seed);

}  // namespace finsler

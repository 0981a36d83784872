#include "finsler/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/Splines>

#include "finsler/errors.hpp"

namespace finsler {

double ComparisonSolution::value(double t) const {
  const double u = t - t_anchor;
  return a_minus_ * std::exp(lambda_minus * u) + a_plus_ * std::exp(lambda_plus * u);
}

double ComparisonSolution::derivative(double t) const {
  const double u = t - t_anchor;
  return a_minus_ * lambda_minus * std::exp(lambda_minus * u) +
         a_plus_ * lambda_plus * std::exp(lambda_plus * u);
}

double ComparisonSolution::second_derivative(double t) const {
  const double u = t - t_anchor;
  return a_minus_ * lambda_minus * lambda_minus * std::exp(lambda_minus * u) +
         a_plus_ * lambda_plus * lambda_plus * std::exp(lambda_plus * u);
}

ComparisonSolution comparison_solution(double A, double t_anchor, double psi_anchor) {
  if (!(A > 0.0)) throw Error(ErrorKind::invalid_argument, "comparison ODE needs A > 0");
  if (!(psi_anchor >= 0.0))
    throw Error(ErrorKind::invalid_argument, "comparison ODE needs psi_anchor >= 0");
  ComparisonSolution s;
  s.A = A;
  s.t_anchor = t_anchor;
  s.psi_anchor = psi_anchor;
  // Roots of l^2 - A l - A = 0; the product of the roots is -A.
  s.lambda_plus = 0.5 * (A + std::sqrt(A * A + 4.0 * A));
  s.lambda_minus = -A / s.lambda_plus;
  // a_minus + a_plus = psi_anchor, l_minus a_minus + l_plus a_plus = 0.
  Eigen::Matrix2d M;
  M << 1.0, 1.0, s.lambda_minus, s.lambda_plus;
  const Eigen::Vector2d a = M.partialPivLu().solve(Eigen::Vector2d(psi_anchor, 0.0));
  s.a_minus_ = a[0];
  s.a_plus_ = a[1];
  s.C_minus = a[0] * std::exp(-s.lambda_minus * t_anchor);
  s.C_plus = a[1] * std::exp(-s.lambda_plus * t_anchor);
  return s;
}

GronwallCheck gronwall_null_check(double A, const std::vector<double>& t,
                                  const std::vector<double>& psi) {
  const std::size_t n = t.size();
  if (n < 5 || psi.size() != n)
    throw Error(ErrorKind::invalid_argument, "gronwall check needs >= 5 matching samples");
  const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "grid must be increasing");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h)
      throw Error(ErrorKind::invalid_argument, "non-uniform grid");
  for (double v : psi)
    if (!(v >= 0.0)) throw Error(ErrorKind::invalid_argument, "psi must be non-negative");

  GronwallCheck out;
  out.worst_violation = -std::numeric_limits<double>::infinity();
  double curvature = 0.0;
  bool inequality = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h * h);
    const double d1 = (psi[i + 1] - psi[i - 1]) / (2.0 * h);
    const double v = d2 - A * (psi[i] + std::abs(d1));
    curvature = std::max(curvature, std::abs(d2));
    out.worst_violation = std::max(out.worst_violation, v);
    if (v > 1e-6) inequality = false;
  }
  out.anchor_value = psi[0];
  out.anchor_slope = (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * h);
  const double anchor_tol = 1e-6 + h * h * curvature;
  const bool anchors = std::abs(out.anchor_value) <= anchor_tol && std::abs(out.anchor_slope) <= anchor_tol;
  out.hypothesis_holds = inequality && anchors;
  out.conclusion_holds = *std::max_element(psi.begin(), psi.end()) <= 1e-8;
  return out;
}

std::vector<SampledFunction> gronwall_family(int count, int grid_points, std::uint64_t seed) {
  if (count < 1 || grid_points < 5)
    throw Error(ErrorKind::invalid_argument, "family needs count >= 1 and >= 5 grid points");
  using Spline1 = Eigen::Spline<double, 1>;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> knots_dist(3, 8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_amp(std::log(0.1), std::log(10.0));

  std::vector<SampledFunction> family;
  for (int m = 0; m < count; ++m) {
    SampledFunction f;
    f.t.resize(grid_points);
    f.psi.assign(grid_points, 0.0);
    for (int i = 0; i < grid_points; ++i) f.t[i] = static_cast<double>(i) / (grid_points - 1);
    const int K = knots_dist(rng);
    const double amp = std::exp(log_amp(rng));
    if (m % 10 == 9) {
      family.push_back(std::move(f));
      continue;
    }
    Eigen::RowVectorXd sites(K + 1), values(K + 1);
    for (int k = 0; k <= K; ++k) {
      sites[k] = static_cast<double>(k) / K;
      values[k] = k == 0 ? 0.0 : amp * unit(rng);
    }
    const Spline1 s = Eigen::SplineFitting<Spline1>::Interpolate(values, 3, sites);
    for (int i = 0; i < grid_points; ++i) {
      const double v = s(f.t[i])(0);
      f.psi[i] = v * v;
    }
    family.push_back(std::move(f));
  }
  return family;
}

}  // namespace finsler

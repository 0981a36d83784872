#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace finsler {

enum class ErrorKind {
  invalid_point,
  zero_section,
  convexity_violation,
  randers_positivity,
  left_chart,
  left_domain,
  not_on_boundary,
  non_tangent,
  no_convergence,
  orientation,
  degenerate_path,
  degenerate_segment,
  invalid_argument,
};

const char* to_string(ErrorKind kind);

// Every library failure is reported through this type; `kind()` lets callers
// (the CLI in particular) map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by the exponential map when the geodesic leaves the chart.
class ChartExitError : public Error {
 public:
  ChartExitError(const std::string& message, Eigen::VectorXd exit_point)
      : Error(ErrorKind::left_chart, message), exit_point_(std::move(exit_point)) {}

  const Eigen::VectorXd& exit_point() const noexcept { return exit_point_; }

 private:
  Eigen::VectorXd exit_point_;
};

}  // namespace finsler

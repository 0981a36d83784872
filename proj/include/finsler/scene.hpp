#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/connector.hpp"
#include "finsler/distance.hpp"
#include "finsler/expression.hpp"

namespace finsler {

// Malformed or inconsistent scene; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A constant or an expression in x1..xn.
struct Coefficient {
  std::optional<double> constant;
  std::optional<FieldExpression> expression;

  double operator()(const Vec& x) const { return constant ? *constant : (*expression)(x); }
};

struct SolverSettings {
  int N = 128;
  double eps0 = 1.0;
  double eps_ratio = 0.1;
  int eps_count = 7;
  double tol_grad = 1e-9;
  int max_iterations = 10000;
  int memory = 8;
  double lambda_growth = 2.0;
  double residual_factor = 10.0;
  double delta_ratio = 0.5;
  std::uint64_t seed = 1;
  int samples = 1000;
  int directions = 64;
  std::vector<double> radii{0.025, 0.05, 0.1};
  double horizon = 1.0;
  double step = 1e-3;
  int classes = 3;
  double A = 1.0;
};

struct SceneConfig {
  int dim = 2;
  std::vector<std::optional<double>> periods;
  std::vector<std::optional<Interval>> bounds;

  std::string metric_kind = "euclidean";
  std::vector<std::vector<Coefficient>> a;
  std::vector<Coefficient> b;
  bool reversed = false;
  double fd_step = FinslerMetric::default_fd_step;

  std::optional<FieldExpression> phi;
  double boundary_band = Domain::default_band;

  std::optional<Vec> p, q, x, y;
  std::optional<double> radius;

  SolverSettings solver;

  Chart chart() const;
  FinslerMetric metric() const;
  // Whole chart when no boundary expression is given.
  Domain domain() const;
  bool has_domain() const { return phi.has_value(); }
  PenaltySchedule schedule() const;
  ConnectorOptions connector_options() const;
  DistanceBudget distance_budget() const;

  // Every setting, defaults included, as compact JSON with sorted keys.
  std::string resolved_json() const;
};

SceneConfig parse_scene(const std::string& json_text);
// Range checks on the solver settings; throws ConfigError.
void validate_scene(const SceneConfig& scene);
SceneConfig load_scene(const std::string& path);

}  // namespace finsler

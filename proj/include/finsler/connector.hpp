#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finsler/curve.hpp"
#include "finsler/domain.hpp"

namespace finsler {

/// Strictly decreasing penalty weights eps_0 > ... > eps_K with eps_0 <= 1.
struct PenaltySchedule {
  std::vector<double> eps_values;

  static PenaltySchedule geometric(double eps0, double ratio, int count);
  // 1, 1e-1, ..., 1e-6
  static PenaltySchedule standard();

  void validate() const;
};

struct CriticalDiagnostics {
  double grad_norm = 0.0;               // N * max |dJ/dx_i|
  std::vector<double> energy_values;    // 1/2 G - eps / phi^2 at segment midpoints
  double conservation_residual = 0.0;   // max - min of energy_values
  std::vector<double> lambda_field;     // 2 eps / phi^3 at nodes
  double lambda_sup = 0.0;
  double geodesic_residual = 0.0;
  double min_phi = 0.0;
  double energy = 0.0;
};

struct MinimizeOptions {
  double tol_grad = 1e-9;
  int max_iterations = 10000;
  int memory = 8;
  // Called after every accepted step with the energy and min phi of the nodes.
  std::function<void(double energy, double min_phi)> observer;
};

struct MinimizeResult {
  DiscreteCurve curve;
  CriticalDiagnostics diagnostics;
  bool converged = false;
  int iterations = 0;
};

/// Midpoint rule for J_eps: sum_i [1/2 G(m_i, N dx_i) + eps / phi(m_i)^2] / N.
/// Throws `left_domain` if a node or midpoint has phi <= 0.
double discrete_energy(const FinslerMetric& metric, const Domain& domain,
                       const DiscreteCurve& curve, double eps);

/// dJ_eps/dx_i for the interior nodes i = 1..N-1. The G-part of a segment is
/// dropped when |dx_i| <= 1e-10 * |q - p|.
std::vector<Vec> energy_gradient(const FinslerMetric& metric, const Domain& domain,
                                 const DiscreteCurve& curve, double eps);

/// max over interior nodes of |N^2 (x_{i+1} - 2 x_i + x_{i-1}) + G(x_i, N (x_{i+1} - x_{i-1}) / 2)|.
double geodesic_residual(const FinslerMetric& metric, const DiscreteCurve& curve);

CriticalDiagnostics critical_diagnostics(const FinslerMetric& metric, const Domain& domain,
                                         const DiscreteCurve& curve, double eps);

/// Limited-memory BFGS, preconditioned by the discrete Laplacian, with a
/// backtracking line search that treats leaving the domain as infinite energy.
/// The endpoints of `init` stay fixed.
MinimizeResult minimize_penalized(const FinslerMetric& metric, const Domain& domain,
                                  const DiscreteCurve& init, double eps,
                                  const MinimizeOptions& options = {});

enum class Classification { interior_geodesic, boundary_touching, failed };
const char* to_string(Classification c);

struct ContinuationStage {
  double eps = 0.0;
  DiscreteCurve curve;
  CriticalDiagnostics diagnostics;
  bool converged = false;
  int iterations = 0;
};

struct ConnectorOptions {
  int N = 128;
  MinimizeOptions minimize;
  // Boundary contact: over the last three stages min phi shrinks by at least
  // this factor while lambda_sup drops by less than it.
  double lambda_growth = 2.0;
  double residual_factor = 10.0;
  // min phi over the last three stages must stay above delta_ratio * max.
  double delta_ratio = 0.5;
};

struct ConnectorResult {
  std::vector<ContinuationStage> per_eps;
  DiscreteCurve limit_curve;
  Classification classification = Classification::failed;
  double length = 0.0;
  std::optional<int> failed_stage;
  int winding = 0;
  std::string note;
};

/// Chord from p to q (with `winding` turns) whose nodes too close to or
/// outside the boundary are pushed along grad phi until
/// phi >= min(phi(p), phi(q)) / 2.
DiscreteCurve initial_curve(const Domain& domain, const Vec& p, const Vec& q, int N, int winding = 0);

ConnectorResult epsilon_continuation(const FinslerMetric& metric, const Domain& domain,
                                     const Vec& p, const Vec& q, const PenaltySchedule& schedule,
                                     const ConnectorOptions& options = {});

ConnectorResult epsilon_continuation(const FinslerMetric& metric, const Domain& domain,
                                     const DiscreteCurve& init, const PenaltySchedule& schedule,
                                     const ConnectorOptions& options = {});

/// Continuation from k initial curves with windings 0..k-1 along the first
/// periodic coordinate. Results are sorted by length; a result is kept only if
/// its limit curve differs from every kept one by more than 1e-3.
std::vector<ConnectorResult> multiplicity_search(const FinslerMetric& metric, const Domain& domain,
                                                 const Vec& p, const Vec& q, int class_count,
                                                 const PenaltySchedule& schedule,
                                                 const ConnectorOptions& options = {});

std::vector<ConnectorResult> multiplicity_search(const FinslerMetric& metric, const Domain& domain,
                                                 const std::vector<DiscreteCurve>& inits,
                                                 const PenaltySchedule& schedule,
                                                 const ConnectorOptions& options = {});

}  // namespace finsler

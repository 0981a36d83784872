#include "finsler/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "finsler/connector.hpp"
#include "finsler/distance.hpp"
#include "finsler/domain.hpp"
#include "finsler/oracles.hpp"
#include "finsler/scene.hpp"
#include "finsler/spray.hpp"

namespace finsler {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec(const Vec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += num(v[i]);
  }
  return s;
}

const char* flag(bool b) { return b ? "true" : "false"; }

// One output line of key=value fields.
class Record {
 public:
  Record& operator()(const std::string& key, const std::string& value) {
    if (!line_.empty()) line_ += ' ';
    line_ += key + '=' + value;
    return *this;
  }
  Record& operator()(const std::string& key, double value) { return (*this)(key, num(value)); }
  Record& operator()(const std::string& key, int value) { return (*this)(key, std::to_string(value)); }
  Record& operator()(const std::string& key, const char* value) { return (*this)(key, std::string(value)); }

  void emit(std::ostream& out) const { out << line_ << '\n'; }

 private:
  std::string line_;
};

struct Options {
  std::string scene_path;
  std::string out_path;
  bool echo_config = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> N;
  std::optional<int> samples;
  std::optional<int> directions;
  std::optional<int> classes;
  std::optional<double> tol_grad;
  std::optional<int> eps_count;
  std::optional<double> radius;
  bool reversed = false;
  std::string mode;
};

Vec require_point(const std::optional<Vec>& v, const char* name) {
  if (!v) throw ConfigError(std::string("points.") + name + ": required by this command");
  return *v;
}

void write_csv(const std::string& path, const std::vector<double>& s, const std::vector<Vec>& x,
               const std::vector<double>& speed, const std::vector<double>& phi) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  const auto n = x.empty() ? 0 : x.front().size();
  f << "s";
  for (int k = 1; k <= n; ++k) f << ",x" << k;
  f << ",F_speed,phi\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    f << num(s[i]);
    for (int k = 0; k < n; ++k) f << ',' << num(x[i][k]);
    f << ',' << num(speed[i]) << ',' << num(phi[i]) << '\n';
  }
}

void write_curve_csv(const std::string& path, const FinslerMetric& metric, const Domain& domain,
                     const DiscreteCurve& curve) {
  const int N = curve.segments();
  const auto x = lifted_nodes(metric.chart(), curve);
  std::vector<double> s, speed, phi;
  for (int i = 0; i <= N; ++i) {
    Vec v;
    if (N == 0) {
      v = Vec::Zero(x[0].size());
    } else if (i == 0) {
      v = N * (x[1] - x[0]);
    } else if (i == N) {
      v = N * (x[N] - x[N - 1]);
    } else {
      v = 0.5 * N * (x[i + 1] - x[i - 1]);
    }
    s.push_back(N == 0 ? 0.0 : static_cast<double>(i) / N);
    speed.push_back(metric.F(x[i], v));
    phi.push_back(domain.phi(x[i]));
  }
  write_csv(path, s, curve.nodes, speed, phi);
}

void report_convexity(std::ostream& out, const std::string& mode, const ConvexityReport& r) {
  Record rec;
  rec("mode", mode)("verdict", to_string(r.verdict))("reversed_verdict", to_string(r.reversed_verdict));
  rec("samples", static_cast<int>(r.samples.size()))("tolerance", r.tolerance)("max_value", r.max_value);
  if (mode == "local") rec("largest_verified_radius", r.largest_verified_radius);
  const auto& w = r.witness ? r.witness : r.reversed_witness;
  if (w) {
    rec("witness", vec(w->direction))("witness_value", w->value);
    if (mode == "local") rec("witness_radius", w->radius)("witness_reversed", flag(w->reversed));
  } else {
    rec("witness", "none");
  }
  rec.emit(out);
}

int dispatch(const std::string& command, const Options& opt, SceneConfig& scene, std::ostream& out) {
  if (opt.seed) scene.solver.seed = *opt.seed;
  if (opt.N) scene.solver.N = *opt.N;
  if (opt.samples) scene.solver.samples = *opt.samples;
  if (opt.directions) scene.solver.directions = *opt.directions;
  if (opt.classes) scene.solver.classes = *opt.classes;
  if (opt.tol_grad) scene.solver.tol_grad = *opt.tol_grad;
  if (opt.eps_count) scene.solver.eps_count = *opt.eps_count;
  if (opt.radius) scene.radius = *opt.radius;
  validate_scene(scene);
  if (opt.echo_config) out << "config=" << scene.resolved_json() << '\n';

  const auto& sv = scene.solver;
  if (command == "grnew-oracle") {
    const auto sol = comparison_solution(sv.A, 0.0, 1.0);
    Record()("A", sv.A)("lambda_minus", sol.lambda_minus)("lambda_plus", sol.lambda_plus)(
        "C_minus", sol.C_minus)("C_plus", sol.C_plus)("anchor_value_error", std::abs(sol.value(0.0) - 1.0))(
        "anchor_slope_error", std::abs(sol.derivative(0.0)))
        .emit(out);
    const auto family = gronwall_family(sv.samples, 1001, sv.seed);
    int hypothesis = 0, conclusion = 0, counter = 0;
    for (const auto& f : family) {
      const auto c = gronwall_null_check(sv.A, f.t, f.psi);
      hypothesis += c.hypothesis_holds;
      conclusion += c.conclusion_holds;
      counter += c.hypothesis_holds && !c.conclusion_holds;
    }
    Record()("members", static_cast<int>(family.size()))("hypothesis_holds", hypothesis)(
        "conclusion_holds", conclusion)("counterexamples", counter)
        .emit(out);
    return kExitOk;
  }

  const FinslerMetric metric = scene.metric();
  const Domain domain = scene.domain();

  if (command == "metric-audit") {
    const auto a = axiom_audit(metric, sv.samples, sv.seed);
    Record()("samples", a.samples)("skipped", a.skipped)("homogeneity_residual", a.homogeneity_residual)(
        "euler_residual", a.euler_residual)("tensor_residual", a.tensor_residual)(
        "min_eigenvalue", a.min_eigenvalue)("tolerance", a.tolerance)("passed", flag(a.passed))
        .emit(out);
    return a.passed ? kExitOk : kExitSolver;
  }

  if (command == "geodesic") {
    const Vec x = require_point(scene.x, "x");
    const Vec y = require_point(scene.y, "y");
    const auto path = integrate_geodesic(metric, TangentVector{x, y}, sv.horizon, sv.step);
    Record()("steps", static_cast<int>(path.points.size()) - 1)("endpoint", vec(path.points.back()))(
        "end_time", path.times.back())("speed_drift", path.speed_drift)("left_chart", flag(path.left_chart))(
        "inaccurate", flag(path.inaccurate))
        .emit(out);
    if (!opt.out_path.empty()) {
      std::vector<double> speed, phi;
      for (std::size_t i = 0; i < path.points.size(); ++i) {
        speed.push_back(metric.F(path.points[i], path.velocities[i]));
        phi.push_back(domain.phi(path.points[i]));
      }
      write_csv(opt.out_path, path.times, path.points, speed, phi);
    }
    return kExitOk;
  }

  if (command == "expmap") {
    const Vec x = require_point(scene.x, "x");
    const Vec y = require_point(scene.y, "y");
    const Vec e = exponential_map(metric, x, y, opt.reversed);
    Record()("reversed", flag(opt.reversed))("point", vec(e)).emit(out);
    return kExitOk;
  }

  if (command == "convexity") {
    if (!scene.has_domain()) throw ConfigError("domain.phi: required by convexity");
    const Vec x = require_point(scene.x, "x");
    if (opt.mode == "infinitesimal") {
      report_convexity(out, opt.mode,
                       infinitesimal_convexity_check(metric, domain, x, sv.directions, sv.seed));
    } else if (opt.mode == "local") {
      report_convexity(out, opt.mode,
                       local_convexity_check(metric, domain, x, sv.radii, sv.directions, sv.seed));
    } else {
      const Vec y = scene.y ? *scene.y : tangent_directions(metric, domain, x, 1, sv.seed).front();
      const auto t = tangency_probe(metric, domain, x, y, sv.horizon, sv.step);
      Record()("mode", "tangency")("direction", vec(y))("outcome", to_string(t.outcome))(
          "witness_time", t.witness_time)("witness_phi", t.witness_phi)("max_phi", t.max_phi)(
          "min_phi", t.min_phi)("tolerance", t.tolerance)
          .emit(out);
    }
    return kExitOk;
  }

  if (command == "connect") {
    const Vec p = require_point(scene.p, "p");
    const Vec q = require_point(scene.q, "q");
    const auto r = epsilon_continuation(metric, domain, p, q, scene.schedule(), scene.connector_options());
    const auto& last = r.per_eps.back().diagnostics;
    Record()("classification", to_string(r.classification))("length", r.length)(
        "stages", static_cast<int>(r.per_eps.size()))(
        "failed_stage", r.failed_stage ? std::to_string(*r.failed_stage) : std::string("none"))(
        "geodesic_residual", last.geodesic_residual)("min_phi", last.min_phi)
        .emit(out);
    for (std::size_t k = 0; k < r.per_eps.size(); ++k) {
      const auto& st = r.per_eps[k];
      const auto& d = st.diagnostics;
      Record()("stage", static_cast<int>(k))("eps", st.eps)("converged", flag(st.converged))(
          "iterations", st.iterations)("energy", d.energy)("grad_norm", d.grad_norm)(
          "conservation_residual", d.conservation_residual)("lambda_sup", d.lambda_sup)(
          "min_phi", d.min_phi)("geodesic_residual", d.geodesic_residual)
          .emit(out);
    }
    if (!opt.out_path.empty()) write_curve_csv(opt.out_path, metric, domain, r.limit_curve);
    return r.classification == Classification::failed ? kExitSolver : kExitOk;
  }

  if (command == "distance") {
    const Vec p = require_point(scene.p, "p");
    const Vec q = require_point(scene.q, "q");
    const DistanceContext ctx = scene.has_domain() ? DistanceContext::inside(metric, domain)
                                                   : DistanceContext::full_chart(metric);
    const auto budget = scene.distance_budget();
    const auto s = symmetrized_distance(ctx, p, q, budget);
    Record()("forward", s.forward.value)("forward_kind", to_string(s.forward.kind))(
        "backward", s.backward.value)("backward_kind", to_string(s.backward.kind))(
        "symmetrized", s.value)
        .emit(out);
    if (scene.radius) {
      Record rec;
      rec("radius", *scene.radius);
      for (auto dir : {BallDirection::forward, BallDirection::backward, BallDirection::symmetrized})
        rec(std::string(to_string(dir)) + "_ball",
            to_string(ball_membership(ctx, p, *scene.radius, q, dir, budget)));
      rec.emit(out);
    }
    if (!opt.out_path.empty()) write_curve_csv(opt.out_path, metric, domain, s.forward.witness);
    return kExitOk;
  }

  if (command == "multiplicity") {
    const Vec p = require_point(scene.p, "p");
    const Vec q = require_point(scene.q, "q");
    const auto results = multiplicity_search(metric, domain, p, q, sv.classes, scene.schedule(),
                                             scene.connector_options());
    for (std::size_t k = 0; k < results.size(); ++k)
      Record()("rank", static_cast<int>(k))("winding", results[k].winding)("length", results[k].length)(
          "classification", to_string(results[k].classification))
          .emit(out);
    Record()("found", static_cast<int>(results.size()))("requested", sv.classes).emit(out);
    if (!opt.out_path.empty() && !results.empty())
      write_curve_csv(opt.out_path, metric, domain, results.front().limit_curve);
    return static_cast<int>(results.size()) == sv.classes ? kExitOk : kExitSolver;
  }

  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finsler geodesics, convexity probes and penalized connecting curves", "finsler"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub, bool scene_required) {
    auto* s = sub->add_option("--scene", opt.scene_path, "Scene file (JSON)");
    if (scene_required) s->required();
    sub->add_option("--out", opt.out_path, "CSV output path");
    sub->add_flag("--echo-config", opt.echo_config, "Print the resolved configuration first");
    sub->add_option("--seed", opt.seed, "Override solver.seed");
    sub->add_option("--N", opt.N, "Override solver.N");
    sub->add_option("--samples", opt.samples, "Override solver.samples");
    sub->add_option("--directions", opt.directions, "Override solver.directions");
    sub->add_option("--classes", opt.classes, "Override solver.classes");
    sub->add_option("--tol-grad", opt.tol_grad, "Override solver.tol_grad");
    sub->add_option("--eps-count", opt.eps_count, "Override solver.eps_count");
  };

  common(app.add_subcommand("metric-audit", "Statistical check of the metric axioms"), true);
  common(app.add_subcommand("geodesic", "Integrate the geodesic from points.x with velocity points.y"), true);
  auto* expmap = app.add_subcommand("expmap", "Exponential map of points.y at points.x");
  common(expmap, true);
  expmap->add_flag("--reversed", opt.reversed, "Use the reversed metric");
  auto* convexity = app.add_subcommand("convexity", "Boundary convexity probes at points.x");
  common(convexity, true);
  convexity->add_option("mode", opt.mode, "infinitesimal | local | tangency")
      ->required()
      ->check(CLI::IsMember({"infinitesimal", "local", "tangency"}));
  common(app.add_subcommand("connect", "Penalized connecting curve from points.p to points.q"), true);
  auto* distance = app.add_subcommand("distance", "Directed and symmetrized distance estimates");
  common(distance, true);
  distance->add_option("--radius", opt.radius, "Also test ball membership of q around p");
  common(app.add_subcommand("multiplicity", "Connecting curves in several homotopy classes"), true);
  common(app.add_subcommand("grnew-oracle", "Comparison ODE and null-solution harness"), false);

  std::vector<std::string> reversed_args(args.rbegin(), args.rend());
  try {
    app.parse(reversed_args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    SceneConfig scene = opt.scene_path.empty() ? parse_scene("{}") : load_scene(opt.scene_path);
    return dispatch(command, opt, scene, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace finsler

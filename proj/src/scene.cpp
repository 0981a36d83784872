#include "finsler/scene.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace finsler {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) bad(where, "unknown key '" + k + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

Vec vector_of(const json& j, const std::string& where, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    bad(where, "expected an array of " + std::to_string(dim) + " numbers");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

FieldExpression expression(const std::string& text, const std::string& where, int dim) {
  try {
    auto f = FieldExpression::parse(text);
    f.bind(dim);
    return f;
  } catch (const ParseError& e) {
    bad(where, e.what());
  }
}

Coefficient coefficient(const json& j, const std::string& where, int dim) {
  Coefficient c;
  if (j.is_number()) {
    c.constant = j.get<double>();
  } else if (j.is_string()) {
    c.expression = expression(j.get<std::string>(), where, dim);
  } else {
    bad(where, "expected a number or an expression string");
  }
  return c;
}

json coefficient_json(const Coefficient& c) {
  if (c.constant) return *c.constant;
  return c.expression->source();
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

bool all_constant(const SceneConfig& s) {
  for (const auto& row : s.a)
    for (const auto& c : row)
      if (!c.constant) return false;
  for (const auto& c : s.b)
    if (!c.constant) return false;
  return true;
}

void parse_chart(const json& j, SceneConfig& s) {
  only_keys(j, "chart", {"dim", "periods", "bounds"});
  if (j.contains("dim")) s.dim = integer(j["dim"], "chart.dim");
  if (s.dim < 1) bad("chart.dim", "must be >= 1");
  s.periods.assign(s.dim, std::nullopt);
  s.bounds.assign(s.dim, std::nullopt);
  if (j.contains("periods")) {
    const auto& p = j["periods"];
    if (!p.is_array() || static_cast<int>(p.size()) != s.dim) bad("chart.periods", "expected dim entries");
    for (int k = 0; k < s.dim; ++k) {
      if (p[k].is_null()) continue;
      const double v = number(p[k], "chart.periods");
      if (!(v > 0.0)) bad("chart.periods", "periods must be positive");
      s.periods[k] = v;
    }
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    if (!b.is_array() || static_cast<int>(b.size()) != s.dim) bad("chart.bounds", "expected dim entries");
    for (int k = 0; k < s.dim; ++k) {
      if (b[k].is_null()) continue;
      if (!b[k].is_array() || b[k].size() != 2) bad("chart.bounds", "expected [lo, hi] or null");
      const double inf = std::numeric_limits<double>::infinity();
      const double lo = b[k][0].is_null() ? -inf : number(b[k][0], "chart.bounds");
      const double hi = b[k][1].is_null() ? inf : number(b[k][1], "chart.bounds");
      if (!(lo < hi)) bad("chart.bounds", "lo must be below hi");
      if (s.periods[k]) bad("chart.bounds", "a periodic coordinate cannot be bounded");
      s.bounds[k] = Interval{lo, hi};
    }
  }
}

void parse_metric(const json& j, SceneConfig& s) {
  only_keys(j, "metric", {"kind", "a", "b", "reversed", "fd_step"});
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) bad("metric.kind", "expected a string");
    s.metric_kind = j["kind"].get<std::string>();
  }
  if (s.metric_kind != "euclidean" && s.metric_kind != "riemannian" && s.metric_kind != "randers")
    bad("metric.kind", "must be euclidean, riemannian or randers");
  const int n = s.dim;
  if (j.contains("a")) {
    if (s.metric_kind == "euclidean") bad("metric.a", "not allowed for the euclidean kind");
    const auto& a = j["a"];
    if (!a.is_array() || static_cast<int>(a.size()) != n) bad("metric.a", "expected a dim x dim array");
    s.a.assign(n, {});
    for (int i = 0; i < n; ++i) {
      if (!a[i].is_array() || static_cast<int>(a[i].size()) != n)
        bad("metric.a", "expected a dim x dim array");
      for (int k = 0; k < n; ++k)
        s.a[i].push_back(coefficient(a[i][k], "metric.a[" + std::to_string(i) + "][" + std::to_string(k) + "]", n));
    }
  } else {
    if (s.metric_kind == "riemannian") bad("metric.a", "required for the riemannian kind");
    s.a.assign(n, {});
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) s.a[i].push_back(Coefficient{i == k ? 1.0 : 0.0, std::nullopt});
  }
  if (j.contains("b")) {
    if (s.metric_kind != "randers") bad("metric.b", "only allowed for the randers kind");
    const auto& b = j["b"];
    if (!b.is_array() || static_cast<int>(b.size()) != n) bad("metric.b", "expected dim entries");
    for (int k = 0; k < n; ++k) s.b.push_back(coefficient(b[k], "metric.b[" + std::to_string(k) + "]", n));
  } else if (s.metric_kind == "randers") {
    bad("metric.b", "required for the randers kind");
  }
  if (j.contains("reversed")) {
    if (!j["reversed"].is_boolean()) bad("metric.reversed", "expected true or false");
    s.reversed = j["reversed"].get<bool>();
  }
  if (j.contains("fd_step")) {
    s.fd_step = number(j["fd_step"], "metric.fd_step");
    if (!(s.fd_step > 0.0)) bad("metric.fd_step", "must be positive");
  }
}

void parse_domain(const json& j, SceneConfig& s) {
  only_keys(j, "domain", {"phi", "boundary_band"});
  // null means the whole chart, as echoed by resolved_json
  if (j.contains("phi") && !j["phi"].is_null()) {
    if (!j["phi"].is_string()) bad("domain.phi", "expected an expression string");
    s.phi = expression(j["phi"].get<std::string>(), "domain.phi", s.dim);
  }
  if (j.contains("boundary_band")) {
    s.boundary_band = number(j["boundary_band"], "domain.boundary_band");
    if (!(s.boundary_band > 0.0)) bad("domain.boundary_band", "must be positive");
  }
}

void parse_points(const json& j, SceneConfig& s) {
  only_keys(j, "points", {"p", "q", "x", "y", "radius"});
  if (j.contains("p")) s.p = vector_of(j["p"], "points.p", s.dim);
  if (j.contains("q")) s.q = vector_of(j["q"], "points.q", s.dim);
  if (j.contains("x")) s.x = vector_of(j["x"], "points.x", s.dim);
  if (j.contains("y")) s.y = vector_of(j["y"], "points.y", s.dim);
  if (j.contains("radius")) s.radius = number(j["radius"], "points.radius");
}

void parse_solver(const json& j, SolverSettings& v) {
  only_keys(j, "solver",
            {"N", "eps0", "eps_ratio", "eps_count", "tol_grad", "max_iterations", "memory",
             "lambda_growth", "residual_factor", "delta_ratio", "seed", "samples", "directions",
             "radii", "horizon", "step", "classes", "A"});
  auto num = [&](const char* k, double& out) {
    if (j.contains(k)) out = number(j[k], std::string("solver.") + k);
  };
  auto integral = [&](const char* k, int& out) {
    if (j.contains(k)) out = integer(j[k], std::string("solver.") + k);
  };
  integral("N", v.N);
  num("eps0", v.eps0);
  num("eps_ratio", v.eps_ratio);
  integral("eps_count", v.eps_count);
  num("tol_grad", v.tol_grad);
  integral("max_iterations", v.max_iterations);
  integral("memory", v.memory);
  num("lambda_growth", v.lambda_growth);
  num("residual_factor", v.residual_factor);
  num("delta_ratio", v.delta_ratio);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("solver.seed", "expected a non-negative integer");
    v.seed = j["seed"].get<std::uint64_t>();
  }
  integral("samples", v.samples);
  integral("directions", v.directions);
  if (j.contains("radii")) {
    if (!j["radii"].is_array() || j["radii"].empty()) bad("solver.radii", "expected a non-empty array");
    v.radii.clear();
    for (const auto& r : j["radii"]) v.radii.push_back(number(r, "solver.radii"));
  }
  num("horizon", v.horizon);
  num("step", v.step);
  integral("classes", v.classes);
  num("A", v.A);
}

}  // namespace

void validate_scene(const SceneConfig& s) {
  const auto& v = s.solver;
  if (v.N < 4) bad("solver.N", "must be >= 4");
  if (!(v.eps0 > 0.0 && v.eps0 <= 1.0)) bad("solver.eps0", "must lie in (0, 1]");
  if (!(v.eps_ratio > 0.0 && v.eps_ratio < 1.0)) bad("solver.eps_ratio", "must lie in (0, 1)");
  if (v.eps_count < 1) bad("solver.eps_count", "must be >= 1");
  if (!(v.tol_grad > 0.0)) bad("solver.tol_grad", "must be positive");
  if (v.max_iterations < 0) bad("solver.max_iterations", "must be >= 0");
  if (v.memory < 1) bad("solver.memory", "must be >= 1");
  if (!(v.lambda_growth > 1.0)) bad("solver.lambda_growth", "must exceed 1");
  if (!(v.residual_factor > 0.0)) bad("solver.residual_factor", "must be positive");
  if (!(v.delta_ratio > 0.0 && v.delta_ratio <= 1.0)) bad("solver.delta_ratio", "must lie in (0, 1]");
  if (v.samples < 1) bad("solver.samples", "must be >= 1");
  if (v.directions < 1) bad("solver.directions", "must be >= 1");
  for (double r : v.radii)
    if (!(r > 0.0)) bad("solver.radii", "radii must be positive");
  if (!(v.horizon > 0.0)) bad("solver.horizon", "must be positive");
  if (!(v.step > 0.0 && v.step <= v.horizon)) bad("solver.step", "must lie in (0, horizon]");
  if (v.classes < 1) bad("solver.classes", "must be >= 1");
  if (!(v.A > 0.0)) bad("solver.A", "must be positive");
  if (s.radius && !(*s.radius > 0.0)) bad("points.radius", "must be positive");
}

Chart SceneConfig::chart() const {
  Chart c(dim);
  for (int k = 0; k < dim; ++k) {
    if (periods[k]) c.set_period(k, *periods[k]);
    if (bounds[k]) c.set_bounds(k, bounds[k]->lo, bounds[k]->hi);
  }
  return c;
}

FinslerMetric SceneConfig::metric() const {
  const int n = dim;
  MatrixField af;
  if (all_constant(*this)) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m(i, k) = *a[i][k].constant;
    af = MatrixField::constant(m);
  } else {
    auto rows = a;
    af.value = [rows, n](const Vec& x) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = rows[i][k](x);
      return m;
    };
  }
  auto build = [&]() {
    if (metric_kind != "randers") return FinslerMetric::riemannian(chart(), af, fd_step);
    CovectorField bf;
    if (all_constant(*this)) {
      Vec v(n);
      for (int k = 0; k < n; ++k) v[k] = *b[k].constant;
      bf = CovectorField::constant(v);
    } else {
      auto coeffs = b;
      bf.value = [coeffs, n](const Vec& x) {
        Vec v(n);
        for (int k = 0; k < n; ++k) v[k] = coeffs[k](x);
        return v;
      };
    }
    return FinslerMetric::randers(chart(), af, bf, {}, fd_step);
  };
  const FinslerMetric m = build();
  return reversed ? reversed_metric(m) : m;
}

Domain SceneConfig::domain() const {
  if (!phi) return Domain::full_chart(chart());
  const FieldExpression f = *phi;
  return Domain(chart(), BoundaryFunction([f](const Vec& x) { return f(x); }), boundary_band);
}

PenaltySchedule SceneConfig::schedule() const {
  return PenaltySchedule::geometric(solver.eps0, solver.eps_ratio, solver.eps_count);
}

ConnectorOptions SceneConfig::connector_options() const {
  ConnectorOptions o;
  o.N = solver.N;
  o.minimize.tol_grad = solver.tol_grad;
  o.minimize.max_iterations = solver.max_iterations;
  o.minimize.memory = solver.memory;
  o.lambda_growth = solver.lambda_growth;
  o.residual_factor = solver.residual_factor;
  o.delta_ratio = solver.delta_ratio;
  return o;
}

DistanceBudget SceneConfig::distance_budget() const {
  DistanceBudget b;
  const auto o = connector_options();
  b.N = o.N;
  b.schedule = schedule();
  b.minimize = o.minimize;
  b.residual_factor = o.residual_factor;
  return b;
}

std::string SceneConfig::resolved_json() const {
  json j;
  json periods_j = json::array(), bounds_j = json::array();
  for (int k = 0; k < dim; ++k) {
    periods_j.push_back(periods[k] ? json(*periods[k]) : json(nullptr));
    if (!bounds[k]) {
      bounds_j.push_back(nullptr);
    } else {
      const auto& iv = *bounds[k];
      bounds_j.push_back(json::array({std::isfinite(iv.lo) ? json(iv.lo) : json(nullptr),
                                      std::isfinite(iv.hi) ? json(iv.hi) : json(nullptr)}));
    }
  }
  j["chart"] = {{"dim", dim}, {"periods", periods_j}, {"bounds", bounds_j}};

  json a_j = json::array();
  for (const auto& row : a) {
    json r = json::array();
    for (const auto& c : row) r.push_back(coefficient_json(c));
    a_j.push_back(r);
  }
  json metric_j = {{"kind", metric_kind}, {"reversed", reversed}, {"fd_step", fd_step}};
  if (metric_kind != "euclidean") metric_j["a"] = a_j;
  if (!b.empty()) {
    json b_j = json::array();
    for (const auto& c : b) b_j.push_back(coefficient_json(c));
    metric_j["b"] = b_j;
  }
  j["metric"] = metric_j;
  j["domain"] = {{"phi", phi ? json(phi->source()) : json(nullptr)}, {"boundary_band", boundary_band}};

  json points_j = json::object();
  if (p) points_j["p"] = vec_json(*p);
  if (q) points_j["q"] = vec_json(*q);
  if (x) points_j["x"] = vec_json(*x);
  if (y) points_j["y"] = vec_json(*y);
  if (radius) points_j["radius"] = *radius;
  j["points"] = points_j;

  const auto& v = solver;
  j["solver"] = {{"N", v.N},
                 {"eps0", v.eps0},
                 {"eps_ratio", v.eps_ratio},
                 {"eps_count", v.eps_count},
                 {"tol_grad", v.tol_grad},
                 {"max_iterations", v.max_iterations},
                 {"memory", v.memory},
                 {"lambda_growth", v.lambda_growth},
                 {"residual_factor", v.residual_factor},
                 {"delta_ratio", v.delta_ratio},
                 {"seed", v.seed},
                 {"samples", v.samples},
                 {"directions", v.directions},
                 {"radii", v.radii},
                 {"horizon", v.horizon},
                 {"step", v.step},
                 {"classes", v.classes},
                 {"A", v.A}};
  return j.dump();
}

SceneConfig parse_scene(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scene is not valid JSON: ") + e.what());
  }
  only_keys(j, "scene", {"chart", "metric", "domain", "points", "solver"});
  SceneConfig s;
  parse_chart(j.contains("chart") ? j["chart"] : json::object(), s);
  parse_metric(j.contains("metric") ? j["metric"] : json::object(), s);
  if (j.contains("domain") && !j["domain"].is_null()) parse_domain(j["domain"], s);
  if (j.contains("points")) parse_points(j["points"], s);
  if (j.contains("solver")) parse_solver(j["solver"], s.solver);
  validate_scene(s);
  try {
    (void)s.metric();
  } catch (const Error& e) {
    throw ConfigError(std::string("metric: ") + e.what());
  }
  return s;
}

SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scene file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scene(os.str());
}

}  // namespace finsler

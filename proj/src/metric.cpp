#include "finsler/metric.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace finsler {

MatrixField MatrixField::constant(Mat a) {
  MatrixField f;
  f.value = [a](const Vec&) { return a; };
  const auto n = a.rows();
  f.derivatives = [n](const Vec& x) {
    return std::vector<Mat>(static_cast<std::size_t>(x.size()), Mat::Zero(n, n));
  };
  return f;
}

CovectorField CovectorField::constant(Vec b) {
  CovectorField f;
  f.value = [b](const Vec&) { return b; };
  const auto n = b.size();
  f.derivatives = [n](const Vec&) { return Mat::Zero(n, n).eval(); };
  return f;
}

double FundamentalTensor::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> solver(g, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

namespace detail {

class MetricModel {
 public:
  MetricModel(Chart chart, double fd_step) : chart_(std::move(chart)), fd_step_(fd_step) {
    if (!(fd_step > 0.0)) throw Error(ErrorKind::invalid_argument, "fd_step must be positive");
  }
  virtual ~MetricModel() = default;

  virtual MetricKind kind() const = 0;
  virtual bool analytic() const = 0;
  virtual const FinslerMetric* inner() const { return nullptr; }

  // All of these receive a canonical, valid x. Derivative routines receive y != 0.
  virtual double F(const Vec& x, const Vec& y) const = 0;
  virtual EnergyDerivatives energy(const Vec& x, const Vec& y) const = 0;
  virtual Mat tensor(const Vec& x, const Vec& y) const = 0;
  virtual Vec mixed(const Vec& x, const Vec& y) const = 0;

  const Chart& chart() const { return chart_; }
  double fd_step() const { return fd_step_; }

 protected:
  double x_step(const Vec& x, int k) const { return fd_step_ * std::max(1.0, std::abs(x[k])); }

  Chart chart_;
  double fd_step_;
};

namespace {

Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

class RiemannianModel final : public MetricModel {
 public:
  RiemannianModel(Chart chart, MatrixField a, double fd_step)
      : MetricModel(std::move(chart), fd_step), a_(std::move(a)) {
    if (!a_.value) throw Error(ErrorKind::invalid_argument, "riemannian metric needs a matrix field");
  }

  MetricKind kind() const override { return MetricKind::riemannian; }
  bool analytic() const override { return true; }

  double F(const Vec& x, const Vec& y) const override {
    const double q = y.dot(a(x) * y);
    return std::sqrt(std::max(q, 0.0));
  }

  EnergyDerivatives energy(const Vec& x, const Vec& y) const override {
    const Mat ax = a(x);
    const auto da = derivatives(x);
    EnergyDerivatives e;
    e.G = y.dot(ax * y);
    e.dy = 2.0 * (ax * y);
    e.dx.resize(x.size());
    for (int k = 0; k < x.size(); ++k) e.dx[k] = y.dot(da[k] * y);
    return e;
  }

  Mat tensor(const Vec& x, const Vec&) const override { return a(x); }

  Vec mixed(const Vec& x, const Vec& y) const override {
    const auto da = derivatives(x);
    Vec m = Vec::Zero(x.size());
    for (int k = 0; k < x.size(); ++k) m += 2.0 * y[k] * (da[k] * y);
    return m;
  }

 private:
  Mat a(const Vec& x) const { return symmetrized(a_.value(x)); }

  std::vector<Mat> derivatives(const Vec& x) const {
    if (a_.derivatives) {
      auto d = a_.derivatives(x);
      for (auto& m : d) m = symmetrized(m);
      return d;
    }
    std::vector<Mat> d(static_cast<std::size_t>(x.size()));
    for (int k = 0; k < x.size(); ++k) {
      const double h = x_step(x, k);
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      d[k] = symmetrized(a_.value(xp) - a_.value(xm)) / (2.0 * h);
    }
    return d;
  }

  MatrixField a_;
};

// Randers metric F = alpha + beta, alpha = sqrt(a(y,y)), beta = b(y). The
// y-derivatives are closed-form; x-derivatives of a and b come from the fields
// or from central differences.
class RandersModel final : public MetricModel {
 public:
  RandersModel(Chart chart, MatrixField a, CovectorField b, double fd_step)
      : MetricModel(std::move(chart), fd_step), a_(std::move(a)), b_(std::move(b)) {
    if (!a_.value || !b_.value)
      throw Error(ErrorKind::invalid_argument, "randers metric needs matrix and covector fields");
  }

  MetricKind kind() const override { return MetricKind::randers; }
  bool analytic() const override { return true; }

  double F(const Vec& x, const Vec& y) const override {
    const Mat a = symmetrized(a_.value(x));
    const double alpha = std::sqrt(std::max(y.dot(a * y), 0.0));
    return alpha + b_.value(x).dot(y);
  }

  EnergyDerivatives energy(const Vec& x, const Vec& y) const override {
    const Parts p = parts(x, y);
    const auto da = a_derivatives(x);
    const Mat db = b_jacobian(x);
    EnergyDerivatives e;
    e.G = p.F * p.F;
    e.dy = 2.0 * p.F * (p.l + p.b);
    e.dx.resize(x.size());
    for (int k = 0; k < x.size(); ++k)
      e.dx[k] = 2.0 * p.F * (y.dot(da[k] * y) / (2.0 * p.alpha) + db.col(k).dot(y));
    return e;
  }

  // g = (F/alpha)(a - l l^T) + (l + b)(l + b)^T with l = a y / alpha.
  Mat tensor(const Vec& x, const Vec& y) const override {
    const Parts p = parts(x, y);
    const Vec w = p.l + p.b;
    return (p.F / p.alpha) * (p.a - p.l * p.l.transpose()) + w * w.transpose();
  }

  Vec mixed(const Vec& x, const Vec& y) const override {
    const Parts p = parts(x, y);
    const auto da = a_derivatives(x);
    Mat abar = Mat::Zero(x.size(), x.size());
    for (int k = 0; k < x.size(); ++k) abar += y[k] * da[k];
    const Vec bbar = b_jacobian(x) * y;
    const double q = y.dot(abar * y);
    const double Fdot = q / (2.0 * p.alpha) + bbar.dot(y);
    const Vec ldot = abar * y / p.alpha - p.l * (q / (2.0 * p.alpha * p.alpha));
    return 2.0 * Fdot * (p.l + p.b) + 2.0 * p.F * (ldot + bbar);
  }

  // |b|_a at x, or +inf when a(x) is not positive definite.
  double b_norm(const Vec& x) const {
    const Mat a = symmetrized(a_.value(x));
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Vec b = b_.value(x);
    return std::sqrt(b.dot(llt.solve(b)));
  }

 private:
  struct Parts {
    Mat a;
    Vec b;
    Vec l;
    double alpha;
    double F;
  };

  Parts parts(const Vec& x, const Vec& y) const {
    Parts p;
    p.a = symmetrized(a_.value(x));
    p.b = b_.value(x);
    p.alpha = std::sqrt(std::max(y.dot(p.a * y), 0.0));
    p.l = p.a * y / p.alpha;
    p.F = p.alpha + p.b.dot(y);
    return p;
  }

  std::vector<Mat> a_derivatives(const Vec& x) const {
    if (a_.derivatives) {
      auto d = a_.derivatives(x);
      for (auto& m : d) m = symmetrized(m);
      return d;
    }
    std::vector<Mat> d(static_cast<std::size_t>(x.size()));
    for (int k = 0; k < x.size(); ++k) {
      const double h = x_step(x, k);
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      d[k] = symmetrized(a_.value(xp) - a_.value(xm)) / (2.0 * h);
    }
    return d;
  }

  // Column k holds db/dx^k.
  Mat b_jacobian(const Vec& x) const {
    if (b_.derivatives) return b_.derivatives(x);
    Mat j(x.size(), x.size());
    for (int k = 0; k < x.size(); ++k) {
      const double h = x_step(x, k);
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      j.col(k) = (b_.value(xp) - b_.value(xm)) / (2.0 * h);
    }
    return j;
  }

  MatrixField a_;
  CovectorField b_;
};

class ReversedModel final : public MetricModel {
 public:
  explicit ReversedModel(FinslerMetric inner)
      : MetricModel(inner.chart(), inner.fd_step()), inner_(std::move(inner)) {}

  MetricKind kind() const override { return MetricKind::reversed; }
  bool analytic() const override { return inner_.analytic(); }
  const FinslerMetric* inner() const override { return &inner_; }

  double F(const Vec& x, const Vec& y) const override { return inner_.F(x, -y); }

  EnergyDerivatives energy(const Vec& x, const Vec& y) const override {
    EnergyDerivatives e = inner_.energy_derivatives(x, -y);
    e.dy = -e.dy;
    return e;
  }

  Mat tensor(const Vec& x, const Vec& y) const override {
    return inner_.fundamental_tensor(x, -y).g;
  }

  Vec mixed(const Vec& x, const Vec& y) const override { return inner_.mixed_contraction(x, -y); }

 private:
  FinslerMetric inner_;
};

void check_positive_definite(const Mat& a, const Vec& x) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "metric tensor not positive definite at x = (" << x.transpose() << ")";
    throw Error(ErrorKind::convexity_violation, os.str());
  }
}

}  // namespace
}  // namespace detail

FinslerMetric::FinslerMetric(std::shared_ptr<const detail::MetricModel> model)
    : model_(std::move(model)) {}

FinslerMetric FinslerMetric::riemannian(Chart chart, MatrixField a, double fd_step) {
  const auto probes = sample_chart_points(chart, 16, 0x5eed);
  for (const auto& x : probes) {
    if (a.value(x).rows() != chart.dim() || a.value(x).cols() != chart.dim())
      throw Error(ErrorKind::invalid_argument, "matrix field has wrong shape");
    detail::check_positive_definite(0.5 * (a.value(x) + a.value(x).transpose()), x);
  }
  return FinslerMetric(std::make_shared<detail::RiemannianModel>(std::move(chart), std::move(a), fd_step));
}

FinslerMetric FinslerMetric::randers(Chart chart, MatrixField a, CovectorField b,
                                     std::span<const Vec> probes, double fd_step) {
  auto model = std::make_shared<detail::RandersModel>(chart, std::move(a), std::move(b), fd_step);
  std::vector<Vec> points(probes.begin(), probes.end());
  if (points.empty()) points = sample_chart_points(chart, 64, 0x5eed);
  for (const auto& x : points) {
    const Vec xc = chart.canonical(x);
    const double norm = model->b_norm(xc);
    if (!(norm < 1.0)) {
      std::ostringstream os;
      os << "randers positivity violation: |b|_a = " << norm << " >= 1 at x = (" << xc.transpose()
         << ")";
      throw Error(ErrorKind::randers_positivity, os.str());
    }
  }
  return FinslerMetric(std::move(model));
}

MetricKind FinslerMetric::kind() const { return model_->kind(); }
const Chart& FinslerMetric::chart() const { return model_->chart(); }
double FinslerMetric::fd_step() const { return model_->fd_step(); }
bool FinslerMetric::analytic() const { return model_->analytic(); }
const FinslerMetric* FinslerMetric::inner() const { return model_->inner(); }

namespace {

Vec prepare_point(const Chart& chart, const Vec& x) {
  chart.require_valid(x);
  return chart.canonical(x);
}

void require_nonzero(const Vec& y) {
  if (y.isZero(0.0))
    throw Error(ErrorKind::zero_section,
                "zero-section derivative: G is not differentiable at y = 0");
}

}  // namespace

double FinslerMetric::F(const Vec& x, const Vec& y) const {
  const Vec xc = prepare_point(chart(), x);
  if (y.isZero(0.0)) return 0.0;
  return model_->F(xc, y);
}

double FinslerMetric::G(const Vec& x, const Vec& y) const {
  const double f = F(x, y);
  return f * f;
}

EnergyDerivatives FinslerMetric::energy_derivatives(const Vec& x, const Vec& y) const {
  const Vec xc = prepare_point(chart(), x);
  require_nonzero(y);
  return model_->energy(xc, y);
}

FundamentalTensor FinslerMetric::fundamental_tensor(const Vec& x, const Vec& y) const {
  const Vec xc = prepare_point(chart(), x);
  require_nonzero(y);
  FundamentalTensor t{detail::symmetrized(model_->tensor(xc, y))};
  Eigen::LLT<Mat> llt(t.g);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "convexity violation: fundamental tensor not positive definite at x = ("
       << xc.transpose() << "), y = (" << y.transpose() << ")";
    throw Error(ErrorKind::convexity_violation, os.str());
  }
  return t;
}

Vec FinslerMetric::mixed_contraction(const Vec& x, const Vec& y) const {
  const Vec xc = prepare_point(chart(), x);
  require_nonzero(y);
  return model_->mixed(xc, y);
}

double eval_F(const FinslerMetric& metric, const TangentVector& v) { return metric.F(v.x, v.y); }

EnergyDerivatives energy_G(const FinslerMetric& metric, const TangentVector& v) {
  return metric.energy_derivatives(v.x, v.y);
}

FundamentalTensor fundamental_tensor(const FinslerMetric& metric, const TangentVector& v) {
  return metric.fundamental_tensor(v.x, v.y);
}

FinslerMetric reversed_metric(const FinslerMetric& metric) {
  if (const FinslerMetric* inner = metric.inner()) return *inner;
  return FinslerMetric(std::make_shared<detail::ReversedModel>(metric));
}

std::vector<Vec> sample_chart_points(const Chart& chart, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Vec x(chart.dim());
    for (int k = 0; k < chart.dim(); ++k) {
      const double r = unit(rng);
      if (chart.is_periodic(k)) {
        x[k] = r * chart.period(k);
      } else if (const auto& b = chart.bounds(k)) {
        const bool lo_finite = std::isfinite(b->lo);
        const bool hi_finite = std::isfinite(b->hi);
        if (lo_finite && hi_finite) {
          const double w = b->hi - b->lo;
          x[k] = b->lo + w * (0.05 + 0.9 * r);
        } else if (lo_finite) {
          x[k] = b->lo + 0.1 + 2.0 * r;
        } else if (hi_finite) {
          x[k] = b->hi - 0.1 - 2.0 * r;
        } else {
          x[k] = -1.0 + 2.0 * r;
        }
      } else {
        x[k] = -1.0 + 2.0 * r;
      }
    }
    out.push_back(chart.canonical(x));
  }
  return out;
}

AuditReport axiom_audit(const FinslerMetric& metric, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw Error(ErrorKind::invalid_argument, "sample_count must be >= 1");
  const Chart& chart = metric.chart();
  const auto points = sample_chart_points(chart, sample_count, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));

  AuditReport r;
  r.tolerance = metric.analytic() ? 1e-6 : 1e-4;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  constexpr double lambdas[] = {0.5, 2.0, 10.0};

  for (const auto& x : points) {
    Vec y(chart.dim());
    for (int k = 0; k < y.size(); ++k) y[k] = normal(rng);
    if (y.norm() == 0.0) y[0] = 1.0;
    y *= std::exp(log_scale(rng)) / y.norm();
    try {
      const double f = metric.F(x, y);
      for (double l : lambdas) {
        const double fl = metric.F(x, l * y);
        r.homogeneity_residual = std::max(r.homogeneity_residual, std::abs(fl - l * f) / fl);
      }
      const auto e = metric.energy_derivatives(x, y);
      r.euler_residual =
          std::max(r.euler_residual, std::abs(e.dy.dot(y) - 2.0 * e.G) / std::max(1.0, e.G));
      const auto t = metric.fundamental_tensor(x, y);
      r.tensor_residual = std::max(r.tensor_residual, std::abs(y.dot(t.g * y) - f * f) / (f * f));
      r.min_eigenvalue = std::min(r.min_eigenvalue, t.min_eigenvalue());
      ++r.samples;
    } catch (const Error&) {
      ++r.skipped;
    }
  }
  r.passed = r.samples > 0 && r.homogeneity_residual < r.tolerance &&
             r.euler_residual < r.tolerance && r.tensor_residual < r.tolerance &&
             r.min_eigenvalue > 0.0;
  return r;
}

}  // namespace finsler

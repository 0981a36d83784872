#include "finsler/chart.hpp"

#include <cmath>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_point: return "invalid_point";
    case ErrorKind::zero_section: return "zero_section";
    case ErrorKind::convexity_violation: return "convexity_violation";
    case ErrorKind::randers_positivity: return "randers_positivity";
    case ErrorKind::left_chart: return "left_chart";
    case ErrorKind::left_domain: return "left_domain";
    case ErrorKind::not_on_boundary: return "not_on_boundary";
    case ErrorKind::non_tangent: return "non_tangent";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::orientation: return "orientation";
    case ErrorKind::degenerate_path: return "degenerate_path";
    case ErrorKind::degenerate_segment: return "degenerate_segment";
    case ErrorKind::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

Chart::Chart(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::invalid_argument, "chart dimension must be >= 1");
  periods_.resize(dim);
  bounds_.resize(dim);
}

Chart& Chart::set_period(int k, double period) {
  if (k < 0 || k >= dim_) throw Error(ErrorKind::invalid_argument, "period index out of range");
  if (!(period > 0.0) || !std::isfinite(period))
    throw Error(ErrorKind::invalid_argument, "period must be a positive finite number");
  periods_[k] = period;
  bounds_[k].reset();
  return *this;
}

Chart& Chart::set_bounds(int k, double lo, double hi) {
  if (k < 0 || k >= dim_) throw Error(ErrorKind::invalid_argument, "bounds index out of range");
  if (!(lo < hi)) throw Error(ErrorKind::invalid_argument, "bounds must satisfy lo < hi");
  if (periods_[k]) throw Error(ErrorKind::invalid_argument, "periodic coordinate cannot be bounded");
  bounds_[k] = Interval{lo, hi};
  return *this;
}

bool Chart::has_periodic() const { return first_periodic().has_value(); }

std::optional<int> Chart::first_periodic() const {
  for (int k = 0; k < dim_; ++k)
    if (periods_[k]) return k;
  return std::nullopt;
}

bool Chart::valid(const Vec& x) const {
  if (x.size() != dim_) return false;
  for (int k = 0; k < dim_; ++k) {
    if (!std::isfinite(x[k])) return false;
    if (bounds_[k] && !bounds_[k]->contains(x[k])) return false;
  }
  return true;
}

void Chart::require_valid(const Vec& x) const {
  if (valid(x)) return;
  std::ostringstream os;
  os << "point outside chart: (";
  for (int k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ")";
  throw Error(ErrorKind::invalid_point, os.str());
}

Vec Chart::canonical(const Vec& x) const {
  Vec out = x;
  for (int k = 0; k < dim_; ++k) {
    if (!periods_[k]) continue;
    const double p = *periods_[k];
    double v = std::fmod(out[k], p);
    if (v < 0.0) v += p;
    if (v >= p) v = 0.0;
    out[k] = v;
  }
  return out;
}

Vec Chart::difference(const Vec& from, const Vec& to) const {
  Vec d = to - from;
  for (int k = 0; k < dim_; ++k) {
    if (!periods_[k]) continue;
    const double p = *periods_[k];
    d[k] -= p * std::round(d[k] / p);
  }
  return d;
}

}  // namespace finsler

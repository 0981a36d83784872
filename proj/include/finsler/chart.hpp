#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace finsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v > lo && v < hi; }
};

// A single coordinate chart. Periodic coordinates model cylinders and tori;
// non-periodic coordinates may be restricted to an open interval.
class Chart {
 public:
  explicit Chart(int dim);

  Chart& set_period(int k, double period);
  Chart& set_bounds(int k, double lo, double hi);

  int dim() const { return dim_; }
  bool is_periodic(int k) const { return periods_[k].has_value(); }
  double period(int k) const { return periods_[k].value(); }
  bool has_periodic() const;
  std::optional<int> first_periodic() const;
  const std::optional<Interval>& bounds(int k) const { return bounds_[k]; }

  bool valid(const Vec& x) const;
  void require_valid(const Vec& x) const;

  // Periodic coordinates wrapped into [0, period).
  Vec canonical(const Vec& x) const;

  // Displacement from `from` to `to`, using the minimal image for periodic
  // coordinates.
  Vec difference(const Vec& from, const Vec& to) const;

  Vec translate(const Vec& x, const Vec& d) const { return canonical(x + d); }

 private:
  int dim_;
  std::vector<std::optional<double>> periods_;
  std::vector<std::optional<Interval>> bounds_;
};

}  // namespace finsler

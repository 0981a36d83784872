#include "finsler/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr std::array<std::uint64_t, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                                   41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

}  // namespace

std::vector<Vec> sphere_sequence(int k, int count, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "sphere dimension must be >= 1");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < count; ++i) {
    Vec v(k);
    if (k == 1) {
      v[0] = ((static_cast<std::uint64_t>(i) + seed) % 2 == 0) ? 1.0 : -1.0;
    } else if (k == 2) {
      const double offset = std::fmod(static_cast<double>(seed % 1000003) * std::numbers::sqrt2, 1.0);
      const double t = std::fmod(offset + golden * static_cast<double>(i), 1.0);
      const double theta = 2.0 * std::numbers::pi * t;
      v << std::cos(theta), std::sin(theta);
    } else {
      if (k > static_cast<int>(kPrimes.size()))
        throw Error(ErrorKind::invalid_argument, "sphere_sequence supports k <= 24");
      const std::uint64_t index = static_cast<std::uint64_t>(i) + 1 + (seed % 100003) * 7919;
      for (int j = 0; j < k; j += 2) {
        const double u1 = std::max(radical_inverse(index, kPrimes[j]), 1e-300);
        const double u2 = (j + 1 < k) ? radical_inverse(index, kPrimes[j + 1]) : 0.25;
        const double r = std::sqrt(-2.0 * std::log(u1));
        v[j] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (j + 1 < k) v[j + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
      }
      if (v.norm() == 0.0) v[0] = 1.0;
      v.normalize();
    }
    out.push_back(v);
  }
  return out;
}

Mat orthogonal_complement(const Vec& normal) {
  const auto n = normal.size();
  if (normal.norm() == 0.0) throw Error(ErrorKind::invalid_argument, "zero normal vector");
  const Mat column = normal;
  Eigen::HouseholderQR<Mat> qr(column);
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - 1);
}

}  // namespace finsler

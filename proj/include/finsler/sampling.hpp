#pragma once

#include <cstdint>
#include <vector>

#include "finsler/chart.hpp"

namespace finsler {

/// Low-discrepancy points on the unit sphere S^{k-1} in R^k, deterministic in
/// `seed`: alternating signs for k = 1, a golden-angle sequence for k = 2, and
/// a Halton sequence pushed through Box-Muller for k >= 3.
std::vector<Vec> sphere_sequence(int k, int count, std::uint64_t seed);

/// Orthonormal basis (as columns) of the Euclidean complement of `normal`.
Mat orthogonal_complement(const Vec& normal);

}  // namespace finsler

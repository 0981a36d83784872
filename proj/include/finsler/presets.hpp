#pragma once

#include "finsler/domain.hpp"
#include "finsler/metric.hpp"

// Ready-made metrics and domains on the plane. They back the test suites and
// the built-in scenes.
namespace finsler::presets {

Chart plane();
// x1 periodic with period 2*pi, x2 free.
Chart flat_cylinder();
// x2 restricted to (0, inf).
Chart upper_half_plane();

FinslerMetric euclidean(int dim = 2);
FinslerMetric euclidean_on(Chart chart);
// a(x) = I / x2^2 with exact x-derivatives.
FinslerMetric hyperbolic_half_plane();
// F = |y| + b.y on the given chart.
FinslerMetric constant_randers(Chart chart, Vec b);

// phi = 1 - |x|^2 / r^2.
Domain disk(Chart chart, double radius = 1.0);
// phi = x2 - level.
Domain half_plane(Chart chart, double level = 0.0);
// phi = (|x|^2 - r1^2)(r2^2 - |x|^2).
Domain annulus(Chart chart, double inner = 1.0, double outer = 2.0);
// phi = |x|^2 - r^2.
Domain exterior_disk(Chart chart, double radius = 1.0);

}  // namespace finsler::presets

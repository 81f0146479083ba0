#pragma once

// Geodesic distance fields on a chart: second-order fast marching for the
// isotropic eikonal |grad u| = lambda(x) (Euclidean and conformal charts),
// extended-stencil Dijkstra for grid-sampled metrics. Values live on a
// vertex lattice over the chart box and are queried by multilinear
// interpolation.

#include <functional>
#include <vector>

#include "modp/chart.hpp"

namespace modp {

struct DistanceField {
  Box box;
  int dim = 0;
  int resolution = 0;             // lattice nodes per axis
  std::vector<double> values;     // +inf where unreachable

  // Multilinear interpolation; throws domain_error for points outside the
  // box or supported by unreachable nodes.
  double at(const Vec& x) const;
};

// Distance from `source` to every lattice node. `blocked` (optional) marks
// chart points excluded from propagation; disconnected regions stay at +inf.
DistanceField compute_distance_field(
    const MetricChart& chart, const Vec& source, int resolution = 256,
    const std::function<bool(const Vec&)>& blocked = {});

double geodesic_distance(const Vec& x, const Vec& y, const MetricChart& chart,
                         int resolution = 256);

}  // namespace modp

#pragma once

// Uniform cell grid over a chart's coordinate box: per-cell metric volumes
// v_c = sqrt(det g(center)) * prod(h_a), cell lookup, and region volume by
// cell-center midpoint quadrature.

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "modp/chart.hpp"

namespace modp {

class GridDomain {
 public:
  GridDomain(MetricChart chart, int resolution);

  const MetricChart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  int resolution() const { return res_; }
  std::size_t cell_count() const { return volumes_->size(); }

  Vec cell_center(std::size_t idx) const;
  // Nearest cell for a point; coordinates clamped to the box first.
  std::size_t cell_index(const Vec& x) const;
  double cell_volume(std::size_t idx) const { return (*volumes_)[idx]; }
  const std::vector<double>& cell_volumes() const { return *volumes_; }

  double cell_edge(int axis) const { return edge_[axis]; }
  double min_cell_edge() const;
  // Chart-coordinate diagonal of one cell (the step guard unit for curves).
  double cell_diameter() const;

  double total_volume() const;
  // Sum of v_c over cells whose center satisfies the predicate.
  double region_volume(const std::function<bool(const Vec&)>& region) const;

 private:
  MetricChart chart_;
  int res_;
  double edge_[kMaxDim];
  std::shared_ptr<const std::vector<double>> volumes_;
};

inline double volume(const std::function<bool(const Vec&)>& region,
                     const GridDomain& grid) {
  return grid.region_volume(region);
}

}  // namespace modp

#include "modp/grid.hpp"

#include <cmath>

namespace modp {

GridDomain::GridDomain(MetricChart chart, int resolution)
    : chart_(std::move(chart)), res_(resolution) {
  if (res_ < 2) throw domain_error("grid: resolution must be >= 2");
  const Box& box = chart_.domain();
  const int n = chart_.dim();
  std::size_t count = 1;
  double cell_vol_chart = 1.0;
  for (int a = 0; a < n; ++a) {
    edge_[a] = (box.hi[a] - box.lo[a]) / res_;
    cell_vol_chart *= edge_[a];
    count *= static_cast<std::size_t>(res_);
  }
  auto vols = std::make_shared<std::vector<double>>(count);
  Vec x(n);
  std::size_t idx_parts[kMaxDim] = {0};
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (int a = n - 1; a >= 0; --a) {
      idx_parts[a] = rest % res_;
      rest /= res_;
    }
    for (int a = 0; a < n; ++a)
      x[a] = box.lo[a] + (idx_parts[a] + 0.5) * edge_[a];
    (*vols)[idx] = chart_.sqrt_det_at(x) * cell_vol_chart;
  }
  volumes_ = std::move(vols);
}

Vec GridDomain::cell_center(std::size_t idx) const {
  const int n = dim();
  const Box& box = chart_.domain();
  Vec x(n);
  std::size_t rest = idx;
  for (int a = n - 1; a >= 0; --a) {
    x[a] = box.lo[a] + (rest % res_ + 0.5) * edge_[a];
    rest /= res_;
  }
  return x;
}

std::size_t GridDomain::cell_index(const Vec& x) const {
  const int n = dim();
  const Box& box = chart_.domain();
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a) {
    int i = static_cast<int>(std::floor((x[a] - box.lo[a]) / edge_[a]));
    if (i < 0) i = 0;
    if (i >= res_) i = res_ - 1;
    idx = idx * res_ + static_cast<std::size_t>(i);
  }
  return idx;
}

double GridDomain::min_cell_edge() const {
  double m = edge_[0];
  for (int a = 1; a < dim(); ++a) m = std::min(m, edge_[a]);
  return m;
}

double GridDomain::cell_diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) s += edge_[a] * edge_[a];
  return std::sqrt(s);
}

double GridDomain::total_volume() const { return pairwise_sum(*volumes_); }

double GridDomain::region_volume(
    const std::function<bool(const Vec&)>& region) const {
  std::vector<double> selected;
  selected.reserve(volumes_->size() / 4);
  for (std::size_t idx = 0; idx < volumes_->size(); ++idx)
    if (region(cell_center(idx))) selected.push_back((*volumes_)[idx]);
  return pairwise_sum(selected);
}

}  // namespace modp

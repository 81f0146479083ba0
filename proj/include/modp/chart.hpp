#pragma once

// Riemannian chart primitives: the metric tensor field g_ij on an
// axis-aligned coordinate box, the induced length and volume elements,
// and metric polyline length.

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "modp/expr.hpp"
#include "modp/util.hpp"

namespace modp {

// Dimension cap for the fixed-capacity point/matrix types (no heap in hot
// loops). Raise if charts beyond R^4 are ever needed.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

Vec make_vec(std::initializer_list<double> xs);

struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x, double pad = 0.0) const;
  Vec clamp(const Vec& x) const;
  static Box cube(int dim, double half_width);  // [-h, h]^dim
};

enum class ChartKind { Euclidean, ConformalScalar, GeneralGrid };

// Cell-center samples of a metric tensor field, multilinearly interpolated.
// Binary file layout (16-byte header, little endian):
//   u64 magic = 0x3130474D50444F4DULL ("MODPMG01"), u32 dim, u32 resolution
// followed by resolution^dim * dim*(dim+1)/2 doubles, row-major over cells
// (last axis fastest), upper-triangular components per cell
// (g11, g12, ..., g1n, g22, ..., gnn).
struct MetricGridData {
  int dim = 0;
  int resolution = 0;
  std::vector<double> components;  // packed upper triangles

  static MetricGridData read(const std::string& path);
  void write(const std::string& path) const;
};

class MetricChart {
 public:
  static MetricChart euclidean(int dim, Box box);
  static MetricChart conformal(int dim, Box box, const std::string& lambda_expr,
                               double rmax);
  static MetricChart general_grid(Box box, MetricGridData data, double rmax);

  // Key-value config file, one `key = value` per line, '#' comments.
  // Keys: kind (euclidean|conformal|grid), dim, box_lo, box_hi,
  // lambda (conformal), metric_file (grid), rmax (optional).
  static MetricChart from_config(const std::string& path);

  int dim() const { return dim_; }
  ChartKind kind() const { return kind_; }
  const Box& domain() const { return box_; }
  double rmax() const { return rmax_; }  // normal-patch guard, +inf if unset

  // Symmetric positive-definite metric tensor at x.
  Mat metric_at(const Vec& x) const;
  // sqrt(det g(x)), the volume element.
  double sqrt_det_at(const Vec& x) const;
  // Metric norm of a tangent vector: sqrt(v' g(x) v).
  double length_element(const Vec& x, const Vec& v) const;
  // Conformal factor lambda(x); 1 for Euclidean charts, error for grid kind.
  double conformal_factor(const Vec& x) const;

  void require_inside(const Vec& x, const char* who) const;

 private:
  MetricChart() = default;

  int dim_ = 0;
  ChartKind kind_ = ChartKind::Euclidean;
  Box box_;
  double rmax_ = std::numeric_limits<double>::infinity();
  Expr lambda_;
  std::shared_ptr<const MetricGridData> grid_;

  Mat grid_metric_at(const Vec& x) const;
};

// Metric length of a polyline via midpoint evaluation of g per segment.
// Throws domain_error for fewer than 2 vertices or vertices off the chart.
double polyline_length(const std::vector<Vec>& vertices, const MetricChart& chart);

// Length of one straight segment a->b (midpoint rule).
double segment_length(const Vec& a, const Vec& b, const MetricChart& chart);

}  // namespace modp

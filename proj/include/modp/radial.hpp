#pragma once

// Geodesic polar machinery around a center point: arclength along chart
// rays, inversion radius -> chart parameter, quadrature over geodesic
// spheres S(x0,r), and annulus/ball integrals via the coarea split
// dv = dA dr. Straight chart rays from the center are treated as geodesics,
// which is exact on Euclidean charts and on conformal charts whose factor is
// radially symmetric about the center (normal-neighborhood setting); for
// other charts the gauge is the star-shaped radial approximation.

#include <functional>
#include <memory>
#include <vector>

#include "modp/chart.hpp"

namespace modp {

// Adaptive 1-D quadrature (Gauss–Kronrod). Uses a log substitution when the
// interval spans many octaves away from zero, so integrands concentrated
// near small radii (eps down to 1e-7 and below) keep full accuracy.
double integrate_1d(const std::function<double(double)>& f, double a, double b);

// Angular quadrature on the unit sphere S^{n-1}, n = 2 or 3. Nodes carry the
// angular parameters (angle u for n=2; (cos phi, psi) for n=3) so surface
// Jacobians can be formed by finite differences in the parameters.
struct SphereRule {
  int dim = 0;
  std::vector<Vec> params;   // size n-1 per node
  std::vector<Vec> dirs;     // unit directions, derived from params
  std::vector<double> weights;  // d(params) weights; total = omega_{n-1}
};
SphereRule make_sphere_rule(int n, int nodes_hint = 0);
Vec dir_from_params(int n, const Vec& u);

class RadialGauge {
 public:
  RadialGauge(MetricChart chart, Vec center);

  const MetricChart& chart() const { return chart_; }
  const Vec& center() const { return x0_; }

  // Metric arclength of the chart ray x0 + s*theta, s in [0, t].
  double arclength(const Vec& theta, double t) const;
  // Inverse of arclength in t: the chart parameter of geodesic radius r.
  // Throws domain_error when r reaches past the box along that ray.
  double chart_radius(const Vec& theta, double r) const;
  // Chart point at geodesic radius r in unit direction theta.
  Vec point_at(double r, const Vec& theta) const;
  // Geodesic radius of an arbitrary point (along the ray through it).
  double radius_of(const Vec& x) const;

  // Chart distance from the center to the box boundary along theta.
  double exit_t(const Vec& theta) const;

  // Largest geodesic radius fully inside the box, capped by the chart's
  // declared normal-patch guard rmax.
  double max_radius() const { return rmax_; }

  // ∫_{S(x0,r)} f dA with the metric surface element.
  double sphere_integral(const std::function<double(const Vec&)>& f, double r,
                         int nodes_hint = 0) const;
  // ∫_{r1<d(x,x0)<r2} f dv = ∫_{r1}^{r2} dr ∫_{S(r)} f dA.
  double annulus_integral(const std::function<double(const Vec&)>& f,
                          double r1, double r2, int nodes_hint = 0) const;
  double ball_integral(const std::function<double(const Vec&)>& f, double r,
                       int nodes_hint = 0) const;

  bool radially_symmetric() const { return mode_ != Mode::Generic; }

 private:
  enum class Mode { EuclideanExact, RadialConformal, Generic };

  double metric_speed(const Vec& theta, double s) const;
  double invert_radius(const Vec& theta, double r, double t_start) const;
  Mode detect_mode() const;
  void build_radial_table();
  double table_s_of_t(double t) const;
  double table_t_of_s(double r) const;

  MetricChart chart_;
  Vec x0_;
  Mode mode_;
  double rmax_ = 0.0;
  // Cumulative arclength table s(t) on the inscribed ball for radially
  // symmetric conformal factors; makes radius inversion O(log n).
  std::vector<double> tbl_t_, tbl_s_, tbl_f_;
};

// A geodesic annulus A(x0, r1, r2) whose closure sits inside the chart's
// normal patch; validates 0 < r1 < r2 <= gauge.max_radius().
struct GeodesicAnnulus {
  GeodesicAnnulus(MetricChart chart, Vec center, double r1, double r2);

  const RadialGauge& gauge() const { return *gauge_; }
  const MetricChart& chart() const { return gauge_->chart(); }

  Vec center;
  double r1, r2;

 private:
  std::shared_ptr<const RadialGauge> gauge_;
};

}  // namespace modp

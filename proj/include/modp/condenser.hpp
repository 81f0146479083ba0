#pragma once

// Condensers E = (A, C): an open geodesic ball A = B(x0, eps0) carrying the
// closed concentric ball C = B(x0, eps), 0 < eps < eps0. The p-capacity of E
// is the p-modulus of the family of curves escaping from C to the boundary
// of A; on our compact chart closures every escaping curve is truncated at
// the boundary sphere, so the family is sampled as the spherical-annulus
// family Gamma(S(x0,eps), S(x0,eps0)).
//
// check_capacity_bound verifies the capacity bound
//   cap_p f(E)  <=  F(eps, eps0) / I^p(eps, eps0),
// with I the psi integral and F the annulus integral of Q * psi^p, both
// computed here so the check is self-contained.

#include <cstdint>
#include <string>
#include <vector>

#include "modp/mapping.hpp"
#include "modp/modulus.hpp"
#include "modp/psi.hpp"
#include "modp/radial.hpp"

namespace modp {

class Condenser {
 public:
  // Validates 0 < eps < eps0 and that B(x0, eps0) closes inside the chart's
  // normal patch. The one-grid-cell gap between C and the boundary of A is
  // checked by capacity(), which knows the grid.
  Condenser(MetricChart chart, Vec x0, double eps, double eps0)
      : ring_(std::move(chart), std::move(x0), eps, eps0) {}

  const GeodesicAnnulus& ring() const { return ring_; }
  const MetricChart& chart() const { return ring_.chart(); }
  const RadialGauge& gauge() const { return ring_.gauge(); }
  const Vec& x0() const { return ring_.center; }
  double eps() const { return ring_.r1; }
  double eps0() const { return ring_.r2; }

 private:
  GeodesicAnnulus ring_;
};

// cap_p E by sampling `count` escaping curves and solving the modulus
// program on `grid`. Throws domain_error when the chart-coordinate gap
// between the two spheres is below one grid cell (the grid cannot separate
// C from the boundary) or when count < 1.
ModulusResult capacity(const Condenser& cond, double p, const GridDomain& grid,
                       int count, std::uint64_t seed,
                       const SolveOptions& opts = {});

struct CapacityBoundRow {
  double eps = 0.0;
  double I = 0.0;    // psi integral over (eps, eps0)
  double F = 0.0;    // annulus integral of Q * psi^p
  double rhs = 0.0;  // F / I^p
  double lhs = 0.0;  // solved capacity of the image condenser
  double rhs_alt = 0.0;  // F / I^n, the alternative normalization
  bool pass = false;
};

struct CapacityBoundReport {
  std::vector<CapacityBoundRow> rows;  // one per requested eps, in caller order
  double tol = 0.0;
  bool all_pass = false;
  bool degenerate_q = false;  // some RHS was exactly 0 (zero weight)
  // Trends along decreasing eps: the capacity bound is only informative
  // when the right-hand side does not blow up faster than the left.
  bool lhs_decreasing = false;
  bool ratio_p_decreasing = false;  // F / I^p trend
  bool ratio_n_decreasing = false;  // F / I^n trend

  // Columns: eps,I,F,RHS,LHS,pass
  void write_csv(const std::string& path) const;
};

struct CapacityBoundOptions {
  int count = 2048;
  std::uint64_t seed = 1;
  double tol = 0.02;
  int resolution = 256;  // target grid resolution for the capacity solves
  SolveOptions solve;
  std::string report_csv;  // empty = no file
};

// For each eps in eps_list: I = psi integral, F = annulus integral of
// Q * psi^p over eps < d(x, x0) < eps0, RHS = F / I^p, LHS = solved capacity
// of the pushforward of the escaping family under f. Passes when
// LHS <= RHS * (1 + tol); a zero RHS (degenerate weight) instead demands
// LHS <= tol and raises the degenerate_q flag.
CapacityBoundReport check_capacity_bound(const MappingSpec& f, const Condenser& cond,
                                const QField& Q, double p,
                                const PsiFamily& psi,
                                const std::vector<double>& eps_list,
                                const CapacityBoundOptions& opts = {});

}  // namespace modp

#pragma once

// Discrete p-modulus of a finite curve family on a cell grid:
//
//   minimize   sum_c v_c rho_c^p
//   subject to sum_c A_{jc} rho_c >= 1 for every curve j,   rho >= 0,
//
// where A_{jc} is the metric length curve j spends in cell c (shared
// sampling rule with line_integral). Solved through the concave dual
//
//   g(lambda) = sum_j lambda_j - (p-1) sum_c v_c rho_c(lambda)^p,
//   rho_c(lambda) = ((A' lambda)_c / (p v_c))^{1/(p-1)},  lambda >= 0,
//
// by diagonally preconditioned projected accelerated ascent, optionally
// polished by an active-set Newton solve (exact for p = 2). The returned
// density is rescaled to be exactly admissible, so `value` is a true upper
// bound of the discrete optimum; the family being finite makes the whole
// thing a lower estimate of the continuum modulus.

#include <string>
#include <vector>

#include "modp/curves.hpp"
#include "modp/grid.hpp"

namespace modp {

struct DensityField {
  GridDomain grid;
  std::vector<double> values;  // per cell, >= 0

  double at(const Vec& x) const { return values[grid.cell_index(x)]; }
};

// Line integral of a cell density along a curve, using the same sampling
// rule as the solver's constraint assembly (steps of half the smallest cell
// edge).
double line_integral(const DensityField& rho, const DiscreteCurve& curve);

struct SolveOptions {
  double tol = 1e-4;       // relative duality-gap target
  long max_iters = 100000; // first-order iteration cap
  int polish = -1;         // -1 auto (when needed), 0 never, 1 always
  double feas_tol = 1e-6;  // admissibility slack accepted in reports
  std::string log_csv;     // per-iteration (iteration, objective,
                           //   max_violation, duality_gap) when nonempty
};

struct ModulusResult {
  double value = 0.0;      // energy of the returned admissible density
  DensityField density;
  double p = 0.0;
  double duality_gap = 0.0;
  long iterations = 0;
  double min_line_integral = 0.0;  // over the family, for `density`
  bool converged = true;
};

// Throws domain_error for p <= 1 or zero-length curves. An empty family has
// modulus 0 by convention.
ModulusResult compute_modulus(const CurveFamily& family, double p,
                              const GridDomain& grid,
                              const SolveOptions& opts = {});

// Closed-form modulus of the curve family joining the boundary spheres of
// the Euclidean annulus r1 < |x| < r2:
//   p = n: omega_{n-1} (log(r2/r1))^{1-n}
//   else:  omega_{n-1} J^{1-p},  J = int_{r1}^{r2} r^{(1-n)/(p-1)} dr.
double annulus_modulus_oracle(int n, double p, double r1, double r2);

// Quadrature cross-check of the oracle: the extremal density
// rho(r) = r^{(1-n)/(p-1)} / J has radial line integral 1 and energy equal
// to the closed form. Run before trusting the oracle in any gate.
struct OracleValidation {
  double oracle = 0.0;
  double admissibility = 0.0;  // radial line integral of the extremal density
  double energy = 0.0;         // its p-energy by quadrature
  bool ok = false;             // both within 1e-8 relative
};
OracleValidation validate_annulus_oracle(int n, double p, double r1, double r2);

// Checks M_p(family1) <= M_p(family2) * (1 + 2 tol) for family2 whose curves
// are subcurves of family1's (certificate stamped by truncate_to_annulus, or
// the trivially reflexive case). Missing certificate throws domain_error.
struct MinorizationReport {
  double m1 = 0.0;  // modulus of the longer-curve family
  double m2 = 0.0;  // modulus of the subcurve family
  double tol = 0.0;
  bool holds = false;
};
MinorizationReport check_minorization(const CurveFamily& family1,
                                      const CurveFamily& family2, double p,
                                      const GridDomain& grid,
                                      const SolveOptions& opts = {});

}  // namespace modp

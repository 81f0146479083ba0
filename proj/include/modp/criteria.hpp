#pragma once

// Equicontinuity criteria for weighted mappings: mean-oscillation
// classification of the weight at a point, the divergence-integral test on
// the normalized spherical means, the log-power growth check, the L^s
// integrability route (Hoelder split), the modulus-of-continuity experiment
// harness, and the joining-continua lower bound check.
//
// All limit statements are probed on finite geometric ladders, so every
// classifier carries an Inconclusive branch; verdicts are never claimed
// from data compatible with both readings.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "modp/mapping.hpp"
#include "modp/modulus.hpp"
#include "modp/psi.hpp"
#include "modp/radial.hpp"
#include "modp/ringmap.hpp"

namespace modp {

// Geometric ladder {eps_max*ratio, ..., eps_max*ratio^rungs}, decreasing.
std::vector<double> make_eps_ladder(double eps_max, int rungs,
                                    double ratio = 0.5);

// ---------------------------------------------------------------------------
// Mean oscillation

enum class FmoVerdict { FMO, NotFMO, Inconclusive };

struct OscillationReport {
  std::vector<double> eps;   // ladder, decreasing
  std::vector<double> mean;  // ball average of Q per rung
  std::vector<double> m;     // mean oscillation per rung
  double slope = 0.0;        // fitted d log m / d log(1/eps)
  bool clamped = false;      // singular samples clamped at one-cell radius
  FmoVerdict verdict = FmoVerdict::Inconclusive;

  // Columns: eps,mean,m
  void write_csv(const std::string& path) const;
};

// Ball averages by radial quadrature around x0. Verdict FMO when the m(eps)
// tail stays bounded (max of the last block <= 10x the median of the first)
// and the fitted log-log slope is <= 0.05; NotFMO when the slope is >= 0.5
// with monotone growth; otherwise Inconclusive. The grid supplies the
// one-cell clamp radius for singular integrands.
OscillationReport check_fmo(const QField& Q, const Vec& x0,
                            const GridDomain& grid,
                            const std::vector<double>& ladder);

// ---------------------------------------------------------------------------
// Divergence integral

enum class DivergenceVerdict { Divergent, Convergent, Inconclusive };

struct DivergenceReport {
  double delta = 0.0;
  std::vector<double> eps;  // ladder, decreasing
  std::vector<double> T;    // T(eps) = int_eps^delta dr / (r^{(n-1)/(p-1)} q^{1/(p-1)})
  DivergenceVerdict verdict = DivergenceVerdict::Inconclusive;

  // Columns: eps,T
  void write_csv(const std::string& path) const;
};

// T is accumulated rung to rung with adaptive quadrature; the weight takes
// the automatic floor Q >= 1 (raw values are used nowhere else here).
// Convergent when the last three successive increments are below 1%;
// Divergent when the tail still grows by >= 20% over four halvings;
// otherwise Inconclusive. Needs at least 5 rungs.
DivergenceReport check_divergence_criterion(const QField& Q, const Vec& x0,
                                            double p, int n, double delta,
                                            const std::vector<double>& ladder,
                                            const MetricChart& chart);

// ---------------------------------------------------------------------------
// Log-power growth

struct GrowthRow {
  double eps = 0.0;
  double F = 0.0;            // annulus integral of Q * psi^p, psi log-power
  double I = 0.0;            // psi integral
  double ratio_loglog = 0.0; // F / log log(1/eps)
  double ratio_p = 0.0;      // F / I^p
  double ratio_1 = 0.0;      // F / I, the alternative exponent reading
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  bool loglog_bounded = false;   // max/min of F/loglog within factor 3
  bool tail_decreasing = false;  // F/I^p decreasing over the last 4 rungs
  bool pass = false;

  // Columns: eps,F,I,F_over_loglog,F_over_Ip,F_over_I
  void write_csv(const std::string& path) const;
};

// Requires at least 6 rungs, all below eps0 < 1.
GrowthReport log_power_growth_check(const QField& Q, const Vec& x0, int n,
                                   double p, double eps0,
                                   const std::vector<double>& ladder,
                                   const MetricChart& chart);

// ---------------------------------------------------------------------------
// L^s integrability route

enum class LsVerdict { Pass, NotApplicable, Inconclusive };

struct LsRow {
  double eps = 0.0;
  double radial = 0.0;  // (int_{eps<d<eps0} d^{-p q} dv)^{1/q}, q = s/(s-1)
  double I = 0.0;       // int_eps^eps0 dt/t
  double ratio = 0.0;   // radial * ||Q||_s / I^p
};

struct LsReport {
  double q_norm = 0.0;        // ||Q||_{L^s} on the ball B(x0, eps0), by grid sum
  double refine_ratio = 0.0;  // norm at 2x resolution / norm at 1x
  bool q_norm_stable = false; // refine_ratio <= 1.2 and finite
  bool clamped = false;       // singular cells sampled at one-cell radius
  std::vector<LsRow> rows;
  LsVerdict verdict = LsVerdict::Inconclusive;

  // Columns: eps,radial,I,ratio
  void write_csv(const std::string& path) const;
};

// Hoelder split of the annulus integral of Q/d^p: a radial factor by
// quadrature and the L^s norm of Q by grid sum (refinement-checked). Pass
// when the combined bound over I^p decreases to below its first value;
// NotApplicable when the norm refuses to stabilize under refinement.
// Requires p in (1, n) and s >= n/(n-p).
LsReport check_ls_criterion(const QField& Q, const Vec& x0, int n, double p,
                            double s, double eps0,
                            const std::vector<double>& ladder,
                            const GridDomain& grid);

// ---------------------------------------------------------------------------
// Modulus-of-continuity experiment

struct EquiMapRow {
  std::string label;
  double est_q = 0.0;        // estimated minimal constant weight
  bool included = false;
  double omitted_diam = 0.0; // diameter of the declared omitted continuum
  std::string notice;        // exclusion reason, empty when included
  std::vector<double> omega; // per rung, only when included
  double gehring_growth = 0.0;  // (omega/eps) at last rung over first rung
};

struct EquiReport {
  std::vector<double> eps;
  std::vector<EquiMapRow> mappings;
  std::vector<double> sup_omega;  // per rung, over included mappings
  bool sup_decreasing = false;
  double sigma = 0.0;
  bool sigma_ok = false;  // sup omega at the smallest rung <= sigma
  bool pass = false;

  // Columns: mapping,eps,omega,included
  void write_csv(const std::string& path) const;
};

struct EquiOptions {
  double delta = 0.25;       // required omitted-continuum diameter
  double sigma = 0.2;        // ceiling for sup omega at the smallest rung
  double screen_tol = 0.15;  // slack on the budget screening
  int count = 1024;          // curves per modulus solve in the screening
  int resolution = 128;      // grid resolution for the screening solves
  std::uint64_t seed = 1;
  std::pair<double, double> radii{1.0, 2.718281828459045};  // screening ring
  std::string report_csv;    // empty = no file
};

// Screens each mapping (estimated minimal constant weight must lie under
// the budget pointwise; a declared omitted continuum of diameter >= delta
// must exist), then measures omega per rung and reports the family
// supremum. Mappings failing the screen are excluded with a notice, not an
// error.
EquiReport run_equicontinuity_experiment(const std::vector<MappingSpec>& family,
                                         const QField& q_budget, const Vec& x0,
                                         double p,
                                         const std::vector<double>& ladder,
                                         const EquiOptions& opts = {});

// ---------------------------------------------------------------------------
// Joining-continua lower bound

struct ContinuumPair {
  std::vector<Vec> E, F;  // disjoint polyline continua
};

struct LoewnerRow {
  double modulus = 0.0;
  double diam_e = 0.0, diam_f = 0.0;
  double rho = 0.0;  // modulus * R^{1+p-n} / min(diam_e, diam_f)
};

struct LoewnerReport {
  std::vector<LoewnerRow> rows;
  double inv_c = 0.0;  // empirical constant: min over pairs of rho
  bool positive = false;
  double rescale_ratio = 0.0;  // rho of the half-scaled first pair over rho[0]
  bool rescale_stable = false; // within a factor of 3
  void write_csv(const std::string& path) const;  // pair,modulus,diam_E,diam_F,rho
};

// Solves the modulus of curves joining E_i to F_i inside the ball B(x0, R)
// and reports rho_i = M_p * R^{1+p-n} / min diam. Also re-solves the first
// pair shrunk by half about x0 (same ball) and reports the rho ratio.
// Intersecting continua or continua escaping the ball raise domain_error.
LoewnerReport check_loewner_bound(const std::vector<ContinuumPair>& pairs,
                                  double p, const GridDomain& grid, int count,
                                  std::uint64_t seed, const Vec& x0, double R,
                                  const SolveOptions& solve = {});

}  // namespace modp

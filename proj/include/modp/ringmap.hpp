#pragma once

// Verification of the ring inequality
//   M_p(f(Gamma(S(x0,r1), S(x0,r2))))  <=  int_A Q(x) eta^p(d(x,x0)) dv(x)
// for every normalized radial competitor eta, plus the inverse problem
// (least constant weight satisfying the inequality on sampled radii) and
// pointwise moduli of continuity.
//
// The left side is a solved modulus of a sampled family, hence a lower
// estimate of the true image modulus: a pass is supporting evidence, a fail
// that survives refinement is a genuine counterexample.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "modp/mapping.hpp"
#include "modp/modulus.hpp"
#include "modp/radial.hpp"

namespace modp {

struct RingVerifyRow {
  std::string eta;       // profile label
  double eta_integral = 0.0;
  double lhs = 0.0;      // solved modulus of the image family
  double rhs = 0.0;      // annulus quadrature of Q * eta^p
  bool pass = false;
};

struct RingVerifyReport {
  std::vector<RingVerifyRow> rows;  // one per eta
  double tol = 0.0;
  bool all_pass = false;

  // Columns: eta,eta_integral,LHS,RHS,pass
  void write_csv(const std::string& path) const;
};

// Verifies the inequality for each eta. The image family is sampled once
// (the left side does not depend on eta) on the source annulus around x0 and
// pushed forward through f; the modulus is solved on target_grid. Profiles
// with integral below 1 - tol are rejected with domain_error.
RingVerifyReport verify_ring_inequality(
    const MappingSpec& f, const Vec& x0, const QField& Q, double p, double r1,
    double r2, const std::vector<EtaProfile>& etas, const GridDomain& target_grid,
    int count, std::uint64_t seed, double tol = 0.02,
    const SolveOptions& solve = {}, const std::string& report_csv = {});

// The competitor battery used by default: the extremal profile (weighted by
// `radial_weight` when given, typically a spherical mean of Q), the uniform
// profile, and two seeded random step profiles.
std::vector<EtaProfile> standard_eta_battery(
    double r1, double r2, int n, double p, std::uint64_t seed,
    const std::function<double(double)>& radial_weight = {});

// Least constant weight satisfying the ring inequality on the tested radii:
// sup over (r1, r2) pairs of M_p(f(Gamma)) / M_p(Gamma), both sides solved
// (source modulus on source_grid, image modulus on a same-resolution grid
// over the target chart).
double estimate_minimal_constant_Q(const MappingSpec& f, const Vec& x0,
                                   double p,
                                   const std::vector<std::pair<double, double>>& radii,
                                   const GridDomain& source_grid, int count,
                                   std::uint64_t seed,
                                   const SolveOptions& solve = {});

struct OmegaPoint {
  double eps = 0.0;
  double omega = 0.0;
};

// omega(eps) = max over the sampled geodesic sphere S(x0, eps) of the
// target-chart geodesic distance d(f(x), f(x0)). eps = 0 gives 0.
std::vector<OmegaPoint> modulus_of_continuity(const MappingSpec& f,
                                              const Vec& x0,
                                              const std::vector<double>& eps_list);

}  // namespace modp

#pragma once

// Radial test profiles psi(t) used by the capacity bounds, together with
// their integrals I(eps, eps0) = int_eps^eps0 psi(t) dt, and the normalized
// spherical mean q_{x0}(r) that weights the inverse profile.

#include <functional>
#include <string>

#include "modp/mapping.hpp"
#include "modp/radial.hpp"

namespace modp {

// A nonnegative radial profile on (0, infinity). Three shapes:
//   LogPower         psi(t) = 1 / (t log(1/t))^{n/p}      on (0, 1)
//   Reciprocal       psi(t) = 1 / t
//   WeightedInverse  psi(t) = t^{(1-n)/(p-1)} q(t)^{-1/(p-1)} on (r1, r2),
//                    0 outside, with q a positive radial weight (typically
//                    a spherical mean of Q).
// integral() enforces 0 < I < infinity, the admissibility condition every
// capacity bound rests on.
class PsiFamily {
 public:
  enum class Kind { LogPower, Reciprocal, WeightedInverse };

  static PsiFamily log_power(int n, double p);
  static PsiFamily reciprocal();
  static PsiFamily weighted_inverse(int n, double p, double r1, double r2,
                                    std::function<double(double)> q);

  // psi(t). Throws domain_error for t outside the profile's natural domain
  // (t <= 0 always; t >= 1 for LogPower). WeightedInverse is 0 off (r1,r2).
  double operator()(double t) const;

  // I(eps, eps0) by adaptive quadrature; requires 0 < eps < eps0 and a
  // finite positive result.
  double integral(double eps, double eps0) const;

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  double p() const { return p_; }
  const std::string& label() const { return label_; }

 private:
  PsiFamily() = default;

  Kind kind_ = Kind::Reciprocal;
  int n_ = 2;
  double p_ = 2.0;
  double r1_ = 0.0, r2_ = 0.0;
  std::function<double(double)> q_;
  std::string label_;
};

// q_{x0}(r) = r^{1-n} * int_{S(x0,r)} Q dA, the normalized spherical mean
// of the weight over the geodesic sphere of radius r.
double spherical_mean_q(const QField& Q, const RadialGauge& gauge, double r,
                        int nodes_hint = 0);
// Convenience overload that builds the gauge; prefer the gauge form inside
// loops (gauge construction samples the chart).
double spherical_mean_q(const QField& Q, const Vec& x0, double r,
                        const MetricChart& chart);

}  // namespace modp

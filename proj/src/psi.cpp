#include "modp/psi.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "modp/util.hpp"

namespace modp {

PsiFamily PsiFamily::log_power(int n, double p) {
  if (n < 2) throw config_error("PsiFamily::log_power: n must be >= 2");
  if (!(p >= 1.0)) throw config_error("PsiFamily::log_power: p must be >= 1");
  PsiFamily out;
  out.kind_ = Kind::LogPower;
  out.n_ = n;
  out.p_ = p;
  std::ostringstream lbl;
  lbl << "1/(t*log(1/t))^(" << n << "/" << p << ")";
  out.label_ = lbl.str();
  return out;
}

PsiFamily PsiFamily::reciprocal() {
  PsiFamily out;
  out.kind_ = Kind::Reciprocal;
  out.label_ = "1/t";
  return out;
}

PsiFamily PsiFamily::weighted_inverse(int n, double p, double r1, double r2,
                                      std::function<double(double)> q) {
  if (n < 2) throw config_error("PsiFamily::weighted_inverse: n must be >= 2");
  if (!(p > 1.0))
    throw config_error("PsiFamily::weighted_inverse: p must be > 1");
  if (!(0.0 < r1 && r1 < r2))
    throw config_error("PsiFamily::weighted_inverse: need 0 < r1 < r2");
  if (!q) throw config_error("PsiFamily::weighted_inverse: empty weight");
  PsiFamily out;
  out.kind_ = Kind::WeightedInverse;
  out.n_ = n;
  out.p_ = p;
  out.r1_ = r1;
  out.r2_ = r2;
  out.q_ = std::move(q);
  std::ostringstream lbl;
  lbl << "t^((1-" << n << ")/(" << p << "-1))*q^(-1/(" << p << "-1)) on ("
      << r1 << "," << r2 << ")";
  out.label_ = lbl.str();
  return out;
}

double PsiFamily::operator()(double t) const {
  if (!(t > 0.0)) throw domain_error("PsiFamily: t must be positive");
  switch (kind_) {
    case Kind::LogPower: {
      if (t >= 1.0)
        throw domain_error("PsiFamily: log-power profile needs t < 1");
      return std::pow(t * std::log(1.0 / t), -static_cast<double>(n_) / p_);
    }
    case Kind::Reciprocal:
      return 1.0 / t;
    case Kind::WeightedInverse: {
      if (t <= r1_ || t >= r2_) return 0.0;
      const double q = q_(t);
      if (std::isnan(q) || q < 0.0)
        throw domain_error("PsiFamily: weight must be >= 0");
      if (q == 0.0)
        throw domain_error("PsiFamily: zero weight makes psi infinite");
      if (std::isinf(q)) return 0.0;
      const double e = 1.0 / (p_ - 1.0);
      return std::pow(t, (1.0 - n_) * e) * std::pow(q, -e);
    }
  }
  return 0.0;
}

double PsiFamily::integral(double eps, double eps0) const {
  if (!(0.0 < eps && eps < eps0))
    throw domain_error("PsiFamily::integral: need 0 < eps < eps0");
  if (kind_ == Kind::LogPower && eps0 >= 1.0)
    throw domain_error("PsiFamily::integral: log-power profile needs eps0 < 1");
  double a = eps, b = eps0;
  if (kind_ == Kind::WeightedInverse) {
    // The profile vanishes off (r1, r2); clip to keep the quadrature away
    // from the support endpoints where q may blow up.
    a = std::max(a, r1_);
    b = std::min(b, r2_);
    if (!(a < b))
      throw domain_error(
          "PsiFamily::integral: profile support misses (eps, eps0)");
  }
  const double value =
      integrate_1d([this](double t) { return (*this)(t); }, a, b);
  if (!std::isfinite(value) || value <= 0.0)
    throw domain_error("PsiFamily::integral: I(eps, eps0) must be in (0, inf)");
  return value;
}

double spherical_mean_q(const QField& Q, const RadialGauge& gauge, double r,
                        int nodes_hint) {
  if (!(r > 0.0)) throw domain_error("spherical_mean_q: r must be positive");
  const double area_weighted =
      gauge.sphere_integral([&Q](const Vec& x) { return Q.at(x); }, r,
                            nodes_hint);
  return area_weighted * std::pow(r, 1.0 - gauge.chart().dim());
}

double spherical_mean_q(const QField& Q, const Vec& x0, double r,
                        const MetricChart& chart) {
  RadialGauge gauge(chart, x0);
  return spherical_mean_q(Q, gauge, r);
}

}  // namespace modp

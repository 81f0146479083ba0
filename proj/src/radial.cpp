#include "modp/radial.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace modp {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr int kQuadDepth = 10;
constexpr double kQuadTol = 1e-10;
}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b) {
  if (!(a <= b)) throw domain_error("integrate_1d: reversed interval");
  if (a == b) return 0.0;
  if (a > 0.0 && b / a >= 16.0) {
    // u = log r: resolves integrands spread over many decades.
    auto g = [&](double u) {
      double r = std::exp(u);
      return f(r) * r;
    };
    return GK::integrate(g, std::log(a), std::log(b), kQuadDepth, kQuadTol);
  }
  return GK::integrate(f, a, b, kQuadDepth, kQuadTol);
}

Vec dir_from_params(int n, const Vec& u) {
  if (n == 2) return make_vec({std::cos(u[0]), std::sin(u[0])});
  if (n == 3) {
    const double c = u[0];  // cos(phi)
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return make_vec({s * std::cos(u[1]), s * std::sin(u[1]), c});
  }
  throw domain_error("sphere rule: only dim 2 and 3 are supported");
}

SphereRule make_sphere_rule(int n, int nodes_hint) {
  SphereRule rule;
  rule.dim = n;
  if (n == 2) {
    const int N = nodes_hint > 0 ? nodes_hint : 256;
    const double w = 2.0 * kPi / N;
    for (int i = 0; i < N; ++i) {
      Vec u(1);
      u[0] = w * i;
      rule.params.push_back(u);
      rule.dirs.push_back(dir_from_params(2, u));
      rule.weights.push_back(w);
    }
    return rule;
  }
  if (n == 3) {
    // Product rule: Gauss–Legendre in cos(phi), trapezoid in psi.
    using G = boost::math::quadrature::gauss<double, 32>;
    const int M = nodes_hint > 0 ? std::max(8, nodes_hint / 16) : 64;  // psi nodes
    const double wpsi = 2.0 * kPi / M;
    std::vector<std::pair<double, double>> cnodes;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      const double c = G::abscissa()[i];
      const double w = G::weights()[i];
      cnodes.emplace_back(c, w);
      if (c > 0.0) cnodes.emplace_back(-c, w);
    }
    for (auto [c, wc] : cnodes)
      for (int j = 0; j < M; ++j) {
        Vec u(2);
        u[0] = c;
        u[1] = wpsi * (j + 0.5);
        rule.params.push_back(u);
        rule.dirs.push_back(dir_from_params(3, u));
        rule.weights.push_back(wc * wpsi);
      }
    return rule;
  }
  throw domain_error("sphere rule: only dim 2 and 3 are supported");
}

RadialGauge::RadialGauge(MetricChart chart, Vec center)
    : chart_(std::move(chart)), x0_(std::move(center)) {
  chart_.require_inside(x0_, "radial gauge");
  mode_ = detect_mode();
  if (mode_ == Mode::RadialConformal) build_radial_table();

  // Box-derived bound on the usable geodesic radius, capped by the declared
  // normal-patch guard.
  double bound;
  if (mode_ == Mode::EuclideanExact || mode_ == Mode::RadialConformal) {
    double clearance = std::numeric_limits<double>::infinity();
    const Box& box = chart_.domain();
    for (int a = 0; a < chart_.dim(); ++a) {
      clearance = std::min(clearance, box.hi[a] - x0_[a]);
      clearance = std::min(clearance, x0_[a] - box.lo[a]);
    }
    Vec e1 = Vec::Zero(chart_.dim());
    e1[0] = 1.0;
    bound = arclength(e1, clearance * (1.0 - 1e-12));
  } else {
    SphereRule rule = make_sphere_rule(chart_.dim(), chart_.dim() == 2 ? 128 : 512);
    bound = std::numeric_limits<double>::infinity();
    for (const Vec& th : rule.dirs)
      bound = std::min(bound, arclength(th, exit_t(th) * (1.0 - 1e-9)));
  }
  rmax_ = std::min(bound, chart_.rmax());
}

void RadialGauge::build_radial_table() {
  // Composite-Simpson cumulative arclength along one ray, valid on the
  // inscribed ball where radial symmetry makes it direction-independent.
  // Node speeds are kept so Hermite interpolation recovers ~1e-12 accuracy.
  double clearance = std::numeric_limits<double>::infinity();
  const Box& box = chart_.domain();
  for (int a = 0; a < chart_.dim(); ++a) {
    clearance = std::min(clearance, box.hi[a] - x0_[a]);
    clearance = std::min(clearance, x0_[a] - box.lo[a]);
  }
  Vec e1 = Vec::Zero(chart_.dim());
  e1[0] = 1.0;
  const int N = 8192;
  const double tmax = clearance * (1.0 - 1e-12);
  const double h = tmax / N;
  tbl_t_.resize(N + 1);
  tbl_s_.resize(N + 1);
  tbl_f_.resize(N + 1);
  tbl_t_[0] = 0.0;
  tbl_s_[0] = 0.0;
  tbl_f_[0] = metric_speed(e1, 0.0);
  for (int i = 0; i < N; ++i) {
    const double t_hi = (i + 1) * h;
    const double f_mid = metric_speed(e1, (i + 0.5) * h);
    const double f_hi = metric_speed(e1, t_hi);
    tbl_t_[i + 1] = t_hi;
    tbl_s_[i + 1] = tbl_s_[i] + h / 6.0 * (tbl_f_[i] + 4.0 * f_mid + f_hi);
    tbl_f_[i + 1] = f_hi;
  }
}

double RadialGauge::table_s_of_t(double t) const {
  const double h = tbl_t_[1];
  int i = std::clamp(static_cast<int>(t / h), 0, static_cast<int>(tbl_t_.size()) - 2);
  const double u = (t - tbl_t_[i]) / h;
  // Cubic Hermite with exact endpoint slopes (s' = metric speed).
  const double s0 = tbl_s_[i], s1 = tbl_s_[i + 1];
  const double m0 = tbl_f_[i] * h, m1 = tbl_f_[i + 1] * h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * s0 + (u3 - 2 * u2 + u) * m0 +
         (-2 * u3 + 3 * u2) * s1 + (u3 - u2) * m1;
}

double RadialGauge::table_t_of_s(double r) const {
  // Bracket on the monotone table, then Newton on the Hermite interpolant.
  auto it = std::lower_bound(tbl_s_.begin(), tbl_s_.end(), r);
  if (it == tbl_s_.begin()) return 0.0;
  if (it == tbl_s_.end()) return tbl_t_.back();
  const int i = static_cast<int>(it - tbl_s_.begin()) - 1;
  const double h = tbl_t_[1];
  double t = tbl_t_[i] + h * (r - tbl_s_[i]) / (tbl_s_[i + 1] - tbl_s_[i]);
  for (int k = 0; k < 3; ++k) {
    const double F = table_s_of_t(t) - r;
    const double hh = tbl_t_[1];
    int j = std::clamp(static_cast<int>(t / hh), 0,
                       static_cast<int>(tbl_t_.size()) - 2);
    const double u = (t - tbl_t_[j]) / hh;
    const double speed = tbl_f_[j] * (1.0 - u) + tbl_f_[j + 1] * u;
    t -= F / std::max(speed, 1e-300);
    t = std::clamp(t, tbl_t_[i], tbl_t_[i + 1]);
  }
  return t;
}

RadialGauge::Mode RadialGauge::detect_mode() const {
  if (chart_.kind() == ChartKind::Euclidean) return Mode::EuclideanExact;
  if (chart_.kind() != ChartKind::ConformalScalar) return Mode::Generic;
  // Probe whether lambda depends on the point only through |x - x0|.
  const int n = chart_.dim();
  double clearance = std::numeric_limits<double>::infinity();
  const Box& box = chart_.domain();
  for (int a = 0; a < n; ++a) {
    clearance = std::min(clearance, box.hi[a] - x0_[a]);
    clearance = std::min(clearance, x0_[a] - box.lo[a]);
  }
  std::vector<Vec> probes;
  Vec e1 = Vec::Zero(n);
  e1[0] = 1.0;
  probes.push_back(e1);
  probes.push_back(-e1);
  for (int a = 1; a < n; ++a) {
    Vec e = Vec::Zero(n);
    e[a] = 1.0;
    Vec diag = ((e1 + e) / std::sqrt(2.0)).eval();
    probes.push_back(e);
    probes.push_back(-e);
    probes.push_back(diag);
    probes.push_back(-diag);
  }
  for (double frac : {0.23, 0.57, 0.91}) {
    const double s = frac * clearance;
    const double ref = chart_.conformal_factor(x0_ + s * probes[0]);
    for (const Vec& th : probes) {
      const double lam = chart_.conformal_factor(x0_ + s * th);
      if (std::abs(lam - ref) > 1e-12 * (std::abs(ref) + 1.0))
        return Mode::Generic;
    }
  }
  return Mode::RadialConformal;
}

double RadialGauge::metric_speed(const Vec& theta, double s) const {
  return chart_.length_element(x0_ + s * theta, theta);
}

double RadialGauge::exit_t(const Vec& theta) const {
  const Box& box = chart_.domain();
  double t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < chart_.dim(); ++a) {
    if (theta[a] > 1e-300) t = std::min(t, (box.hi[a] - x0_[a]) / theta[a]);
    if (theta[a] < -1e-300) t = std::min(t, (box.lo[a] - x0_[a]) / theta[a]);
  }
  return t;
}

double RadialGauge::arclength(const Vec& theta, double t) const {
  if (t < 0.0) throw domain_error("radial gauge: negative ray parameter");
  if (t == 0.0) return 0.0;
  if (mode_ == Mode::EuclideanExact) return t;
  return GK::integrate([&](double s) { return metric_speed(theta, s); }, 0.0, t,
                       kQuadDepth, kQuadTol);
}

double RadialGauge::invert_radius(const Vec& theta, double r,
                                  double t_start) const {
  // Newton on F(t) = arclength(t) - r with bisection safeguard.
  double hi = exit_t(theta) * (1.0 - 1e-12);
  if (arclength(theta, hi) < r)
    throw domain_error("radial gauge: radius reaches past the chart box");
  double lo = 0.0;
  double t = (t_start > 0.0 && t_start < hi) ? t_start
                                             : std::min(r / metric_speed(theta, 0.0), 0.5 * hi);
  for (int it = 0; it < 100; ++it) {
    const double F = arclength(theta, t) - r;
    if (std::abs(F) <= 1e-13 * std::max(1.0, r)) return t;
    if (F > 0.0)
      hi = t;
    else
      lo = t;
    const double step = F / metric_speed(theta, t);
    double next = t - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16 * std::max(1.0, t)) return next;
    t = next;
  }
  return t;
}

double RadialGauge::chart_radius(const Vec& theta, double r) const {
  if (r < 0.0) throw domain_error("radial gauge: negative radius");
  if (r == 0.0) return 0.0;
  if (mode_ == Mode::EuclideanExact) {
    if (r > exit_t(theta) * (1.0 + 1e-12))
      throw domain_error("radial gauge: radius reaches past the chart box");
    return r;
  }
  if (mode_ == Mode::RadialConformal && r <= tbl_s_.back()) {
    const double t = table_t_of_s(r);
    if (t > exit_t(theta) * (1.0 + 1e-12))
      throw domain_error("radial gauge: radius reaches past the chart box");
    return t;
  }
  return invert_radius(theta, r, -1.0);
}

Vec RadialGauge::point_at(double r, const Vec& theta) const {
  Vec th = theta.normalized();
  return x0_ + chart_radius(th, r) * th;
}

double RadialGauge::radius_of(const Vec& x) const {
  Vec d = x - x0_;
  const double t = d.norm();
  if (t == 0.0) return 0.0;
  if (mode_ == Mode::RadialConformal && t <= tbl_t_.back())
    return table_s_of_t(t);
  return arclength(d / t, t);
}

double RadialGauge::sphere_integral(const std::function<double(const Vec&)>& f,
                                    double r, int nodes_hint) const {
  if (r < 0.0) throw domain_error("sphere integral: negative radius");
  if (r == 0.0) return 0.0;
  if (r > rmax_ * (1.0 + 1e-9))
    throw domain_error("sphere integral: radius beyond the normal-patch guard");
  const int n = chart_.dim();
  SphereRule rule = make_sphere_rule(n, nodes_hint);

  if (mode_ == Mode::EuclideanExact) {
    const double rn = std::pow(r, n - 1);
    std::vector<double> terms(rule.dirs.size());
    for (std::size_t i = 0; i < rule.dirs.size(); ++i)
      terms[i] = rule.weights[i] * f(x0_ + r * rule.dirs[i]) * rn;
    return pairwise_sum(terms);
  }
  if (mode_ == Mode::RadialConformal) {
    // Geodesic sphere = chart sphere of radius t; dA = lambda^{n-1} t^{n-1} dOmega.
    const double t = chart_radius(rule.dirs[0], r);
    const double tn = std::pow(t, n - 1);
    std::vector<double> terms(rule.dirs.size());
    for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
      const Vec x = x0_ + t * rule.dirs[i];
      terms[i] =
          rule.weights[i] * f(x) * std::pow(chart_.conformal_factor(x), n - 1) * tn;
    }
    return pairwise_sum(terms);
  }

  // Generic star-shaped sphere: finite-difference tangents in the angular
  // parameters, dA = sqrt(det(J^T g J)) d(params).
  std::vector<double> terms(rule.dirs.size());
  double t_prev = -1.0;
  for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
    const Vec& u = rule.params[i];
    const double t = invert_radius(rule.dirs[i], r, t_prev);
    t_prev = t;
    const Vec x = x0_ + t * rule.dirs[i];
    const int m = n - 1;
    Mat J(n, m);
    for (int k = 0; k < m; ++k) {
      double h = 1e-5;
      if (n == 3 && k == 0) h = std::min(h, (1.0 - std::abs(u[0])) / 8.0);
      Vec up = u, um = u;
      up[k] += h;
      um[k] -= h;
      const Vec dp = dir_from_params(n, up);
      const Vec dm = dir_from_params(n, um);
      const Vec xp = x0_ + invert_radius(dp, r, t) * dp;
      const Vec xm = x0_ + invert_radius(dm, r, t) * dm;
      J.col(k) = (xp - xm) / (2.0 * h);
    }
    const Mat g = chart_.metric_at(x);
    const Mat JTgJ = J.transpose() * g * J;
    const double det = (m == 1) ? JTgJ(0, 0) : JTgJ.determinant();
    terms[i] = rule.weights[i] * f(x) * std::sqrt(std::max(0.0, det));
  }
  return pairwise_sum(terms);
}

double RadialGauge::annulus_integral(const std::function<double(const Vec&)>& f,
                                     double r1, double r2, int nodes_hint) const {
  if (!(0.0 <= r1 && r1 < r2))
    throw domain_error("annulus integral: need 0 <= r1 < r2");
  return integrate_1d(
      [&](double r) { return sphere_integral(f, r, nodes_hint); }, r1, r2);
}

double RadialGauge::ball_integral(const std::function<double(const Vec&)>& f,
                                  double r, int nodes_hint) const {
  return annulus_integral(f, 0.0, r, nodes_hint);
}

GeodesicAnnulus::GeodesicAnnulus(MetricChart chart, Vec c, double rr1, double rr2)
    : center(std::move(c)), r1(rr1), r2(rr2) {
  if (!(0.0 < r1 && r1 < r2))
    throw domain_error("annulus: need 0 < r1 < r2");
  auto g = std::make_shared<RadialGauge>(std::move(chart), center);
  if (r2 > g->max_radius() * (1.0 + 1e-12))
    throw domain_error("annulus: r2 exceeds the chart's normal-patch guard");
  gauge_ = std::move(g);
}

}  // namespace modp

#include "modp/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "modp/curves.hpp"

namespace modp {

namespace {

std::vector<double> sorted_desc(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end(), std::greater<double>());
  return xs;
}

// Least-squares slope of log(y) against log(1/x), over entries with y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double u = std::log(1.0 / x[i]);
    const double v = std::log(y[i]);
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
    ++k;
  }
  if (k < 2) return 0.0;
  const double den = k * sxx - sx * sx;
  if (den <= 0.0) return 0.0;
  return (k * sxy - sx * sy) / den;
}

std::ofstream open_csv(const std::string& path, const char* who) {
  std::ofstream out(path);
  if (!out) throw config_error(std::string(who) + ": cannot open " + path);
  out.precision(17);
  return out;
}

// Closest distance between segments [a0,a1] and [b0,b1] in chart
// coordinates (clamped quadratic in the two segment parameters).
double segment_distance(const Vec& a0, const Vec& a1, const Vec& b0,
                        const Vec& b1) {
  const Vec d1 = a1 - a0, d2 = b1 - b0, r = a0 - b0;
  const double A = d1.squaredNorm(), E = d2.squaredNorm(), F = d2.dot(r);
  double s = 0.0, t = 0.0;
  const double tiny = 1e-30;
  if (A <= tiny && E <= tiny) {
    // both degenerate: point-point
  } else if (A <= tiny) {
    t = std::clamp(F / E, 0.0, 1.0);
  } else {
    const double C = d1.dot(r);
    if (E <= tiny) {
      s = std::clamp(-C / A, 0.0, 1.0);
    } else {
      const double B = d1.dot(d2);
      const double den = A * E - B * B;
      s = den > tiny ? std::clamp((B * F - C * E) / den, 0.0, 1.0) : 0.0;
      t = (B * s + F) / E;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-C / A, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((B - C) / A, 0.0, 1.0);
      }
    }
  }
  return (a0 + s * d1 - (b0 + t * d2)).norm();
}

double polyline_distance(const std::vector<Vec>& E, const std::vector<Vec>& F) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < E.size() || i == 0; ++i) {
    const Vec& a0 = E[i];
    const Vec& a1 = E[std::min(i + 1, E.size() - 1)];
    for (std::size_t j = 0; j + 1 < F.size() || j == 0; ++j) {
      const Vec& b0 = F[j];
      const Vec& b1 = F[std::min(j + 1, F.size() - 1)];
      best = std::min(best, segment_distance(a0, a1, b0, b1));
    }
    if (E.size() <= 1) break;
  }
  return best;
}

double polyline_diam(const std::vector<Vec>& P, const MetricChart& chart) {
  double d = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = i + 1; j < P.size(); ++j)
      d = std::max(d, segment_length(P[i], P[j], chart));
  return d;
}

}  // namespace

std::vector<double> make_eps_ladder(double eps_max, int rungs, double ratio) {
  if (!(eps_max > 0.0)) throw config_error("make_eps_ladder: eps_max <= 0");
  if (rungs < 1) throw config_error("make_eps_ladder: rungs < 1");
  if (!(0.0 < ratio && ratio < 1.0))
    throw config_error("make_eps_ladder: ratio must lie in (0,1)");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rungs));
  double e = eps_max;
  for (int i = 0; i < rungs; ++i) {
    e *= ratio;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------

void OscillationReport::write_csv(const std::string& path) const {
  auto out = open_csv(path, "OscillationReport");
  out << "eps,mean,m\n";
  for (std::size_t i = 0; i < eps.size(); ++i)
    out << eps[i] << ',' << mean[i] << ',' << m[i] << '\n';
}

OscillationReport check_fmo(const QField& Q, const Vec& x0,
                            const GridDomain& grid,
                            const std::vector<double>& ladder) {
  if (ladder.empty()) throw config_error("check_fmo: empty ladder");
  RadialGauge gauge(grid.chart(), x0);
  OscillationReport rep;
  rep.eps = sorted_desc(ladder);
  for (double e : rep.eps)
    if (!(0.0 < e && e <= gauge.max_radius()))
      throw domain_error("check_fmo: rung outside the patch");

  auto area = [&](double t) {
    return gauge.sphere_integral([](const Vec&) { return 1.0; }, t);
  };
  auto qshell = [&](double t) {
    return gauge.sphere_integral([&Q](const Vec& x) { return Q.at(x); }, t);
  };

  // Singular weights get the whole ladder integrated from one half-cell
  // instead of 0; the clamp is reported, not silently absorbed.
  double lo = 0.0;
  const double h_clamp =
      std::min(0.5 * grid.min_cell_edge(), 0.5 * rep.eps.back());
  for (double t : {h_clamp, 0.125 * rep.eps.back(), 0.5 * rep.eps.front()}) {
    if (!std::isfinite(qshell(t))) {
      rep.clamped = true;
      lo = h_clamp;
      break;
    }
  }
  if (rep.clamped && !std::isfinite(qshell(h_clamp)))
    throw domain_error("check_fmo: weight not integrable even after the "
                       "one-cell clamp");

  for (double e : rep.eps) {
    const double vol = integrate_1d(area, lo, e);
    const double qint = integrate_1d(qshell, lo, e);
    const double mean = qint / vol;
    const double osc = integrate_1d(
        [&](double t) {
          return gauge.sphere_integral(
              [&Q, mean](const Vec& x) { return std::abs(Q.at(x) - mean); }, t);
        },
        lo, e);
    rep.mean.push_back(mean);
    rep.m.push_back(osc / vol);
  }

  // Constant fields oscillate by rounding only.
  double scale = 0.0;
  for (std::size_t i = 0; i < rep.m.size(); ++i)
    scale = std::max(scale, std::abs(rep.mean[i]));
  const double zero_tol = 1e-12 * std::max(1.0, scale);
  bool all_zero = true;
  for (double v : rep.m) all_zero &= v <= zero_tol;
  if (all_zero) {
    rep.slope = 0.0;
    rep.verdict = FmoVerdict::FMO;
    return rep;
  }

  rep.slope = loglog_slope(rep.eps, rep.m);

  const std::size_t k = rep.m.size();
  const std::size_t block = std::min<std::size_t>(5, std::max<std::size_t>(1, k / 2));
  std::vector<double> head(rep.m.begin(), rep.m.begin() + block);
  std::sort(head.begin(), head.end());
  const double head_median = head[head.size() / 2];
  double tail_max = 0.0;
  for (std::size_t i = k - block; i < k; ++i)
    tail_max = std::max(tail_max, rep.m[i]);
  const bool bounded =
      head_median > zero_tol ? tail_max <= 10.0 * head_median
                             : tail_max <= zero_tol;

  bool monotone_growth = true;
  for (std::size_t i = 1; i < k; ++i)
    monotone_growth &= rep.m[i] >= rep.m[i - 1] * (1.0 - 1e-2);

  if (bounded && rep.slope <= 0.05)
    rep.verdict = FmoVerdict::FMO;
  else if (rep.slope >= 0.5 && monotone_growth)
    rep.verdict = FmoVerdict::NotFMO;
  else
    rep.verdict = FmoVerdict::Inconclusive;
  return rep;
}

// ---------------------------------------------------------------------------

void DivergenceReport::write_csv(const std::string& path) const {
  auto out = open_csv(path, "DivergenceReport");
  out << "eps,T\n";
  for (std::size_t i = 0; i < eps.size(); ++i)
    out << eps[i] << ',' << T[i] << '\n';
}

DivergenceReport check_divergence_criterion(const QField& Q, const Vec& x0,
                                            double p, int n, double delta,
                                            const std::vector<double>& ladder,
                                            const MetricChart& chart) {
  if (!(p > 1.0))
    throw config_error("check_divergence_criterion: p must be > 1");
  if (n != chart.dim())
    throw config_error("check_divergence_criterion: n does not match chart");
  if (ladder.size() < 5)
    throw config_error("check_divergence_criterion: need at least 5 rungs");
  RadialGauge gauge(chart, x0);
  if (!(0.0 < delta && delta <= gauge.max_radius()))
    throw domain_error("check_divergence_criterion: delta outside the patch");

  DivergenceReport rep;
  rep.delta = delta;
  rep.eps = sorted_desc(ladder);
  if (rep.eps.front() >= delta)
    throw domain_error("check_divergence_criterion: rung above delta");

  const QField Qf = Q.with_floor(1.0);
  const double re = (n - 1) / (p - 1.0);
  const double qe = 1.0 / (p - 1.0);
  auto integrand = [&](double r) {
    const double q = spherical_mean_q(Qf, gauge, r);
    if (!(q > 0.0))
      throw domain_error("check_divergence_criterion: vanishing spherical mean");
    return std::pow(r, -re) * std::pow(q, -qe);
  };

  double acc = 0.0, hi = delta;
  for (double e : rep.eps) {
    acc += integrate_1d(integrand, e, hi);
    hi = e;
    rep.T.push_back(acc);
  }

  const std::size_t k = rep.T.size();
  bool cauchy = true;
  for (std::size_t i = k - 3; i < k; ++i)
    cauchy &= (rep.T[i] - rep.T[i - 1]) <= 0.01 * rep.T[i - 1];
  if (cauchy) {
    rep.verdict = DivergenceVerdict::Convergent;
  } else if (rep.T[k - 1] >= 1.2 * rep.T[k - 5]) {
    rep.verdict = DivergenceVerdict::Divergent;
  } else {
    rep.verdict = DivergenceVerdict::Inconclusive;
  }
  return rep;
}

// ---------------------------------------------------------------------------

void GrowthReport::write_csv(const std::string& path) const {
  auto out = open_csv(path, "GrowthReport");
  out << "eps,F,I,F_over_loglog,F_over_Ip,F_over_I\n";
  for (const auto& r : rows)
    out << r.eps << ',' << r.F << ',' << r.I << ',' << r.ratio_loglog << ','
        << r.ratio_p << ',' << r.ratio_1 << '\n';
}

GrowthReport log_power_growth_check(const QField& Q, const Vec& x0, int n,
                                   double p, double eps0,
                                   const std::vector<double>& ladder,
                                   const MetricChart& chart) {
  if (ladder.size() < 6)
    throw config_error("log_power_growth_check: need at least 6 rungs");
  if (n != chart.dim())
    throw config_error("log_power_growth_check: n does not match chart");
  if (!(eps0 < 1.0))
    throw domain_error("log_power_growth_check: eps0 must be below 1");
  RadialGauge gauge(chart, x0);
  if (eps0 > gauge.max_radius())
    throw domain_error("log_power_growth_check: eps0 outside the patch");

  const PsiFamily psi = PsiFamily::log_power(n, p);
  GrowthReport rep;
  auto eps = sorted_desc(ladder);

  auto shell = [&](double t) {
    return std::pow(psi(t), p) *
           gauge.sphere_integral([&Q](const Vec& x) { return Q.at(x); }, t);
  };

  double acc = 0.0, hi = eps0;
  for (double e : eps) {
    if (!(0.0 < e && e < eps0))
      throw domain_error("log_power_growth_check: rung outside (0, eps0)");
    const double ll = std::log(std::log(1.0 / e));
    if (!(ll > 0.0))
      throw domain_error("log_power_growth_check: rung must lie below 1/e");
    acc += integrate_1d(shell, e, hi);
    hi = e;
    GrowthRow row;
    row.eps = e;
    row.F = acc;
    row.I = psi.integral(e, eps0);
    row.ratio_loglog = acc / ll;
    row.ratio_p = acc / std::pow(row.I, p);
    row.ratio_1 = acc / row.I;
    rep.rows.push_back(row);
  }

  bool all_zero = true;
  for (const auto& r : rep.rows) all_zero &= r.F == 0.0;
  if (all_zero) {
    // Zero weight: F identically 0 is trivially dominated.
    rep.loglog_bounded = rep.tail_decreasing = rep.pass = true;
    return rep;
  }

  double lo = std::numeric_limits<double>::infinity(), hi_ratio = 0.0;
  for (const auto& r : rep.rows) {
    lo = std::min(lo, r.ratio_loglog);
    hi_ratio = std::max(hi_ratio, r.ratio_loglog);
  }
  rep.loglog_bounded = lo > 0.0 && hi_ratio <= 3.0 * lo;

  rep.tail_decreasing = true;
  const std::size_t k = rep.rows.size();
  for (std::size_t i = k - 3; i < k; ++i)
    rep.tail_decreasing &=
        rep.rows[i].ratio_p <= rep.rows[i - 1].ratio_p * (1.0 + 1e-12);

  rep.pass = rep.loglog_bounded && rep.tail_decreasing;
  return rep;
}

// ---------------------------------------------------------------------------

void LsReport::write_csv(const std::string& path) const {
  auto out = open_csv(path, "LsReport");
  out << "eps,radial,I,ratio\n";
  for (const auto& r : rows)
    out << r.eps << ',' << r.radial << ',' << r.I << ',' << r.ratio << '\n';
}

namespace {

// ||Q||_{L^s} on the geodesic ball B(x0, eps0) by cell sums; cells hugging
// the center are sampled at one cell edge away from x0 (the clamp).
double grid_ls_norm(const QField& Q, const Vec& x0, double s, double eps0,
                    const GridDomain& grid, const RadialGauge& gauge,
                    bool* clamped) {
  const double h = grid.min_cell_edge();
  std::vector<double> terms;
  terms.reserve(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Vec x = grid.cell_center(c);
    double r;
    try {
      r = gauge.radius_of(x);
    } catch (const domain_error&) {
      continue;  // beyond the star patch: outside every tested ball
    }
    if (r > eps0) continue;
    Vec xe = x;
    if (r < h) {
      Vec dir = x - x0;
      if (dir.norm() < 1e-300) {
        dir = Vec::Zero(x.size());
        dir[0] = 1.0;
      } else {
        dir /= dir.norm();
      }
      xe = x0 + h * dir;
      if (clamped) *clamped = true;
    }
    terms.push_back(grid.cell_volume(c) * std::pow(Q.at(xe), s));
  }
  return std::pow(pairwise_sum(terms), 1.0 / s);
}

}  // namespace

LsReport check_ls_criterion(const QField& Q, const Vec& x0, int n, double p,
                            double s, double eps0,
                            const std::vector<double>& ladder,
                            const GridDomain& grid) {
  if (n != grid.chart().dim())
    throw config_error("check_ls_criterion: n does not match chart");
  if (!(1.0 < p && p < n))
    throw config_error("check_ls_criterion: unsupported: p must lie in (1, n)");
  const double s_min = n / (n - p);
  if (s < s_min * (1.0 - 1e-12))
    throw config_error("check_ls_criterion: unsupported: s below n/(n-p)");
  if (ladder.size() < 2)
    throw config_error("check_ls_criterion: need at least 2 rungs");
  RadialGauge gauge(grid.chart(), x0);
  if (!(0.0 < eps0 && eps0 <= gauge.max_radius()))
    throw domain_error("check_ls_criterion: eps0 outside the patch");

  LsReport rep;
  rep.q_norm = grid_ls_norm(Q, x0, s, eps0, grid, gauge, &rep.clamped);
  GridDomain fine(grid.chart(), 2 * grid.resolution());
  const double norm_fine = grid_ls_norm(Q, x0, s, eps0, fine, gauge, nullptr);
  rep.refine_ratio = norm_fine / rep.q_norm;
  rep.q_norm_stable = std::isfinite(rep.q_norm) && std::isfinite(norm_fine) &&
                      rep.refine_ratio <= 1.2;
  if (!rep.q_norm_stable) {
    rep.verdict = LsVerdict::NotApplicable;
    return rep;
  }

  const double q = s / (s - 1.0);  // Hoelder conjugate of the norm exponent
  auto area = [&](double t) {
    return gauge.sphere_integral([](const Vec&) { return 1.0; }, t);
  };
  const PsiFamily rec = PsiFamily::reciprocal();
  for (double e : sorted_desc(ladder)) {
    if (!(0.0 < e && e < eps0))
      throw domain_error("check_ls_criterion: rung outside (0, eps0)");
    LsRow row;
    row.eps = e;
    row.radial = std::pow(
        integrate_1d([&](double t) { return std::pow(t, -p * q) * area(t); },
                     e, eps0),
        1.0 / q);
    row.I = rec.integral(e, eps0);
    row.ratio = row.radial * rep.q_norm / std::pow(row.I, p);
    rep.rows.push_back(row);
  }

  const std::size_t k = rep.rows.size();
  const std::size_t tail = std::min<std::size_t>(4, k - 1);
  bool decreasing = true;
  for (std::size_t i = k - tail; i < k; ++i)
    decreasing &= rep.rows[i].ratio <= rep.rows[i - 1].ratio * (1.0 + 1e-12);
  const bool shrank = rep.rows.back().ratio < rep.rows.front().ratio;
  rep.verdict = (decreasing && shrank) ? LsVerdict::Pass : LsVerdict::Inconclusive;
  return rep;
}

// ---------------------------------------------------------------------------

void EquiReport::write_csv(const std::string& path) const {
  auto out = open_csv(path, "EquiReport");
  out << "mapping,eps,omega,included\n";
  for (const auto& row : mappings) {
    if (row.omega.empty()) {
      out << '"' << row.label << "\",,," << 0 << '\n';
      continue;
    }
    for (std::size_t i = 0; i < eps.size(); ++i)
      out << '"' << row.label << "\"," << eps[i] << ',' << row.omega[i] << ','
          << 1 << '\n';
  }
  for (std::size_t i = 0; i < sup_omega.size(); ++i)
    out << "\"sup\"," << eps[i] << ',' << sup_omega[i] << ",1\n";
}

EquiReport run_equicontinuity_experiment(const std::vector<MappingSpec>& family,
                                         const QField& q_budget, const Vec& x0,
                                         double p,
                                         const std::vector<double>& ladder,
                                         const EquiOptions& opts) {
  if (family.empty())
    throw config_error("run_equicontinuity_experiment: empty family");
  if (ladder.empty())
    throw config_error("run_equicontinuity_experiment: empty ladder");

  EquiReport rep;
  rep.eps = sorted_desc(ladder);
  rep.sigma = opts.sigma;

  for (const auto& f : family) {
    EquiMapRow row;
    row.label = f.label();

    GridDomain sgrid(f.source(), opts.resolution);
    row.est_q = estimate_minimal_constant_Q(f, x0, p, {opts.radii}, sgrid,
                                            opts.count, opts.seed);

    // Budget screen: the constant estimate must sit under the budget field
    // everywhere, probed on spheres of the screening ring.
    RadialGauge gauge(f.source(), x0);
    const SphereRule rule = make_sphere_rule(f.source().dim(), 64);
    double budget_min = std::numeric_limits<double>::infinity();
    for (double r : {opts.radii.first, 0.5 * (opts.radii.first + opts.radii.second),
                     opts.radii.second})
      for (const auto& dir : rule.dirs)
        budget_min = std::min(budget_min, q_budget.at(gauge.point_at(r, dir)));

    std::ostringstream notice;
    if (row.est_q > budget_min * (1.0 + opts.screen_tol)) {
      notice << "estimated minimal weight " << row.est_q
             << " exceeds the budget " << budget_min;
    } else if (!f.has_omitted_continuum()) {
      notice << "no omitted continuum declared";
    } else {
      row.omitted_diam = polyline_diam(f.omitted_continuum(), f.target());
      if (row.omitted_diam < opts.delta)
        notice << "omitted continuum diameter " << row.omitted_diam
               << " below required " << opts.delta;
    }
    row.notice = notice.str();
    row.included = row.notice.empty();

    if (row.included) {
      auto pts = modulus_of_continuity(f, x0, rep.eps);
      for (const auto& pt : pts) row.omega.push_back(pt.omega);
      const double g0 = row.omega.front() / rep.eps.front();
      const double g1 = row.omega.back() / rep.eps.back();
      row.gehring_growth = g0 > 0.0 ? g1 / g0 : 0.0;
    }
    rep.mappings.push_back(std::move(row));
  }

  rep.sup_omega.assign(rep.eps.size(), 0.0);
  bool any_included = false;
  for (const auto& row : rep.mappings) {
    if (!row.included) continue;
    any_included = true;
    for (std::size_t i = 0; i < rep.eps.size(); ++i)
      rep.sup_omega[i] = std::max(rep.sup_omega[i], row.omega[i]);
  }

  rep.sup_decreasing = any_included;
  for (std::size_t i = 1; i < rep.sup_omega.size(); ++i)
    rep.sup_decreasing &=
        rep.sup_omega[i] <= rep.sup_omega[i - 1] * (1.0 + 1e-9);
  rep.sigma_ok = any_included && rep.sup_omega.back() <= opts.sigma;
  rep.pass = rep.sup_decreasing && rep.sigma_ok;

  if (!opts.report_csv.empty()) rep.write_csv(opts.report_csv);
  return rep;
}

// ---------------------------------------------------------------------------

void LoewnerReport::write_csv(const std::string& path) const {
  auto out = open_csv(path, "LoewnerReport");
  out << "pair,modulus,diam_E,diam_F,rho\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    out << i << ',' << rows[i].modulus << ',' << rows[i].diam_e << ','
        << rows[i].diam_f << ',' << rows[i].rho << '\n';
}

namespace {

LoewnerRow solve_pair(const std::vector<Vec>& E, const std::vector<Vec>& F,
                      double p, const GridDomain& grid, int count,
                      std::uint64_t seed, const RadialGauge& gauge, double R,
                      const SolveOptions& solve) {
  if (E.empty() || F.empty())
    throw domain_error("check_loewner_bound: empty continuum");
  for (const auto& v : E)
    if (gauge.radius_of(v) > R * (1.0 + 1e-12))
      throw domain_error("check_loewner_bound: continuum escapes the ball");
  for (const auto& v : F)
    if (gauge.radius_of(v) > R * (1.0 + 1e-12))
      throw domain_error("check_loewner_bound: continuum escapes the ball");
  if (polyline_distance(E, F) <= 1e-12)
    throw domain_error("check_loewner_bound: continua intersect");

  const int n = grid.chart().dim();
  LoewnerRow row;
  row.diam_e = polyline_diam(E, grid.chart());
  row.diam_f = polyline_diam(F, grid.chart());
  auto fam = generate_connecting_family(E, F, grid.chart(), count, seed);
  row.modulus = compute_modulus(fam, p, grid, solve).value;
  row.rho = row.modulus * std::pow(R, 1.0 + p - n) /
            std::min(row.diam_e, row.diam_f);
  return row;
}

}  // namespace

LoewnerReport check_loewner_bound(const std::vector<ContinuumPair>& pairs,
                                  double p, const GridDomain& grid, int count,
                                  std::uint64_t seed, const Vec& x0, double R,
                                  const SolveOptions& solve) {
  if (pairs.empty()) throw config_error("check_loewner_bound: no pairs");
  if (!(R > 0.0)) throw config_error("check_loewner_bound: R must be positive");
  RadialGauge gauge(grid.chart(), x0);

  LoewnerReport rep;
  rep.inv_c = std::numeric_limits<double>::infinity();
  for (const auto& pr : pairs) {
    auto row = solve_pair(pr.E, pr.F, p, grid, count, seed, gauge, R, solve);
    rep.inv_c = std::min(rep.inv_c, row.rho);
    rep.rows.push_back(row);
  }
  rep.positive = rep.inv_c > 0.0;

  // Shrink the first pair by half about the center and compare rho.
  auto scale = [&](const std::vector<Vec>& P) {
    std::vector<Vec> out;
    out.reserve(P.size());
    for (const auto& v : P) out.push_back(x0 + 0.5 * (v - x0));
    return out;
  };
  auto scaled = solve_pair(scale(pairs[0].E), scale(pairs[0].F), p, grid,
                           count, seed, gauge, R, solve);
  rep.rescale_ratio = scaled.rho / rep.rows[0].rho;
  rep.rescale_stable =
      rep.rescale_ratio >= 1.0 / 3.0 && rep.rescale_ratio <= 3.0;
  return rep;
}

}  // namespace modp

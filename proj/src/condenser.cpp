#include "modp/condenser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "modp/curves.hpp"

namespace modp {

namespace {

// Chart-coordinate width of the spherical gap along the +/- axis rays; the
// grid must resolve it to keep the two boundary spheres in separate cells.
double min_gap_chart(const RadialGauge& gauge, double r1, double r2) {
  const int n = gauge.chart().dim();
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    for (double sgn : {-1.0, 1.0}) {
      Vec theta = Vec::Zero(n);
      theta[a] = sgn;
      gap = std::min(gap, gauge.chart_radius(theta, r2) -
                              gauge.chart_radius(theta, r1));
    }
  }
  return gap;
}

}  // namespace

ModulusResult capacity(const Condenser& cond, double p, const GridDomain& grid,
                       int count, std::uint64_t seed,
                       const SolveOptions& opts) {
  if (min_gap_chart(cond.gauge(), cond.eps(), cond.eps0()) <
      grid.min_cell_edge())
    throw domain_error("capacity: gap between C and the boundary of A is "
                       "below one grid cell");
  auto family = generate_annulus_family(cond.ring(), count, seed);
  return compute_modulus(family, p, grid, opts);
}

void CapacityBoundReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw config_error("CapacityBoundReport: cannot open " + path);
  out << "eps,I,F,RHS,LHS,pass\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.eps << ',' << r.I << ',' << r.F << ',' << r.rhs << ',' << r.lhs
        << ',' << (r.pass ? 1 : 0) << '\n';
}

CapacityBoundReport check_capacity_bound(const MappingSpec& f, const Condenser& cond,
                                const QField& Q, double p,
                                const PsiFamily& psi,
                                const std::vector<double>& eps_list,
                                const CapacityBoundOptions& opts) {
  if (eps_list.empty())
    throw config_error("check_capacity_bound: empty eps list");
  if (!(p > 1.0)) throw config_error("check_capacity_bound: p must be > 1");
  const double eps0 = cond.eps0();
  const int n = cond.chart().dim();
  const RadialGauge& gauge = cond.gauge();
  GridDomain target_grid(f.target(), opts.resolution);

  CapacityBoundReport rep;
  rep.tol = opts.tol;
  rep.all_pass = true;
  for (double eps : eps_list) {
    if (!(0.0 < eps && eps < eps0))
      throw domain_error("check_capacity_bound: eps must lie in (0, eps0)");
    CapacityBoundRow row;
    row.eps = eps;
    row.I = psi.integral(eps, eps0);
    row.F = integrate_1d(
        [&](double t) {
          const double ps = psi(t);
          if (ps == 0.0) return 0.0;
          return std::pow(ps, p) *
                 gauge.sphere_integral([&Q](const Vec& x) { return Q.at(x); },
                                       t);
        },
        eps, eps0);
    row.rhs = row.F / std::pow(row.I, p);
    row.rhs_alt = row.F / std::pow(row.I, n);

    GeodesicAnnulus sub(cond.chart(), cond.x0(), eps, eps0);
    auto family = generate_annulus_family(sub, opts.count, opts.seed);
    auto image = pushforward(family, f);
    row.lhs = compute_modulus(image, p, target_grid, opts.solve).value;

    if (row.rhs > 0.0) {
      row.pass = row.lhs <= row.rhs * (1.0 + opts.tol);
    } else {
      rep.degenerate_q = true;
      row.pass = row.lhs <= opts.tol;
    }
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }

  // Trends along decreasing eps (widening ring).
  auto sorted = rep.rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const CapacityBoundRow& a, const CapacityBoundRow& b) { return a.eps > b.eps; });
  rep.lhs_decreasing = rep.ratio_p_decreasing = rep.ratio_n_decreasing =
      sorted.size() > 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double slack = 1.0 + opts.tol;
    rep.lhs_decreasing &= sorted[i].lhs <= sorted[i - 1].lhs * slack;
    rep.ratio_p_decreasing &= sorted[i].rhs <= sorted[i - 1].rhs * slack;
    rep.ratio_n_decreasing &= sorted[i].rhs_alt <= sorted[i - 1].rhs_alt * slack;
  }

  if (!opts.report_csv.empty()) rep.write_csv(opts.report_csv);
  return rep;
}

}  // namespace modp

#include "modp/ringmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "modp/curves.hpp"
#include "modp/psi.hpp"

namespace modp {

void RingVerifyReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw config_error("RingVerifyReport: cannot open " + path);
  out << "eta,eta_integral,LHS,RHS,pass\n";
  out.precision(17);
  for (const auto& r : rows)
    out << '"' << r.eta << "\"," << r.eta_integral << ',' << r.lhs << ','
        << r.rhs << ',' << (r.pass ? 1 : 0) << '\n';
}

RingVerifyReport verify_ring_inequality(
    const MappingSpec& f, const Vec& x0, const QField& Q, double p, double r1,
    double r2, const std::vector<EtaProfile>& etas,
    const GridDomain& target_grid, int count, std::uint64_t seed, double tol,
    const SolveOptions& solve, const std::string& report_csv) {
  if (etas.empty()) throw config_error("verify_ring_inequality: no profiles");
  if (!(p > 1.0)) throw config_error("verify_ring_inequality: p must be > 1");

  GeodesicAnnulus ann(f.source(), x0, r1, r2);
  const RadialGauge& gauge = ann.gauge();

  // Reject malformed competitors before paying for the solve.
  for (const auto& eta : etas)
    if (eta.integral() < 1.0 - tol)
      throw domain_error("verify_ring_inequality: profile '" + eta.label() +
                         "' has integral below 1");

  auto family = generate_annulus_family(ann, count, seed);
  auto image = pushforward(family, f);
  const double lhs = compute_modulus(image, p, target_grid, solve).value;

  RingVerifyReport rep;
  rep.tol = tol;
  rep.all_pass = true;
  for (const auto& eta : etas) {
    RingVerifyRow row;
    row.eta = eta.label();
    row.eta_integral = eta.integral();
    row.lhs = lhs;
    // RHS = int_A Q eta^p dv = sum over the step partition of
    // eta_i^p * int_{cell} (sphere integral of Q) dt, midpoint rule in t.
    std::vector<double> terms(static_cast<std::size_t>(eta.cell_count()), 0.0);
    for (int i = 0; i < eta.cell_count(); ++i) {
      const double v = eta.sample(i);
      if (v == 0.0) continue;
      const double t = eta.cell_mid(i);
      terms[static_cast<std::size_t>(i)] =
          std::pow(v, p) *
          gauge.sphere_integral([&Q](const Vec& x) { return Q.at(x); }, t) *
          eta.cell_width();
    }
    row.rhs = pairwise_sum(terms);
    row.pass = row.lhs <= row.rhs * (1.0 + tol);
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  if (!report_csv.empty()) rep.write_csv(report_csv);
  return rep;
}

std::vector<EtaProfile> standard_eta_battery(
    double r1, double r2, int n, double p, std::uint64_t seed,
    const std::function<double(double)>& radial_weight) {
  std::vector<EtaProfile> out;
  if (radial_weight)
    out.push_back(EtaProfile::extremal_weighted(r1, r2, n, p, radial_weight));
  else
    out.push_back(EtaProfile::extremal(r1, r2, n, p));
  out.push_back(EtaProfile::uniform(r1, r2));
  out.push_back(EtaProfile::random_step(r1, r2, 24, seed));
  out.push_back(EtaProfile::random_step(r1, r2, 24, seed + 1));
  return out;
}

double estimate_minimal_constant_Q(
    const MappingSpec& f, const Vec& x0, double p,
    const std::vector<std::pair<double, double>>& radii,
    const GridDomain& source_grid, int count, std::uint64_t seed,
    const SolveOptions& solve) {
  if (radii.empty())
    throw config_error("estimate_minimal_constant_Q: no radius pairs");
  GridDomain target_grid(f.target(), source_grid.resolution());
  double sup = 0.0;
  for (const auto& [r1, r2] : radii) {
    GeodesicAnnulus ann(f.source(), x0, r1, r2);  // validates the pair
    auto family = generate_annulus_family(ann, count, seed);
    const double m_src = compute_modulus(family, p, source_grid, solve).value;
    if (m_src <= 0.0)
      throw domain_error("estimate_minimal_constant_Q: degenerate source modulus");
    auto image = pushforward(family, f);
    const double m_img = compute_modulus(image, p, target_grid, solve).value;
    sup = std::max(sup, m_img / m_src);
  }
  return sup;
}

std::vector<OmegaPoint> modulus_of_continuity(const MappingSpec& f,
                                              const Vec& x0,
                                              const std::vector<double>& eps_list) {
  const int n = f.source().dim();
  RadialGauge src_gauge(f.source(), x0);
  RadialGauge tgt_gauge(f.target(), f.apply(x0));
  const SphereRule rule = make_sphere_rule(n);

  std::vector<OmegaPoint> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) {
    if (eps < 0.0)
      throw domain_error("modulus_of_continuity: negative radius");
    OmegaPoint pt;
    pt.eps = eps;
    if (eps > 0.0) {
      if (eps > src_gauge.max_radius())
        throw domain_error("modulus_of_continuity: eps beyond the patch guard");
      double w = 0.0;
      for (const auto& dir : rule.dirs) {
        const Vec y = f.apply(src_gauge.point_at(eps, dir));
        w = std::max(w, tgt_gauge.radius_of(y));
      }
      pt.omega = w;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace modp

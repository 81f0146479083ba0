#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "modp/ringmap.hpp"
#include "modp/util.hpp"

using namespace modp;

namespace {

MetricChart plane(double half) {
  return MetricChart::euclidean(2, Box::cube(2, half));
}

Vec origin2() { return make_vec({0.0, 0.0}); }
Vec origin3() { return make_vec({0.0, 0.0, 0.0}); }

}  // namespace

TEST_CASE("eta battery: normalization and shapes") {
  auto battery = standard_eta_battery(1.0, std::exp(1.0), 2, 2.0, 5);
  REQUIRE(battery.size() == 4);
  for (const auto& eta : battery) {
    CAPTURE(eta.label());
    CHECK(eta.integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eta.at(0.5) == 0.0);   // outside (r1, r2)
    CHECK(eta.at(3.0) == 0.0);
  }
  // The extremal profile for n = p = 2 is proportional to 1/t: normalized on
  // (1, e) it is exactly 1/t. Values are midpoint step samples over 2048
  // cells, so shapes agree to O(h) ~ 1e-3, not machine precision.
  const auto& ext = battery[0];
  CHECK(ext.at(1.5) == doctest::Approx(1.0 / 1.5).epsilon(1e-3));
  CHECK(ext.at(2.0) == doctest::Approx(0.5).epsilon(1e-3));

  // A weighted battery reshapes the extremal member but stays normalized.
  auto weighted = standard_eta_battery(1.0, std::exp(1.0), 2, 2.0, 5,
                                       [](double t) { return t; });
  CHECK(weighted[0].integral() == doctest::Approx(1.0).epsilon(1e-12));
  // weight t: profile ~ t^{-1} t^{-1} = t^{-2}, normalized by 1 - 1/e.
  const double c = 1.0 - std::exp(-1.0);
  CHECK(weighted[0].at(2.0) == doctest::Approx(0.25 / c).epsilon(1e-3));
}

TEST_CASE("ring inequality holds for the identity with unit weight") {
  // f = id, Q = 1: LHS = M_2(annulus family) <= 2 pi = RHS for the extremal
  // eta, with the solved LHS a lower estimate of the continuum value 2 pi.
  auto chart = plane(2.9);
  auto f = MappingSpec::identity(chart);
  GridDomain grid(chart, 192);
  auto etas = standard_eta_battery(1.0, std::exp(1.0), 2, 2.0, 3);

  auto rep = verify_ring_inequality(f, origin2(), QField::constant(1.0), 2.0,
                                    1.0, std::exp(1.0), etas, grid, 2048, 7);
  REQUIRE(rep.rows.size() == etas.size());
  CHECK(rep.all_pass);

  // Extremal eta at Q = 1, p = n: RHS = 2 pi exactly; the solved LHS sits in
  // [0.9, 1.0] of it at this sampling density.
  const auto& ext = rep.rows[0];
  CHECK(ext.rhs == doctest::Approx(2.0 * kPi).epsilon(1e-6));
  CHECK(ext.lhs >= 0.90 * ext.rhs);
  CHECK(ext.lhs <= 1.0001 * ext.rhs);

  // The uniform profile is a strictly worse competitor: larger RHS, same LHS.
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    CAPTURE(rep.rows[i].eta);
    CHECK(rep.rows[i].rhs >= ext.rhs * (1.0 - 1e-9));
    CHECK(rep.rows[i].lhs == doctest::Approx(ext.lhs).epsilon(1e-12));
    CHECK(rep.rows[i].pass);
  }
}

TEST_CASE("ring inequality separates admissible from short weights") {
  // For f(x) = x |x|^{alpha-1}, alpha = 1/2, p = n = 2 the least admissible
  // constant weight is 1/alpha = 2: Q = 2 passes the battery, Q = 1.9 fails
  // on the extremal profile.
  auto chart = plane(2.9);
  auto f = MappingSpec::radial_stretch(chart, 0.5, origin2());
  GridDomain grid(chart, 256);
  auto etas = standard_eta_battery(1.0, std::exp(1.0), 2, 2.0, 3);

  SolveOptions solve;
  solve.tol = 1e-5;

  auto pass_rep =
      verify_ring_inequality(f, origin2(), QField::constant(2.0), 2.0, 1.0,
                             std::exp(1.0), etas, grid, 4096, 7, 0.02, solve);
  CHECK(pass_rep.all_pass);

  std::vector<EtaProfile> extremal_only{etas[0]};
  auto fail_rep =
      verify_ring_inequality(f, origin2(), QField::constant(1.9), 2.0, 1.0,
                             std::exp(1.0), extremal_only, grid, 4096, 7, 0.02,
                             solve);
  REQUIRE(fail_rep.rows.size() == 1);
  CHECK_FALSE(fail_rep.rows[0].pass);
  CHECK_FALSE(fail_rep.all_pass);
  // Continuum values: LHS = 2 pi / alpha = 4 pi and extremal RHS = 2 pi Q.
  // Q = 2 is the equality case (the sampled LHS sits just below), Q = 1.9
  // leaves the right side 5% short, beyond the 2% verdict slack.
  CHECK(fail_rep.rows[0].lhs > fail_rep.rows[0].rhs * 1.02);
}

TEST_CASE("ring verifier rejects unnormalized competitors") {
  auto chart = plane(2.9);
  auto f = MappingSpec::identity(chart);
  GridDomain grid(chart, 64);

  auto short_eta = EtaProfile::from_samples(
      1.0, 2.0, std::vector<double>(EtaProfile::kSamples, 0.5), "short", false);
  CHECK(short_eta.integral() == doctest::Approx(0.5));
  CHECK_THROWS_AS(
      verify_ring_inequality(f, origin2(), QField::constant(1.0), 2.0, 1.0, 2.0,
                             {short_eta}, grid, 64, 1),
      domain_error);

  auto zero_eta = EtaProfile::from_samples(
      1.0, 2.0, std::vector<double>(EtaProfile::kSamples, 0.0), "zero", false);
  CHECK_THROWS_AS(
      verify_ring_inequality(f, origin2(), QField::constant(1.0), 2.0, 1.0, 2.0,
                             {zero_eta}, grid, 64, 1),
      domain_error);
}

TEST_CASE("ring verifier writes its report") {
  auto chart = plane(2.9);
  auto f = MappingSpec::identity(chart);
  GridDomain grid(chart, 96);
  auto etas = standard_eta_battery(1.0, 2.0, 2, 2.0, 3);
  auto path =
      (std::filesystem::temp_directory_path() / "ring_verify.csv").string();

  auto rep = verify_ring_inequality(f, origin2(), QField::constant(1.0), 2.0,
                                    1.0, 2.0, etas, grid, 256, 1, 0.02, {},
                                    path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "eta,eta_integral,LHS,RHS,pass");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(rep.rows.size()));
  std::filesystem::remove(path);
}

TEST_CASE("least admissible constant weight of plane stretches") {
  // For f(x) = x |x|^{alpha-1} at p = n the modulus ratio is alpha^{1-n}
  // = 1/alpha on every annulus, so the estimate is radius-independent.
  auto chart = plane(2.9);
  GridDomain grid(chart, 256);
  std::vector<std::pair<double, double>> radii{{1.0, 2.0}, {1.0, std::exp(1.0)}};

  SolveOptions solve;
  solve.tol = 1e-5;

  for (double alpha : {0.3, 0.5, 0.8}) {
    CAPTURE(alpha);
    // Image of the outer sphere has radius e^alpha <= 2.72^0.8 < 2.9: the
    // image families stay inside the same chart box.
    auto f = MappingSpec::radial_stretch(chart, alpha, origin2());
    double est = estimate_minimal_constant_Q(f, origin2(), 2.0, radii, grid,
                                             4096, 17, solve);
    CHECK(est == doctest::Approx(1.0 / alpha).epsilon(0.05));
  }

  auto id = MappingSpec::identity(chart);
  double est = estimate_minimal_constant_Q(id, origin2(), 2.0, radii, grid,
                                           4096, 17, solve);
  CHECK(est == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("least admissible constant weight of a space stretch") {
  // n = 3, p = 3, alpha = 1/2: ratio alpha^{1-n} = 4. Wide band (0.35, 2):
  // thin image rings bias the image solve upward, so the band is kept thick
  // relative to the grid cell.
  auto chart = MetricChart::euclidean(3, Box::cube(3, 2.14));
  GridDomain grid(chart, 64);
  auto f = MappingSpec::radial_stretch(chart, 0.5, origin3());

  SolveOptions solve;
  solve.tol = 1e-4;
  solve.polish = 0;

  std::vector<std::pair<double, double>> radii{{0.35, 2.0}};
  double est = estimate_minimal_constant_Q(f, origin3(), 3.0, radii, grid,
                                           32768, 17, solve);
  CHECK(est == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("modulus of continuity of radial maps") {
  auto chart = plane(2.9);
  std::vector<double> eps{1e-1, 1e-2, 1e-3};

  auto id = MappingSpec::identity(chart);
  auto pts = modulus_of_continuity(id, origin2(), eps);
  REQUIRE(pts.size() == eps.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].eps == eps[i]);
    CHECK(pts[i].omega == doctest::Approx(eps[i]).epsilon(1e-12));
  }

  auto f = MappingSpec::radial_stretch(chart, 0.5, origin2());
  pts = modulus_of_continuity(f, origin2(), eps);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(pts[i].omega ==
          doctest::Approx(std::pow(eps[i], 0.5)).epsilon(1e-10));

  auto zero = modulus_of_continuity(id, origin2(), {0.0});
  CHECK(zero[0].omega == 0.0);

  CHECK_THROWS_AS(modulus_of_continuity(id, origin2(), {-0.1}), domain_error);
  CHECK_THROWS_AS(modulus_of_continuity(id, origin2(), {5.0}), domain_error);
}

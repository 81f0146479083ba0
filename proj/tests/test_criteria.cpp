#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "modp/criteria.hpp"
#include "modp/util.hpp"

using namespace modp;

namespace {

MetricChart plane(double half) {
  return MetricChart::euclidean(2, Box::cube(2, half));
}

Vec origin2() { return make_vec({0.0, 0.0}); }

std::string read_header(const std::string& path) {
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  return header;
}

}  // namespace

TEST_CASE("eps ladders are geometric and validated") {
  auto ladder = make_eps_ladder(1.0, 12);
  REQUIRE(ladder.size() == 12);
  for (int i = 0; i < 12; ++i)
    CHECK(ladder[i] == doctest::Approx(std::pow(0.5, i + 1)).epsilon(1e-14));

  auto decade = make_eps_ladder(0.1, 6, 0.1);
  CHECK(decade.front() == doctest::Approx(1e-2));
  CHECK(decade.back() == doctest::Approx(1e-7));

  CHECK_THROWS_AS(make_eps_ladder(0.0, 4), config_error);
  CHECK_THROWS_AS(make_eps_ladder(1.0, 0), config_error);
  CHECK_THROWS_AS(make_eps_ladder(1.0, 4, 1.0), config_error);
  CHECK_THROWS_AS(make_eps_ladder(1.0, 4, -0.5), config_error);
}

TEST_CASE("mean oscillation: constant, log singularity, power singularity") {
  GridDomain grid(plane(1.1), 128);
  auto ladder = make_eps_ladder(1.0, 12);

  SUBCASE("constant weights oscillate by rounding only") {
    auto rep = check_fmo(QField::constant(5.0), origin2(), grid, ladder);
    CHECK(rep.verdict == FmoVerdict::FMO);
    CHECK(rep.slope == 0.0);
    CHECK_FALSE(rep.clamped);
    for (double v : rep.m) CHECK(v <= 5e-12);
  }

  SUBCASE("log(1/|x|) has mean oscillation exactly 1/e on every ball") {
    // Ball average of log(1/|x|) over B(0,eps) is log(1/eps) + 1/2; the
    // oscillation integral telescopes to 1/e independently of eps.
    auto rep = check_fmo(QField::expression("log(1/r)"), origin2(), grid, ladder);
    REQUIRE(rep.m.size() == ladder.size());
    for (std::size_t i = 0; i < rep.m.size(); ++i) {
      CAPTURE(rep.eps[i]);
      CHECK(rep.mean[i] ==
            doctest::Approx(std::log(1.0 / rep.eps[i]) + 0.5).epsilon(1e-8));
      CHECK(rep.m[i] == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    }
    CHECK(std::abs(rep.slope) <= 1e-5);
    CHECK(rep.verdict == FmoVerdict::FMO);
  }

  SUBCASE("1/|x| has mean oscillation exactly 1/eps") {
    auto rep = check_fmo(QField::expression("1/r"), origin2(), grid, ladder);
    for (std::size_t i = 0; i < rep.m.size(); ++i) {
      CAPTURE(rep.eps[i]);
      CHECK(rep.mean[i] == doctest::Approx(2.0 / rep.eps[i]).epsilon(1e-8));
      CHECK(rep.m[i] == doctest::Approx(1.0 / rep.eps[i]).epsilon(1e-6));
    }
    CHECK(rep.slope == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rep.verdict == FmoVerdict::NotFMO);
  }

  SUBCASE("rungs outside the patch are rejected") {
    CHECK_THROWS_AS(check_fmo(QField::constant(1.0), origin2(), grid, {2.0}),
                    domain_error);
    CHECK_THROWS_AS(check_fmo(QField::constant(1.0), origin2(), grid, {}),
                    config_error);
  }

  SUBCASE("report columns") {
    auto rep = check_fmo(QField::constant(1.0), origin2(), grid,
                         make_eps_ladder(1.0, 5));
    auto path = (std::filesystem::temp_directory_path() / "fmo.csv").string();
    rep.write_csv(path);
    CHECK(read_header(path) == "eps,mean,m");
    std::filesystem::remove(path);
  }
}

TEST_CASE("divergence integral: unit weight diverges, strong decay converges") {
  auto chart = plane(0.6);
  const double delta = 0.5;
  auto ladder = make_eps_ladder(0.5, 16);

  SUBCASE("Q = 1 accumulates (1/2pi) log(delta/eps)") {
    auto rep = check_divergence_criterion(QField::constant(1.0), origin2(), 2.0,
                                          2, delta, ladder, chart);
    REQUIRE(rep.T.size() == ladder.size());
    for (std::size_t i = 0; i < rep.T.size(); ++i) {
      CAPTURE(rep.eps[i]);
      const double exact = std::log(delta / rep.eps[i]) / (2.0 * kPi);
      CHECK(rep.T[i] == doctest::Approx(exact).epsilon(1e-8));
    }
    CHECK(rep.verdict == DivergenceVerdict::Divergent);
  }

  SUBCASE("Q = |x|^{-1/2} converges to (sqrt(delta) - sqrt(eps))/pi") {
    auto rep = check_divergence_criterion(QField::expression("r^(-0.5)"),
                                          origin2(), 2.0, 2, delta, ladder,
                                          chart);
    const double expect =
        (std::sqrt(delta) - std::sqrt(rep.eps.back())) / kPi;
    CHECK(rep.T.back() == doctest::Approx(expect).epsilon(1e-8));
    CHECK(rep.verdict == DivergenceVerdict::Convergent);
  }

  SUBCASE("Q = log(1/|x|) diverges like log log, visible on a decade ladder") {
    // On the half-ladder the four-halving tail ratio is only ~1.10; the
    // wider decade ladder pushes it past the 1.2 verdict threshold.
    auto rep = check_divergence_criterion(QField::expression("log(1/r)"),
                                          origin2(), 2.0, 2, delta,
                                          make_eps_ladder(0.5, 8, 0.1), chart);
    CHECK(rep.verdict == DivergenceVerdict::Divergent);

    auto half = check_divergence_criterion(QField::expression("log(1/r)"),
                                           origin2(), 2.0, 2, delta, ladder,
                                           chart);
    CHECK(half.verdict == DivergenceVerdict::Inconclusive);
  }

  SUBCASE("configuration errors") {
    CHECK_THROWS_AS(
        check_divergence_criterion(QField::constant(1.0), origin2(), 2.0, 2,
                                   delta, make_eps_ladder(0.5, 4), chart),
        config_error);
    CHECK_THROWS_AS(
        check_divergence_criterion(QField::constant(1.0), origin2(), 1.0, 2,
                                   delta, ladder, chart),
        config_error);
    CHECK_THROWS_AS(
        check_divergence_criterion(QField::constant(1.0), origin2(), 2.0, 3,
                                   delta, ladder, chart),
        config_error);
    // Rung at or above delta.
    CHECK_THROWS_AS(
        check_divergence_criterion(QField::constant(1.0), origin2(), 2.0, 2,
                                   0.2, ladder, chart),
        domain_error);
  }
}

TEST_CASE("log-power growth: unit weight passes with the expected ratios") {
  auto chart = plane(1.1);
  const double eps0 = 0.1;
  auto ladder = make_eps_ladder(0.1, 6, 0.1);  // 1e-2 .. 1e-7

  auto rep = log_power_growth_check(QField::constant(1.0), origin2(), 2, 2.0,
                                    eps0, ladder, chart);
  REQUIRE(rep.rows.size() == 6);

  // Closed forms at Q = 1, n = p = 2, with L(t) = log(1/t):
  //   F(eps) = 2 pi (1/L(eps0) - 1/L(eps)),  I(eps) = log(L(eps)/L(eps0)).
  for (const auto& row : rep.rows) {
    CAPTURE(row.eps);
    const double L0 = std::log(1.0 / eps0), L = std::log(1.0 / row.eps);
    const double Fc = 2.0 * kPi * (1.0 / L0 - 1.0 / L);
    const double Ic = std::log(L / L0);
    CHECK(row.F == doctest::Approx(Fc).epsilon(1e-8));
    CHECK(row.I == doctest::Approx(Ic).epsilon(1e-8));
    CHECK(row.ratio_p == doctest::Approx(Fc / (Ic * Ic)).epsilon(1e-8));
    CHECK(row.ratio_loglog ==
          doctest::Approx(Fc / std::log(L)).epsilon(1e-8));
    // F grows like log log(1/eps): the normalized ratio stays in a narrow
    // frozen band (0.8414 at 1e-7, peak 0.9413 at 1e-3) across five decades.
    CHECK(row.ratio_loglog >= 0.84);
    CHECK(row.ratio_loglog <= 0.95);
  }
  CHECK(rep.rows.front().ratio_p == doctest::Approx(2.8397).epsilon(1e-3));
  CHECK(rep.rows.back().ratio_p == doctest::Approx(0.6181).epsilon(1e-3));
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    CHECK(rep.rows[i].ratio_p < rep.rows[i - 1].ratio_p);
  CHECK(rep.loglog_bounded);
  CHECK(rep.tail_decreasing);
  CHECK(rep.pass);

  SUBCASE("zero weight is trivially dominated") {
    auto zero = log_power_growth_check(QField::constant(0.0), origin2(), 2, 2.0,
                                       eps0, ladder, chart);
    CHECK(zero.pass);
    for (const auto& row : zero.rows) CHECK(row.F == 0.0);
  }

  SUBCASE("configuration errors") {
    CHECK_THROWS_AS(
        log_power_growth_check(QField::constant(1.0), origin2(), 2, 2.0, eps0,
                               make_eps_ladder(0.1, 5, 0.1), chart),
        config_error);
    CHECK_THROWS_AS(
        log_power_growth_check(QField::constant(1.0), origin2(), 2, 2.0, 1.5,
                               ladder, chart),
        domain_error);
    // Rungs must lie below 1/e for log log to be positive.
    CHECK_THROWS_AS(
        log_power_growth_check(QField::constant(1.0), origin2(), 2, 2.0, 0.9,
                               make_eps_ladder(0.9, 6, 0.9), chart),
        domain_error);
  }

  SUBCASE("report columns") {
    auto path = (std::filesystem::temp_directory_path() / "growth.csv").string();
    rep.write_csv(path);
    CHECK(read_header(path) == "eps,F,I,F_over_loglog,F_over_Ip,F_over_I");
    std::filesystem::remove(path);
  }
}

TEST_CASE("L^s route: integrable weights pass, |x|^{-1} refuses to stabilize") {
  GridDomain grid(plane(1.1), 128);
  const double eps0 = 0.5;
  auto ladder = make_eps_ladder(0.1, 6, 0.5);

  SUBCASE("unit weight") {
    auto rep = check_ls_criterion(QField::constant(1.0), origin2(), 2, 1.5, 4.0,
                                  eps0, ladder, grid);
    CHECK(rep.q_norm ==
          doctest::Approx(std::pow(kPi * 0.25, 0.25)).epsilon(0.05));
    CHECK(rep.q_norm_stable);
    CHECK(rep.verdict == LsVerdict::Pass);
    // ratio ~ L^{-3/4}: strictly decreasing down the ladder.
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      CHECK(rep.rows[i].ratio < rep.rows[i - 1].ratio);
  }

  SUBCASE("integrable power singularity") {
    auto rep = check_ls_criterion(QField::expression("r^(-0.4)"), origin2(), 2,
                                  1.5, 4.0, eps0, ladder, grid);
    CHECK(rep.q_norm_stable);
    CHECK(rep.refine_ratio <= 1.1);
    CHECK(rep.verdict == LsVerdict::Pass);
  }

  SUBCASE("non-integrable fourth power") {
    // int |x|^{-4} over the ball scales like h^{-2} under the one-cell
    // clamp: the refinement guard reports the norm as unusable.
    auto rep = check_ls_criterion(QField::expression("1/r"), origin2(), 2, 1.5,
                                  4.0, eps0, ladder, grid);
    CHECK(rep.refine_ratio > 1.2);
    CHECK_FALSE(rep.q_norm_stable);
    CHECK(rep.verdict == LsVerdict::NotApplicable);
  }

  SUBCASE("exponent gates") {
    CHECK_THROWS_AS(check_ls_criterion(QField::constant(1.0), origin2(), 2, 2.0,
                                       4.0, eps0, ladder, grid),
                    config_error);
    CHECK_THROWS_AS(check_ls_criterion(QField::constant(1.0), origin2(), 2, 1.5,
                                       3.0, eps0, ladder, grid),
                    config_error);
    CHECK_THROWS_AS(check_ls_criterion(QField::constant(1.0), origin2(), 2, 1.5,
                                       4.0, eps0, {0.05}, grid),
                    config_error);
  }
}

TEST_CASE("equicontinuity experiment over a stretch family") {
  auto chart = plane(2.9);
  std::vector<Vec> omitted{make_vec({2.3, 2.3}), make_vec({2.7, 2.7})};
  auto ladder = make_eps_ladder(1.0, 3, 0.1);  // 1e-1, 1e-2, 1e-3

  std::vector<MappingSpec> family;
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    auto f = MappingSpec::radial_stretch(chart, alpha, origin2());
    f.declare_omitted_continuum(omitted);
    family.push_back(std::move(f));
  }

  EquiOptions opts;
  opts.resolution = 128;
  opts.count = 1024;

  // Budget 1/0.3 admits the whole family (least constant weight of the
  // stretch is 1/alpha).
  auto rep = run_equicontinuity_experiment(family, QField::constant(1.0 / 0.3),
                                           origin2(), 2.0, ladder, opts);
  REQUIRE(rep.mappings.size() == 4);
  for (const auto& row : rep.mappings) {
    CAPTURE(row.label);
    CHECK(row.included);
    CHECK(row.notice.empty());
    CHECK(row.omitted_diam == doctest::Approx(0.4 * std::sqrt(2.0)).epsilon(1e-9));
  }
  CHECK(rep.mappings[0].est_q == doctest::Approx(1.0 / 0.3).epsilon(0.12));

  // sup omega(eps) = eps^{0.3}: the smallest exponent dominates below 1.
  REQUIRE(rep.sup_omega.size() == 3);
  for (std::size_t i = 0; i < rep.eps.size(); ++i)
    CHECK(rep.sup_omega[i] ==
          doctest::Approx(std::pow(rep.eps[i], 0.3)).epsilon(1e-9));
  CHECK(rep.sup_decreasing);
  CHECK(rep.sigma_ok);  // 1e-3^{0.3} = 0.126 <= 0.2
  CHECK(rep.pass);

  // omega/eps growth across the ladder: exactly eps^{alpha-1} ratios, 10 for
  // alpha = 1/2 over two decades.
  CHECK(rep.mappings[1].gehring_growth == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(rep.mappings[3].gehring_growth == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("equicontinuity screening excludes over-budget and undeclared maps") {
  auto chart = plane(2.9);
  std::vector<Vec> omitted{make_vec({2.3, 2.3}), make_vec({2.7, 2.7})};
  std::vector<Vec> tiny{make_vec({2.3, 2.3}), make_vec({2.4, 2.3})};
  auto ladder = make_eps_ladder(1.0, 3, 0.1);

  auto steep = MappingSpec::radial_stretch(chart, 0.05, origin2());
  steep.declare_omitted_continuum(omitted);
  auto mild = MappingSpec::radial_stretch(chart, 0.5, origin2());
  mild.declare_omitted_continuum(omitted);
  auto undeclared = MappingSpec::radial_stretch(chart, 0.5, origin2());
  auto small_hole = MappingSpec::radial_stretch(chart, 0.5, origin2());
  small_hole.declare_omitted_continuum(tiny);

  EquiOptions opts;
  opts.resolution = 128;
  opts.count = 1024;

  auto rep = run_equicontinuity_experiment(
      {steep, mild, undeclared, small_hole}, QField::constant(2.0), origin2(),
      2.0, ladder, opts);
  REQUIRE(rep.mappings.size() == 4);

  CHECK_FALSE(rep.mappings[0].included);
  CHECK(rep.mappings[0].notice.find("exceeds the budget") != std::string::npos);
  CHECK(rep.mappings[1].included);
  CHECK_FALSE(rep.mappings[2].included);
  CHECK(rep.mappings[2].notice.find("no omitted continuum") != std::string::npos);
  CHECK_FALSE(rep.mappings[3].included);
  CHECK(rep.mappings[3].notice.find("below required") != std::string::npos);

  // The supremum is over included mappings only: omega = eps^{1/2}.
  for (std::size_t i = 0; i < rep.eps.size(); ++i)
    CHECK(rep.sup_omega[i] ==
          doctest::Approx(std::sqrt(rep.eps[i])).epsilon(1e-9));
  CHECK(rep.pass);

  auto path = (std::filesystem::temp_directory_path() / "equi.csv").string();
  EquiOptions copts = opts;
  copts.report_csv = path;
  run_equicontinuity_experiment({mild}, QField::constant(2.0), origin2(), 2.0,
                                ladder, copts);
  CHECK(read_header(path) == "mapping,eps,omega,included");
  std::filesystem::remove(path);
}

TEST_CASE("joining-continua lower bound is positive and scale-stable") {
  GridDomain grid(plane(2.2), 128);
  const double R = 2.0;

  auto seg = [](double ax, double ay, double bx, double by) {
    return std::vector<Vec>{make_vec({ax, ay}), make_vec({bx, by})};
  };
  std::vector<ContinuumPair> pairs{
      {seg(-1.0, 0.0, -0.2, 0.0), seg(0.2, 0.0, 1.0, 0.0)},
      {seg(-1.0, -1.0, -1.0, 1.0), seg(1.0, -1.0, 1.0, 1.0)},
      {seg(-0.5, -0.5, 0.5, -0.5), seg(-0.5, 0.5, 0.5, 0.5)},
      {seg(-1.2, 0.0, 0.0, -1.2), seg(0.0, 1.2, 1.2, 0.0)},
      {seg(-0.4, 0.1, -0.1, 0.1), seg(0.1, 0.1, 0.4, 0.1)},
  };

  auto rep = check_loewner_bound(pairs, 2.0, grid, 512, 3, origin2(), R);
  REQUIRE(rep.rows.size() == pairs.size());
  for (const auto& row : rep.rows) {
    CHECK(row.modulus > 0.0);
    CHECK(row.rho > 0.0);
  }
  CHECK(rep.positive);
  CHECK(rep.inv_c > 0.0);

  // p = n: the modulus is scale invariant, so halving the configuration
  // doubles rho = M / min diam. Stability band is a factor of 3.
  CHECK(rep.rescale_ratio == doctest::Approx(2.0).epsilon(0.5));
  CHECK(rep.rescale_stable);

  SUBCASE("degenerate inputs are rejected") {
    std::vector<ContinuumPair> crossing{
        {seg(-1.0, 0.0, 1.0, 0.0), seg(0.0, -1.0, 0.0, 1.0)}};
    CHECK_THROWS_AS(
        check_loewner_bound(crossing, 2.0, grid, 64, 3, origin2(), R),
        domain_error);

    std::vector<ContinuumPair> escaping{
        {seg(-1.0, 0.0, -0.2, 0.0), seg(0.2, 0.0, 2.1, 0.0)}};
    CHECK_THROWS_AS(
        check_loewner_bound(escaping, 2.0, grid, 64, 3, origin2(), R),
        domain_error);

    CHECK_THROWS_AS(check_loewner_bound({}, 2.0, grid, 64, 3, origin2(), R),
                    config_error);
  }
}

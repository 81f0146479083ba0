#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "modp/curves.hpp"
#include "modp/mapping.hpp"
#include "modp/util.hpp"

using namespace modp;

namespace {

RadialGauge gauge_of(const GeodesicAnnulus& ann) {
  return RadialGauge(ann.chart(), ann.center);
}

}  // namespace

TEST_CASE("annulus families: endpoints, monotone radius, determinism") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 4.0));
  GeodesicAnnulus ann(chart, make_vec({0.0, 0.0}), 1.0, 3.0);
  auto fam = generate_annulus_family(ann, 16, 42);
  auto g = gauge_of(ann);

  REQUIRE(fam.size() == 16);
  CHECK(fam.annulus.has_value());
  for (const auto& c : fam.curves) {
    REQUIRE(c.vertices.size() >= 8);
    CHECK(g.radius_of(c.vertices.front()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.radius_of(c.vertices.back()) == doctest::Approx(3.0).epsilon(1e-12));
    double prev = 0.0;
    for (const auto& v : c.vertices) {
      const double r = g.radius_of(v);
      CHECK(r >= prev - 1e-12);
      CHECK(r <= 3.0 + 1e-9);
      prev = r;
    }
  }

  // Curve 0 is a straight radial segment.
  CHECK(fam.curves[0].length() == doctest::Approx(2.0).epsilon(1e-12));

  // Determinism and prefix nesting.
  auto again = generate_annulus_family(ann, 16, 42);
  CHECK(again.fingerprint() == fam.fingerprint());
  auto prefix = generate_annulus_family(ann, 8, 42);
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(prefix.curves[i].vertices.size() == fam.curves[i].vertices.size());
    for (std::size_t k = 0; k < prefix.curves[i].vertices.size(); ++k)
      CHECK((prefix.curves[i].vertices[k] - fam.curves[i].vertices[k]).norm() ==
            0.0);
  }
  auto other = generate_annulus_family(ann, 16, 43);
  CHECK(other.fingerprint() != fam.fingerprint());

  CHECK_THROWS_AS(generate_annulus_family(ann, 0, 42), domain_error);
}

TEST_CASE("line integral of 1/|x| along a radial segment") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 4.0));
  GeodesicAnnulus ann(chart, make_vec({0.0, 0.0}), 1.0, 3.0);
  auto fam = generate_annulus_family(ann, 4, 7);
  auto rho = [](const Vec& x) { return 1.0 / x.norm(); };
  CHECK(line_integral(rho, fam.curves[0], chart, 0.005) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-5));
  // Density 1 recovers the curve length for every member.
  for (const auto& c : fam.curves)
    CHECK(line_integral([](const Vec&) { return 1.0; }, c, chart) ==
          doctest::Approx(c.length()).epsilon(1e-12));
}

TEST_CASE("connecting families join the two continua") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 2.0));
  std::vector<Vec> E = {make_vec({-1.5, 0.0}), make_vec({-1.0, 0.0})};
  std::vector<Vec> F = {make_vec({1.0, 0.0}), make_vec({1.5, 0.0})};
  auto fam = generate_connecting_family(E, F, chart, 6, 3);
  REQUIRE(fam.size() == 6);
  // Curve 0 is the midpoint-to-midpoint chord.
  CHECK(fam.curves[0].length() == doctest::Approx(2.5).epsilon(1e-12));
  for (const auto& c : fam.curves) {
    const Vec& a = c.vertices.front();
    const Vec& b = c.vertices.back();
    CHECK(std::abs(a[1]) == doctest::Approx(0.0));
    CHECK(a[0] >= -1.5 - 1e-12);
    CHECK(a[0] <= -1.0 + 1e-12);
    CHECK(std::abs(b[1]) == doctest::Approx(0.0));
    CHECK(b[0] >= 1.0 - 1e-12);
    CHECK(b[0] <= 1.5 + 1e-12);
  }
}

TEST_CASE("pushforward: identity preserves lengths, stretch maps radii") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 3.0));
  GeodesicAnnulus ann(chart, make_vec({0.0, 0.0}), 1.0, std::exp(1.0));
  auto fam = generate_annulus_family(ann, 8, 5);

  auto ident = MappingSpec::identity(chart);
  auto same = pushforward(fam, ident);
  REQUIRE(same.size() == fam.size());
  CHECK(same.provenance == Provenance::Pushforward);
  for (std::size_t i = 0; i < fam.size(); ++i)
    CHECK(same.curves[i].length() ==
          doctest::Approx(fam.curves[i].length()).epsilon(1e-9));

  auto stretch = MappingSpec::radial_stretch(chart, 0.5, make_vec({0.0, 0.0}));
  auto image = pushforward(fam, stretch);
  RadialGauge g(stretch.target(), make_vec({0.0, 0.0}));
  const double rt = std::sqrt(std::exp(1.0));
  for (const auto& c : image.curves) {
    CHECK(g.radius_of(c.vertices.front()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.radius_of(c.vertices.back()) == doctest::Approx(rt).epsilon(1e-9));
  }
  // The straight radial member maps to a straight radial segment.
  CHECK(image.curves[0].length() == doctest::Approx(rt - 1.0).epsilon(1e-7));
}

TEST_CASE("truncation to a sub-annulus clips curves onto the sub-spheres") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 2.0));
  Vec c0 = make_vec({0.0, 0.0});
  GeodesicAnnulus ann(chart, c0, 0.2, 1.0);
  GeodesicAnnulus sub(chart, c0, 0.4, 0.8);
  auto fam = generate_annulus_family(ann, 12, 11);
  auto cut = truncate_to_annulus(fam, sub);
  auto g = gauge_of(sub);

  REQUIRE(cut.size() == fam.size());
  CHECK(cut.truncation_of == fam.fingerprint());
  for (const auto& c : cut.curves) {
    CHECK(g.radius_of(c.vertices.front()) == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(g.radius_of(c.vertices.back()) == doctest::Approx(0.8).epsilon(1e-9));
    for (const auto& v : c.vertices) {
      CHECK(g.radius_of(v) >= 0.4 - 1e-9);
      CHECK(g.radius_of(v) <= 0.8 + 1e-9);
    }
  }
}

TEST_CASE("family CSV round trip is exact") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 4.0));
  GeodesicAnnulus ann(chart, make_vec({0.0, 0.0}), 1.0, 3.0);
  auto fam = generate_annulus_family(ann, 6, 9);

  auto path =
      (std::filesystem::temp_directory_path() / "modp_family_roundtrip.csv")
          .string();
  write_family_csv(fam, path);
  auto back = read_family_csv(path, chart);
  std::filesystem::remove(path);

  REQUIRE(back.size() == fam.size());
  CHECK(back.fingerprint() == fam.fingerprint());
  for (std::size_t i = 0; i < fam.size(); ++i)
    CHECK(back.curves[i].length() ==
          doctest::Approx(fam.curves[i].length()).epsilon(1e-14));
}

TEST_CASE("mapping evaluation") {
  auto chart = MetricChart::euclidean(2, Box::cube(2, 3.0));
  Vec zero = make_vec({0.0, 0.0});

  auto ident = MappingSpec::identity(chart);
  Vec x = make_vec({0.3, -0.7});
  CHECK((ident.apply(x) - x).norm() == 0.0);

  auto stretch = MappingSpec::radial_stretch(chart, 0.5, zero);
  Vec y = stretch.apply(make_vec({0.04, 0.0}));
  CHECK(y[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(stretch.apply(zero).norm() == 0.0);
  // |f(x)| = |x|^alpha in every direction.
  Vec z = stretch.apply(make_vec({1.2, 1.6}));  // |x| = 2
  CHECK(z.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

  CHECK_THROWS_AS(MappingSpec::radial_stretch(chart, 0.0, zero), config_error);
  CHECK_THROWS_AS(MappingSpec::radial_stretch(chart, 1.2, zero), config_error);

  auto rot = MappingSpec::user_analytic(chart, chart, {"x + y", "y - x"});
  Vec w = rot.apply(make_vec({1.0, 0.5}));
  CHECK(w[0] == doctest::Approx(1.5));
  CHECK(w[1] == doctest::Approx(-0.5));
  CHECK_THROWS_AS(MappingSpec::user_analytic(chart, chart, {"x"}), config_error);
  auto sing = MappingSpec::user_analytic(chart, chart, {"1/x", "y"});
  CHECK_THROWS_AS(sing.apply(zero), domain_error);
  auto big = MappingSpec::user_analytic(chart, chart, {"10*x", "y"});
  CHECK_THROWS_AS(big.apply(make_vec({1.0, 0.0})), domain_error);
}

TEST_CASE("Q fields: constants, expressions, grids, floors") {
  auto q2 = QField::constant(2.0);
  CHECK(q2.at(make_vec({0.1, 0.2})) == 2.0);
  CHECK_FALSE(q2.has_floor());
  CHECK_THROWS_AS(QField::constant(-1.0), config_error);

  auto qr = QField::expression("1/r");
  CHECK(qr.at(make_vec({0.5, 0.0})) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::isinf(qr.at(make_vec({0.0, 0.0}))));  // [0, inf] is allowed
  auto qneg = QField::expression("0 - 1");
  CHECK_THROWS_AS(qneg.at(make_vec({0.0, 0.0})), domain_error);

  auto floored = QField::constant(0.5).with_floor(1.0);
  CHECK(floored.at(make_vec({0.0, 0.0})) == 1.0);
  CHECK(floored.has_floor());
  CHECK(floored.floor_value() == 1.0);

  auto chart = MetricChart::euclidean(2, Box::cube(2, 1.0));
  GridDomain grid(chart, 4);
  std::vector<double> vals(grid.cell_count());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = static_cast<double>(i);
  auto qg = QField::sampled(grid, vals);
  CHECK(qg.at(grid.cell_center(5)) == 5.0);
  vals.pop_back();
  CHECK_THROWS_AS(QField::sampled(grid, vals), config_error);
}

TEST_CASE("eta profiles: normalization and shapes") {
  auto u = EtaProfile::uniform(1.0, 2.0);
  CHECK(u.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.at(1.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.at(0.99) == 0.0);
  CHECK(u.at(2.01) == 0.0);

  // For n = p = 2 the extremal profile is proportional to 1/t; on (1, e)
  // the normalizer is ~1, so eta(2) ~ 1/2.
  auto ex = EtaProfile::extremal(1.0, std::exp(1.0), 2, 2.0);
  CHECK(ex.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ex.at(2.0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(EtaProfile::extremal(1.0, 2.0, 2, 1.0), config_error);

  auto s1 = EtaProfile::random_step(1.0, 2.0, 12, 77);
  auto s2 = EtaProfile::random_step(1.0, 2.0, 12, 77);
  auto s3 = EtaProfile::random_step(1.0, 2.0, 12, 78);
  CHECK(s1.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s1.at(1.4) == s2.at(1.4));
  bool differs = false;
  for (double t = 1.05; t < 2.0; t += 0.1)
    differs = differs || (s1.at(t) != s3.at(t));
  CHECK(differs);

  CHECK_THROWS_AS(
      EtaProfile::from_samples(1.0, 2.0, {1.0, -0.5}, "bad", false),
      config_error);
  CHECK_THROWS_AS(
      EtaProfile::from_samples(1.0, 2.0, {0.0, 0.0}, "zero", true),
      config_error);
  auto z = EtaProfile::from_samples(1.0, 2.0, {0.0, 0.0}, "zero", false);
  CHECK(z.integral() == 0.0);
}

#include "modp/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "modp/mapping.hpp"

namespace modp {

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

// Base-b van der Corput radical inverse; base 2 prefixes of length 2^k are
// exactly equispaced on [0,1), and every prefix refines the previous one.
double radical_inverse(std::uint64_t k, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv, x = 0.0;
  while (k) {
    x += static_cast<double>(k % base) * f;
    k /= base;
    f *= inv;
  }
  return x;
}

Vec bundle_direction(int n, std::uint64_t ordinal) {
  if (n == 2) {
    const double a = 2.0 * kPi * radical_inverse(ordinal, 2);
    return make_vec({std::cos(a), std::sin(a)});
  }
  // Halton mapping to S^2: area-uniform and prefix-refining.
  const double c = 1.0 - 2.0 * radical_inverse(ordinal, 2);
  const double psi = 2.0 * kPi * radical_inverse(ordinal, 3);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return make_vec({s * std::cos(psi), s * std::sin(psi), c});
}

Vec random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  double norm = 0.0;
  do {
    for (int a = 0; a < n; ++a) v[a] = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

Vec slerp(const Vec& a, const Vec& b, double u) {
  const double dot = std::clamp(a.dot(b), -1.0, 1.0);
  const double omega = std::acos(dot);
  if (omega < 1e-9) return ((1.0 - u) * a + u * b).normalized();
  if (kPi - omega < 1e-9) {
    // Nearly antipodal: detour through a fixed orthogonal direction.
    int k = 0;
    for (int i = 1; i < a.size(); ++i)
      if (std::abs(a[i]) < std::abs(a[k])) k = i;
    Vec mid = Vec::Zero(a.size());
    mid[k] = 1.0;
    mid = (mid - mid.dot(a) * a).normalized();
    return u < 0.5 ? slerp(a, mid, 2.0 * u) : slerp(mid, b, 2.0 * u - 1.0);
  }
  return (std::sin((1.0 - u) * omega) * a + std::sin(u * omega) * b) /
         std::sin(omega);
}

struct Wobble {
  static constexpr int kModes = 3;
  double amp[kModes] = {0, 0, 0};
  Vec axis[kModes];

  static Wobble draw(std::mt19937_64& rng, int n, double amplitude) {
    Wobble w;
    std::uniform_real_distribution<double> uni(-amplitude, amplitude);
    for (int k = 0; k < kModes; ++k) {
      w.amp[k] = uni(rng);
      w.axis[k] = random_unit(rng, n);
    }
    return w;
  }

  Vec apply(const Vec& base, double u) const {
    Vec d = base;
    for (int k = 0; k < kModes; ++k)
      d += amp[k] * std::sin((k + 1) * kPi * u) * axis[k];
    return d.normalized();
  }
};

}  // namespace

DiscreteCurve DiscreteCurve::from_vertices(std::vector<Vec> vertices,
                                           const MetricChart& chart) {
  DiscreteCurve c;
  c.vertices = std::move(vertices);
  if (c.vertices.size() < 2)
    throw domain_error("curve: need at least 2 vertices");
  for (const Vec& v : c.vertices) chart.require_inside(v, "curve");
  c.seg_lengths.resize(c.vertices.size() - 1);
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
    c.seg_lengths[i] = segment_length(c.vertices[i], c.vertices[i + 1], chart);
  return c;
}

std::uint64_t CurveFamily::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t nc = curves.size();
  h = fnv1a(&nc, sizeof nc, h);
  for (const DiscreteCurve& c : curves) {
    const std::uint64_t nv = c.vertices.size();
    h = fnv1a(&nv, sizeof nv, h);
    for (const Vec& v : c.vertices)
      h = fnv1a(v.data(), sizeof(double) * v.size(), h);
  }
  return h;
}

void for_each_length_sample(const DiscreteCurve& curve, const MetricChart& chart,
                            double max_step,
                            const std::function<void(const Vec&, double)>& fn) {
  for (std::size_t i = 0; i + 1 < curve.vertices.size(); ++i) {
    const Vec& a = curve.vertices[i];
    const Vec& b = curve.vertices[i + 1];
    const double chart_len = (b - a).norm();
    int pieces = 1;
    if (max_step > 0.0 && chart_len > max_step)
      pieces = static_cast<int>(std::ceil(chart_len / max_step));
    const Vec d = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const Vec lo = a + static_cast<double>(k) * d;
      const Vec mid = lo + 0.5 * d;
      fn(mid, chart.length_element(mid, d));
    }
  }
}

double line_integral(const std::function<double(const Vec&)>& rho,
                     const DiscreteCurve& curve, const MetricChart& chart,
                     double max_step) {
  std::vector<double> terms;
  terms.reserve(curve.vertices.size());
  for_each_length_sample(curve, chart, max_step,
                         [&](const Vec& x, double len) {
                           terms.push_back(rho(x) * len);
                         });
  return pairwise_sum(terms);
}

CurveFamily generate_annulus_family(const GeodesicAnnulus& annulus, int count,
                                    std::uint64_t seed, double max_step) {
  if (count < 1) throw domain_error("annulus family: count must be >= 1");
  const RadialGauge& gauge = annulus.gauge();
  const MetricChart& chart = gauge.chart();
  const int n = chart.dim();
  if (n > 3)
    throw domain_error("annulus family: directions supported for dim 2 and 3");

  Vec e1 = Vec::Zero(n);
  e1[0] = 1.0;
  const double t1_ref = gauge.chart_radius(e1, annulus.r1);
  const double t2_ref = gauge.chart_radius(e1, annulus.r2);
  if (max_step <= 0.0) max_step = (t2_ref - t1_ref) / 64.0;

  CurveFamily fam;
  fam.seed = seed;
  fam.annulus = AnnulusTag{annulus.center, annulus.r1, annulus.r2};
  fam.curves.reserve(count);
  fam.curve_provenance.reserve(count);

  bool all_radial = true;
  for (int i = 0; i < count; ++i) {
    const int slot = i % 4;
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));

    if (slot <= 1) {
      // Deterministic radial bundle: straight geodesic ray, equal chart steps.
      const std::uint64_t ordinal = 2 * (i / 4) + slot;
      const Vec theta = bundle_direction(n, ordinal);
      const double t1 = gauge.chart_radius(theta, annulus.r1);
      const double t2 = gauge.chart_radius(theta, annulus.r2);
      const int m = std::max(2, static_cast<int>(std::ceil((t2 - t1) / max_step)));
      std::vector<Vec> verts(m + 1);
      for (int j = 0; j <= m; ++j)
        verts[j] = annulus.center + (t1 + (t2 - t1) * j / m) * theta;
      fam.curves.push_back(DiscreteCurve::from_vertices(std::move(verts), chart));
      fam.curve_provenance.push_back(Provenance::RadialBundle);
      continue;
    }

    all_radial = false;
    Vec theta_a, theta_b;
    Wobble wob;
    Provenance prov;
    if (slot == 2) {
      theta_a = theta_b = random_unit(rng, n);
      wob = Wobble::draw(rng, n, 0.12);
      prov = Provenance::PerturbedRadial;
    } else {
      theta_a = random_unit(rng, n);
      theta_b = random_unit(rng, n);
      wob = Wobble::draw(rng, n, 0.20);
      prov = Provenance::RandomConnecting;
    }

    auto point = [&](double u) {
      const Vec base = (slot == 2) ? theta_a : slerp(theta_a, theta_b, u);
      const Vec theta = wob.apply(base, u);
      const double r = annulus.r1 + u * (annulus.r2 - annulus.r1);
      return gauge.point_at(r, theta);
    };

    // Vertex count from a coarse chart-speed probe (index-local, so nesting
    // and scale covariance are preserved).
    const int probes = 32;
    double worst = 0.0;
    Vec prev = point(0.0);
    for (int j = 1; j <= probes; ++j) {
      Vec cur = point(static_cast<double>(j) / probes);
      worst = std::max(worst, (cur - prev).norm());
      prev = cur;
    }
    const int m = std::max(
        probes, static_cast<int>(std::ceil(1.3 * probes * worst / max_step)));
    std::vector<Vec> verts(m + 1);
    for (int j = 0; j <= m; ++j)
      verts[j] = point(static_cast<double>(j) / m);
    fam.curves.push_back(DiscreteCurve::from_vertices(std::move(verts), chart));
    fam.curve_provenance.push_back(prov);
  }
  fam.provenance = all_radial ? Provenance::RadialBundle : Provenance::Mixed;
  return fam;
}

CurveFamily generate_connecting_family(const std::vector<Vec>& E,
                                       const std::vector<Vec>& F,
                                       const MetricChart& chart, int count,
                                       std::uint64_t seed, double max_step) {
  if (count < 1) throw domain_error("connecting family: count must be >= 1");
  if (E.empty() || F.empty())
    throw domain_error("connecting family: empty continuum");
  const int n = chart.dim();

  auto sample_polyline = [&](const std::vector<Vec>& poly, double u) {
    if (poly.size() == 1) return poly[0];
    std::vector<double> lens(poly.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      lens[i] = (poly[i + 1] - poly[i]).norm();
      total += lens[i];
    }
    double target = u * total;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      if (target <= lens[i] || i + 2 == poly.size())
        return (poly[i] + (lens[i] > 0 ? target / lens[i] : 0.0) *
                              (poly[i + 1] - poly[i]))
            .eval();
      target -= lens[i];
    }
    return poly.back();
  };

  CurveFamily fam;
  fam.seed = seed;
  fam.provenance = Provenance::RandomConnecting;
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const Vec a = sample_polyline(E, i == 0 ? 0.5 : uni(rng));
    const Vec b = sample_polyline(F, i == 0 ? 0.5 : uni(rng));
    const double span = (b - a).norm();
    Wobble wob = Wobble::draw(rng, n, i == 0 ? 0.0 : 0.15);
    const double step = max_step > 0.0 ? max_step : std::max(span / 32.0, 1e-9);
    const int m =
        std::max(8, static_cast<int>(std::ceil(span * 1.5 / step)));
    std::vector<Vec> verts(m + 1);
    for (int j = 0; j <= m; ++j) {
      const double u = static_cast<double>(j) / m;
      Vec x = a + u * (b - a);
      for (int k = 0; k < Wobble::kModes; ++k)
        x += span * wob.amp[k] * std::sin((k + 1) * kPi * u) * wob.axis[k];
      verts[j] = chart.domain().clamp(x);
    }
    fam.curves.push_back(DiscreteCurve::from_vertices(std::move(verts), chart));
    fam.curve_provenance.push_back(Provenance::RandomConnecting);
  }
  return fam;
}

CurveFamily pushforward(const CurveFamily& family, const MappingSpec& f,
                        double max_step) {
  const MetricChart& target = f.target();
  if (max_step <= 0.0) {
    const Box& box = target.domain();
    max_step = (box.hi - box.lo).norm() / 1024.0;
  }
  CurveFamily out;
  out.seed = family.seed;
  out.provenance = Provenance::Pushforward;
  out.curves.reserve(family.size());

  for (const DiscreteCurve& c : family.curves) {
    std::vector<Vec> img;
    img.push_back(f.apply(c.vertices[0]));
    // Split source segments until image steps obey the target step guard;
    // inserted vertices are images of source-polyline points.
    std::function<void(const Vec&, const Vec&, const Vec&, int)> refine =
        [&](const Vec& a, const Vec& b, const Vec& fb, int depth) {
          const Vec fa = img.back();
          if ((fb - fa).norm() <= max_step || depth >= 14) {
            img.push_back(fb);
            return;
          }
          const Vec mid = 0.5 * (a + b);
          const Vec fmid = f.apply(mid);
          refine(a, mid, fmid, depth + 1);
          refine(mid, b, fb, depth + 1);
        };
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
      refine(c.vertices[i], c.vertices[i + 1], f.apply(c.vertices[i + 1]), 0);
    out.curves.push_back(DiscreteCurve::from_vertices(std::move(img), target));
    out.curve_provenance.push_back(Provenance::Pushforward);
  }
  return out;
}

CurveFamily truncate_to_annulus(const CurveFamily& family,
                                const GeodesicAnnulus& sub) {
  const RadialGauge& gauge = sub.gauge();
  CurveFamily out;
  out.seed = family.seed;
  out.provenance = family.provenance;
  out.annulus = AnnulusTag{sub.center, sub.r1, sub.r2};
  out.truncation_of = family.fingerprint();

  auto crossing = [&](const Vec& a, const Vec& b, double target) {
    // Radius crossing on the chart segment a->b by bisection.
    double lo = 0.0, hi = 1.0;
    const bool rising = gauge.radius_of(b) >= gauge.radius_of(a);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double r = gauge.radius_of((a + mid * (b - a)).eval());
      if ((r < target) == rising)
        lo = mid;
      else
        hi = mid;
    }
    return (a + 0.5 * (lo + hi) * (b - a)).eval();
  };

  for (std::size_t ci = 0; ci < family.curves.size(); ++ci) {
    const auto& verts = family.curves[ci].vertices;
    std::vector<double> rad(verts.size());
    for (std::size_t j = 0; j < verts.size(); ++j)
      rad[j] = gauge.radius_of(verts[j]);

    std::vector<Vec> run;
    bool closed = false;
    for (std::size_t j = 0; j + 1 < verts.size() && !closed; ++j) {
      const double r0 = rad[j], r1v = rad[j + 1];
      if (run.empty()) {
        if (r0 >= sub.r1 && r0 <= sub.r2)
          run.push_back(verts[j]);
        else if (r0 < sub.r1 && r1v >= sub.r1)
          run.push_back(crossing(verts[j], verts[j + 1], sub.r1));
        else
          continue;
      }
      if (r1v >= sub.r2) {
        run.push_back(crossing(verts[j], verts[j + 1], sub.r2));
        closed = true;
      } else if (r1v < sub.r1) {
        run.clear();  // left the band below; restart at the next entry
      } else {
        run.push_back(verts[j + 1]);
      }
    }
    if (!closed || run.size() < 2)
      throw domain_error("truncate: a curve does not span the sub-annulus");
    out.curves.push_back(
        DiscreteCurve::from_vertices(std::move(run), gauge.chart()));
    out.curve_provenance.push_back(family.curve_provenance.empty()
                                       ? Provenance::Mixed
                                       : family.curve_provenance[ci]);
  }
  return out;
}

void write_family_csv(const CurveFamily& family, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("family csv: cannot write " + path);
  const int n = family.curves.empty()
                    ? 0
                    : static_cast<int>(family.curves[0].vertices[0].size());
  out << "curve_id,vertex_index";
  for (int a = 1; a <= n; ++a) out << ",x" << a;
  out << "\n";
  out.precision(17);
  for (std::size_t ci = 0; ci < family.curves.size(); ++ci)
    for (std::size_t j = 0; j < family.curves[ci].vertices.size(); ++j) {
      out << ci << ',' << j;
      const Vec& v = family.curves[ci].vertices[j];
      for (int a = 0; a < v.size(); ++a) out << ',' << v[a];
      out << "\n";
    }
}

CurveFamily read_family_csv(const std::string& path, const MetricChart& chart) {
  std::ifstream in(path);
  if (!in) throw config_error("family csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw config_error("family csv: empty file " + path);
  const int n = chart.dim();
  std::vector<std::vector<std::pair<long, Vec>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string tok;
    auto next = [&]() {
      if (!std::getline(iss, tok, ','))
        throw config_error("family csv: short row in " + path);
      return tok;
    };
    const long cid = std::stol(next());
    const long vidx = std::stol(next());
    Vec v(n);
    for (int a = 0; a < n; ++a) v[a] = std::stod(next());
    if (cid < 0) throw config_error("family csv: negative curve id");
    if (rows.size() <= static_cast<std::size_t>(cid))
      rows.resize(cid + 1);
    rows[cid].emplace_back(vidx, v);
  }
  CurveFamily fam;
  fam.provenance = Provenance::Imported;
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Vec> verts;
    verts.reserve(row.size());
    for (auto& [idx, v] : row) verts.push_back(v);
    fam.curves.push_back(DiscreteCurve::from_vertices(std::move(verts), chart));
    fam.curve_provenance.push_back(Provenance::Imported);
  }
  return fam;
}

}  // namespace modp

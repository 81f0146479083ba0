#pragma once

// Polyline curves, line integrals along them, seeded sampling of the family
// of curves joining the two boundary spheres of a geodesic annulus, and
// pushforward of families under mappings.
//
// Sampled families are index-local: curve i depends only on (seed, i), so
// the first K curves of a (seed, 2K) family are bitwise the first K of the
// (seed, K) family. Refinement studies rely on this nesting.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "modp/chart.hpp"
#include "modp/grid.hpp"
#include "modp/radial.hpp"

namespace modp {

struct DiscreteCurve {
  std::vector<Vec> vertices;
  std::vector<double> seg_lengths;  // cached metric lengths, midpoint rule

  // Validates >= 2 vertices inside the chart and fills the length cache.
  static DiscreteCurve from_vertices(std::vector<Vec> vertices,
                                     const MetricChart& chart);
  double length() const { return pairwise_sum(seg_lengths); }
};

enum class Provenance {
  RadialBundle,
  PerturbedRadial,
  RandomConnecting,
  Pushforward,
  Mixed,
  Imported
};

// Metadata tying a family to Gamma(S(x0,r1), S(x0,r2), A).
struct AnnulusTag {
  Vec center;
  double r1 = 0.0, r2 = 0.0;
};

struct CurveFamily {
  std::vector<DiscreteCurve> curves;
  std::vector<Provenance> curve_provenance;
  Provenance provenance = Provenance::Mixed;
  std::uint64_t seed = 0;
  std::optional<AnnulusTag> annulus;
  // Minorization certificate: fingerprint of the family whose curves contain
  // these as subcurves (0 = none).
  std::uint64_t truncation_of = 0;

  std::size_t size() const { return curves.size(); }
  bool empty() const { return curves.empty(); }
  std::uint64_t fingerprint() const;
};

// Subdivides each segment in chart coordinates to steps <= max_step (no
// subdivision when max_step <= 0) and feeds (midpoint, metric length) pairs
// to fn. This is the single sampling rule shared by line integrals and the
// modulus constraint assembly.
void for_each_length_sample(const DiscreteCurve& curve, const MetricChart& chart,
                            double max_step,
                            const std::function<void(const Vec&, double)>& fn);

double line_integral(const std::function<double(const Vec&)>& rho,
                     const DiscreteCurve& curve, const MetricChart& chart,
                     double max_step = 0.0);

// `count` curves joining S(x0,r1) to S(x0,r2) inside the annulus: half a
// deterministic radial bundle (bit-reversed equispaced directions), a
// quarter angularly perturbed radial paths, a quarter random connecting
// paths. All vertices have monotone geodesic radius, endpoints exactly on
// the spheres. max_step <= 0 derives a default from the annulus size.
CurveFamily generate_annulus_family(const GeodesicAnnulus& annulus, int count,
                                    std::uint64_t seed, double max_step = 0.0);

// Curves joining two polyline continua E and F (for joint-continua lower
// bound checks); seeded wobbled chords, clamped to the chart box.
CurveFamily generate_connecting_family(const std::vector<Vec>& E,
                                       const std::vector<Vec>& F,
                                       const MetricChart& chart, int count,
                                       std::uint64_t seed, double max_step = 0.0);

class MappingSpec;
// Vertexwise image family; source segments are recursively split until the
// image steps satisfy the target-chart step guard, so inserted vertices stay
// on the image of the source polyline.
CurveFamily pushforward(const CurveFamily& family, const MappingSpec& f,
                        double max_step = 0.0);

// Clips every curve to the radius band of `sub` (same center), producing
// subcurves with endpoints on the sub-spheres; stamps the minorization
// certificate truncation_of = family.fingerprint().
CurveFamily truncate_to_annulus(const CurveFamily& family,
                                const GeodesicAnnulus& sub);

// CSV round trip: curve_id,vertex_index,x1..xn.
void write_family_csv(const CurveFamily& family, const std::string& path);
CurveFamily read_family_csv(const std::string& path, const MetricChart& chart);

}  // namespace modp

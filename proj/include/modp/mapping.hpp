#pragma once

// Analytic test mappings between charts, pointwise distortion weights Q(x),
// and radial competitor profiles eta used by the ring-inequality verifier.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "modp/chart.hpp"
#include "modp/expr.hpp"
#include "modp/grid.hpp"
#include "modp/util.hpp"

namespace modp {

// A mapping f from a source chart into a target chart.  Supported kinds:
//   Identity       f(x) = x
//   RadialStretch  f(x) = x0 + (x - x0) |x - x0|^{alpha - 1},  f(x0) = x0
//   UserAnalytic   components given as expressions in x1..xn
// The radial stretch with alpha in (0,1] is continuous, open and discrete on
// its chart; alpha = 1 reduces to the identity.
class MappingSpec {
 public:
  enum class Kind { Identity, RadialStretch, UserAnalytic };

  static MappingSpec identity(const MetricChart& chart);
  static MappingSpec radial_stretch(const MetricChart& chart, double alpha,
                                    Vec x0);
  static MappingSpec user_analytic(const MetricChart& source,
                                   const MetricChart& target,
                                   const std::vector<std::string>& components);

  // Evaluates f at a point of the source chart.  Throws domain_error when x
  // lies outside the source box or the image has a non-finite coordinate.
  Vec apply(const Vec& x) const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const Vec& x0() const { return x0_; }
  const MetricChart& source() const { return source_; }
  const MetricChart& target() const { return target_; }
  const std::string& label() const { return label_; }

  // Records a continuum the mapping omits from its image (a polyline in
  // target-chart coordinates).  Experiments use it to screen candidate
  // mappings; apply() is not affected.
  void declare_omitted_continuum(std::vector<Vec> polyline);
  bool has_omitted_continuum() const { return !omitted_.empty(); }
  const std::vector<Vec>& omitted_continuum() const { return omitted_; }

 private:
  MappingSpec(Kind kind, MetricChart source, MetricChart target);

  Kind kind_;
  MetricChart source_;
  MetricChart target_;
  Vec x0_;
  double alpha_ = 1.0;
  std::vector<Expr> components_;
  std::vector<Vec> omitted_;
  std::string label_;
};

// Pointwise weight Q(x) >= 0 on a chart.  Backed by a constant, an
// expression in chart coordinates, or per-cell samples on a grid.  A floor
// may be recorded (criteria that assume Q >= 1 evaluate max(Q, floor)).
class QField {
 public:
  static QField constant(double value);
  static QField expression(const std::string& expr);
  static QField sampled(const GridDomain& grid, std::vector<double> values);

  // Copy with a recorded lower bound; at() returns max(raw, floor).
  QField with_floor(double floor) const;

  // Evaluates the field.  Negative or NaN raw values throw domain_error
  // (+infinity is allowed: integrable singularities are legitimate weights).
  double at(const Vec& x) const;

  bool has_floor() const { return floor_ > 0.0; }
  double floor_value() const { return floor_; }
  const std::string& label() const { return label_; }

 private:
  enum class Kind { Constant, Expression, Grid };

  QField() = default;

  Kind kind_ = Kind::Constant;
  double value_ = 1.0;
  std::shared_ptr<const Expr> expr_;
  std::shared_ptr<const GridDomain> grid_;
  std::shared_ptr<const std::vector<double>> samples_;
  double floor_ = 0.0;
  std::string label_ = "1";
};

// A radial competitor profile eta >= 0 on (r1, r2), stored as midpoint
// samples of a step function on a uniform partition.  Factories normalize
// the step integral to exactly 1 unless stated otherwise.
class EtaProfile {
 public:
  static constexpr int kSamples = 2048;

  // Constant profile 1/(r2 - r1).
  static EtaProfile uniform(double r1, double r2);
  // Profile proportional to t^{(1-n)/(p-1)}; the binding competitor for the
  // annulus when the weight is constant.  Requires p > 1.
  static EtaProfile extremal(double r1, double r2, int n, double p);
  // Extremal shape with a radial weighting: proportional to
  // t^{(1-n)/(p-1)} * w(t)^{-1/(p-1)} where w(t) is a positive radial
  // weight (typically a spherical mean of Q).
  static EtaProfile extremal_weighted(double r1, double r2, int n, double p,
                                      const std::function<double(double)>& w);
  // Piecewise-constant profile with `pieces` random levels in [0.1, 1),
  // normalized; deterministic in the seed.
  static EtaProfile random_step(double r1, double r2, int pieces,
                                std::uint64_t seed);
  // Direct construction from samples (midpoints of a uniform partition).
  // Negative samples throw config_error.  With normalize = false the raw
  // step function is kept, so the integral may be anything >= 0.
  static EtaProfile from_samples(double r1, double r2,
                                 std::vector<double> samples,
                                 std::string label, bool normalize);

  // Step-function value; 0 outside (r1, r2).
  double at(double t) const;
  // Exact integral of the stored step function over (r1, r2).
  double integral() const;

  double r1() const { return r1_; }
  double r2() const { return r2_; }
  int cell_count() const { return static_cast<int>(samples_.size()); }
  double cell_width() const { return h_; }
  double cell_mid(int i) const { return r1_ + (i + 0.5) * h_; }
  double sample(int i) const { return samples_[static_cast<std::size_t>(i)]; }
  const std::string& label() const { return label_; }

 private:
  EtaProfile(double r1, double r2, std::vector<double> samples,
             std::string label);

  double r1_ = 0.0;
  double r2_ = 1.0;
  double h_ = 0.0;
  std::vector<double> samples_;
  std::string label_;
};

}  // namespace modp

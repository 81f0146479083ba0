#include "modp/mapping.hpp"

#include <cmath>
#include <span>
#include <sstream>

namespace modp {

namespace {

std::span<const double> as_span(const Vec& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

}  // namespace

MappingSpec::MappingSpec(Kind kind, MetricChart source, MetricChart target)
    : kind_(kind), source_(std::move(source)), target_(std::move(target)) {}

MappingSpec MappingSpec::identity(const MetricChart& chart) {
  MappingSpec f(Kind::Identity, chart, chart);
  f.x0_ = Vec::Zero(chart.dim());
  f.label_ = "identity";
  return f;
}

MappingSpec MappingSpec::radial_stretch(const MetricChart& chart, double alpha,
                                        Vec x0) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw config_error("radial_stretch: alpha must lie in (0, 1]");
  if (chart.kind() != ChartKind::Euclidean)
    throw config_error("radial_stretch: source chart must be Euclidean");
  if (x0.size() != chart.dim())
    throw config_error("radial_stretch: center dimension mismatch");
  chart.require_inside(x0, "radial_stretch center");

  // |f_i(x) - x0_i| <= |x_i - x0_i|^alpha, so the image box is the source
  // box inflated per axis to max(m, m^alpha) around the center (the stretch
  // pushes points outward wherever |x - x0| < 1).
  const Box& b = chart.domain();
  Box tb;
  tb.lo = Vec(chart.dim());
  tb.hi = Vec(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) {
    const double m = std::max(b.hi[i] - x0[i], x0[i] - b.lo[i]);
    const double e = std::max(m, std::pow(m, alpha));
    tb.lo[i] = x0[i] - e;
    tb.hi[i] = x0[i] + e;
  }

  MappingSpec f(Kind::RadialStretch, chart,
                MetricChart::euclidean(chart.dim(), tb));
  f.alpha_ = alpha;
  f.x0_ = std::move(x0);
  std::ostringstream os;
  os << "stretch(alpha=" << alpha << ")";
  f.label_ = os.str();
  return f;
}

MappingSpec MappingSpec::user_analytic(
    const MetricChart& source, const MetricChart& target,
    const std::vector<std::string>& components) {
  if (static_cast<int>(components.size()) != target.dim())
    throw config_error(
        "user_analytic: need one component expression per target coordinate");
  MappingSpec f(Kind::UserAnalytic, source, target);
  f.x0_ = Vec::Zero(source.dim());
  f.components_.reserve(components.size());
  for (const std::string& c : components)
    f.components_.push_back(Expr::parse(c));
  f.label_ = "analytic";
  return f;
}

Vec MappingSpec::apply(const Vec& x) const {
  source_.require_inside(x, "MappingSpec::apply");
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::RadialStretch: {
      Vec d = x - x0_;
      const double r = d.norm();
      if (r == 0.0) return x0_;
      return x0_ + d * std::pow(r, alpha_ - 1.0);
    }
    case Kind::UserAnalytic: {
      Vec y(target_.dim());
      for (int i = 0; i < target_.dim(); ++i) {
        y[i] = components_[static_cast<std::size_t>(i)].eval(as_span(x));
        if (!std::isfinite(y[i]))
          throw domain_error("MappingSpec::apply: component " +
                             std::to_string(i + 1) + " not finite");
      }
      if (!target_.domain().contains(y, 1e-9))
        throw domain_error("MappingSpec::apply: image left the target chart");
      return y;
    }
  }
  throw domain_error("MappingSpec::apply: unknown kind");
}

void MappingSpec::declare_omitted_continuum(std::vector<Vec> polyline) {
  if (polyline.size() < 2)
    throw config_error("omitted continuum needs at least 2 points");
  for (const Vec& q : polyline)
    if (q.size() != target_.dim())
      throw config_error("omitted continuum point dimension mismatch");
  omitted_ = std::move(polyline);
}

// ---------------------------------------------------------------------------

QField QField::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw config_error("QField::constant: value must be finite and >= 0");
  QField q;
  q.kind_ = Kind::Constant;
  q.value_ = value;
  std::ostringstream os;
  os << value;
  q.label_ = os.str();
  return q;
}

QField QField::expression(const std::string& expr) {
  QField q;
  q.kind_ = Kind::Expression;
  q.expr_ = std::make_shared<const Expr>(Expr::parse(expr));
  q.label_ = expr;
  return q;
}

QField QField::sampled(const GridDomain& grid, std::vector<double> values) {
  if (values.size() != grid.cell_count())
    throw config_error("QField::sampled: one value per grid cell required");
  for (double v : values)
    if (std::isnan(v) || v < 0.0)
      throw config_error("QField::sampled: values must be >= 0");
  QField q;
  q.kind_ = Kind::Grid;
  q.grid_ = std::make_shared<const GridDomain>(grid);
  q.samples_ =
      std::make_shared<const std::vector<double>>(std::move(values));
  q.label_ = "grid";
  return q;
}

QField QField::with_floor(double floor) const {
  if (!(floor >= 0.0) || !std::isfinite(floor))
    throw config_error("QField::with_floor: floor must be finite and >= 0");
  QField q = *this;
  q.floor_ = floor;
  if (floor > 0.0) {
    std::ostringstream os;
    os << label_ << " (floor " << floor << ")";
    q.label_ = os.str();
  }
  return q;
}

double QField::at(const Vec& x) const {
  double raw = 0.0;
  switch (kind_) {
    case Kind::Constant:
      raw = value_;
      break;
    case Kind::Expression:
      raw = expr_->eval(as_span(x));
      break;
    case Kind::Grid:
      raw = (*samples_)[grid_->cell_index(x)];
      break;
  }
  if (std::isnan(raw) || raw < 0.0)
    throw domain_error("QField: negative or NaN value sampled");
  return std::max(raw, floor_);
}

// ---------------------------------------------------------------------------

EtaProfile::EtaProfile(double r1, double r2, std::vector<double> samples,
                       std::string label)
    : r1_(r1),
      r2_(r2),
      h_((r2 - r1) / static_cast<double>(samples.size())),
      samples_(std::move(samples)),
      label_(std::move(label)) {}

namespace {

void validate_band(double r1, double r2, const char* who) {
  if (!(r1 >= 0.0) || !(r2 > r1) || !std::isfinite(r2))
    throw config_error(std::string(who) + ": need 0 <= r1 < r2 < inf");
}

void normalize_step(std::vector<double>& samples, double h, const char* who) {
  const double total = pairwise_sum(samples) * h;
  if (!(total > 0.0) || !std::isfinite(total))
    throw config_error(std::string(who) +
                       ": profile integral must be positive to normalize");
  for (double& s : samples) s /= total;
}

}  // namespace

EtaProfile EtaProfile::uniform(double r1, double r2) {
  validate_band(r1, r2, "EtaProfile::uniform");
  std::vector<double> s(kSamples, 1.0 / (r2 - r1));
  return EtaProfile(r1, r2, std::move(s), "uniform");
}

EtaProfile EtaProfile::extremal(double r1, double r2, int n, double p) {
  return extremal_weighted(r1, r2, n, p, [](double) { return 1.0; });
}

EtaProfile EtaProfile::extremal_weighted(
    double r1, double r2, int n, double p,
    const std::function<double(double)>& w) {
  validate_band(r1, r2, "EtaProfile::extremal");
  if (n < 2) throw config_error("EtaProfile::extremal: n must be >= 2");
  if (!(p > 1.0)) throw config_error("EtaProfile::extremal: p must exceed 1");
  const double beta = (1.0 - n) / (p - 1.0);
  std::vector<double> s(kSamples);
  const double h = (r2 - r1) / kSamples;
  for (int i = 0; i < kSamples; ++i) {
    const double t = r1 + (i + 0.5) * h;
    const double wt = w(t);
    if (!(wt > 0.0) || !std::isfinite(wt))
      throw domain_error("EtaProfile::extremal: weight must be positive");
    s[static_cast<std::size_t>(i)] =
        std::pow(t, beta) * std::pow(wt, -1.0 / (p - 1.0));
  }
  normalize_step(s, h, "EtaProfile::extremal");
  return EtaProfile(r1, r2, std::move(s), "extremal");
}

EtaProfile EtaProfile::random_step(double r1, double r2, int pieces,
                                   std::uint64_t seed) {
  validate_band(r1, r2, "EtaProfile::random_step");
  if (pieces < 1)
    throw config_error("EtaProfile::random_step: pieces must be >= 1");
  std::vector<double> levels(static_cast<std::size_t>(pieces));
  const std::uint64_t base = splitmix64(seed);
  for (int k = 0; k < pieces; ++k) {
    const std::uint64_t v = splitmix64(
        base ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1)));
    const double u = static_cast<double>(v >> 11) * 0x1.0p-53;
    levels[static_cast<std::size_t>(k)] = 0.1 + 0.9 * u;
  }
  std::vector<double> s(kSamples);
  for (int i = 0; i < kSamples; ++i)
    s[static_cast<std::size_t>(i)] =
        levels[static_cast<std::size_t>(
            static_cast<long long>(i) * pieces / kSamples)];
  normalize_step(s, (r2 - r1) / kSamples, "EtaProfile::random_step");
  std::ostringstream os;
  os << "step(k=" << pieces << ",seed=" << seed << ")";
  return EtaProfile(r1, r2, std::move(s), os.str());
}

EtaProfile EtaProfile::from_samples(double r1, double r2,
                                    std::vector<double> samples,
                                    std::string label, bool normalize) {
  validate_band(r1, r2, "EtaProfile::from_samples");
  if (samples.empty())
    throw config_error("EtaProfile::from_samples: samples must be nonempty");
  for (double v : samples)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw config_error(
          "EtaProfile::from_samples: samples must be finite and >= 0");
  if (normalize)
    normalize_step(samples, (r2 - r1) / static_cast<double>(samples.size()),
                   "EtaProfile::from_samples");
  return EtaProfile(r1, r2, std::move(samples), std::move(label));
}

double EtaProfile::at(double t) const {
  if (!(t > r1_) || !(t < r2_)) return 0.0;
  auto idx = static_cast<std::size_t>((t - r1_) / h_);
  if (idx >= samples_.size()) idx = samples_.size() - 1;
  return samples_[idx];
}

double EtaProfile::integral() const { return pairwise_sum(samples_) * h_; }

}  // namespace modp

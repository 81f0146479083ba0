#include "modp/chart.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace modp {

namespace {
constexpr std::uint64_t kMetricGridMagic = 0x3130474D50444F4DULL;  // "MODPMG01"
}

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool Box::contains(const Vec& x, double pad) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
  return true;
}

Vec Box::clamp(const Vec& x) const {
  Vec y = x;
  for (int i = 0; i < dim(); ++i) y[i] = std::clamp(y[i], lo[i], hi[i]);
  return y;
}

Box Box::cube(int dim, double half_width) {
  Box b;
  b.lo = Vec::Constant(dim, -half_width);
  b.hi = Vec::Constant(dim, half_width);
  return b;
}

MetricGridData MetricGridData::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("metric grid: cannot open " + path);
  std::uint64_t magic = 0;
  std::uint32_t dim = 0, res = 0;
  in.read(reinterpret_cast<char*>(&magic), 8);
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&res), 4);
  if (!in || magic != kMetricGridMagic)
    throw config_error("metric grid: bad magic in " + path);
  if (dim < 2 || dim > static_cast<std::uint32_t>(kMaxDim) || res < 2)
    throw config_error("metric grid: unsupported dim/resolution in " + path);
  MetricGridData d;
  d.dim = static_cast<int>(dim);
  d.resolution = static_cast<int>(res);
  std::size_t cells = 1;
  for (int i = 0; i < d.dim; ++i) cells *= res;
  const std::size_t comps = static_cast<std::size_t>(d.dim) * (d.dim + 1) / 2;
  d.components.resize(cells * comps);
  in.read(reinterpret_cast<char*>(d.components.data()),
          static_cast<std::streamsize>(d.components.size() * sizeof(double)));
  if (!in) throw config_error("metric grid: truncated payload in " + path);
  return d;
}

void MetricGridData::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("metric grid: cannot write " + path);
  std::uint64_t magic = kMetricGridMagic;
  std::uint32_t d = static_cast<std::uint32_t>(dim);
  std::uint32_t r = static_cast<std::uint32_t>(resolution);
  out.write(reinterpret_cast<const char*>(&magic), 8);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&r), 4);
  out.write(reinterpret_cast<const char*>(components.data()),
            static_cast<std::streamsize>(components.size() * sizeof(double)));
}

MetricChart MetricChart::euclidean(int dim, Box box) {
  if (dim < 2 || dim > kMaxDim) throw domain_error("chart: dim out of range");
  if (box.dim() != dim) throw domain_error("chart: box/dim mismatch");
  MetricChart c;
  c.dim_ = dim;
  c.kind_ = ChartKind::Euclidean;
  c.box_ = std::move(box);
  return c;
}

MetricChart MetricChart::conformal(int dim, Box box,
                                   const std::string& lambda_expr, double rmax) {
  if (dim < 2 || dim > kMaxDim) throw domain_error("chart: dim out of range");
  if (box.dim() != dim) throw domain_error("chart: box/dim mismatch");
  MetricChart c;
  c.dim_ = dim;
  c.kind_ = ChartKind::ConformalScalar;
  c.box_ = std::move(box);
  c.lambda_ = Expr::parse(lambda_expr);
  c.rmax_ = rmax;
  // Sanity: lambda must be positive at the box center.
  Vec mid = 0.5 * (c.box_.lo + c.box_.hi);
  double lam = c.lambda_.eval(std::span<const double>(mid.data(), mid.size()));
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw config_error("chart: conformal factor not positive at box center");
  return c;
}

MetricChart MetricChart::general_grid(Box box, MetricGridData data, double rmax) {
  if (box.dim() != data.dim) throw domain_error("chart: box/dim mismatch");
  MetricChart c;
  c.dim_ = data.dim;
  c.kind_ = ChartKind::GeneralGrid;
  c.box_ = std::move(box);
  c.rmax_ = rmax;
  // SPD check at every sample (det g > 0 via Cholesky).
  const int n = data.dim;
  const std::size_t comps = static_cast<std::size_t>(n) * (n + 1) / 2;
  const std::size_t cells = data.components.size() / comps;
  Mat g(n, n);
  for (std::size_t cidx = 0; cidx < cells; ++cidx) {
    const double* p = data.components.data() + cidx * comps;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        g(i, j) = p[k];
        g(j, i) = p[k];
        ++k;
      }
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
      throw config_error("metric grid: sample " + std::to_string(cidx) +
                         " is not positive-definite");
  }
  c.grid_ = std::make_shared<MetricGridData>(std::move(data));
  return c;
}

MetricChart MetricChart::from_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("chart config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const char* ws = " \t\r\n";
      s.erase(0, s.find_first_not_of(ws));
      auto last = s.find_last_not_of(ws);
      s.erase(last == std::string::npos ? 0 : last + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw config_error("chart config: missing key " + key);
    return it->second;
  };
  auto parse_vec = [](const std::string& s, int dim) {
    std::istringstream iss(s);
    Vec v(dim);
    for (int i = 0; i < dim; ++i)
      if (!(iss >> v[i]))
        throw config_error("chart config: expected " + std::to_string(dim) +
                           " numbers in '" + s + "'");
    return v;
  };

  const std::string kind = need("kind");
  const int dim = std::stoi(need("dim"));
  if (dim < 2 || dim > kMaxDim)
    throw config_error("chart config: dim out of range");
  Box box;
  box.lo = parse_vec(need("box_lo"), dim);
  box.hi = parse_vec(need("box_hi"), dim);
  for (int i = 0; i < dim; ++i)
    if (!(box.lo[i] < box.hi[i]))
      throw config_error("chart config: degenerate box");
  double rmax = std::numeric_limits<double>::infinity();
  if (kv.count("rmax")) rmax = std::stod(kv["rmax"]);

  if (kind == "euclidean") return euclidean(dim, std::move(box));
  if (kind == "conformal")
    return conformal(dim, std::move(box), need("lambda"), rmax);
  if (kind == "grid") {
    std::string file = need("metric_file");
    // Relative paths resolve against the config file's directory.
    if (!file.empty() && file[0] != '/') {
      auto slash = path.find_last_of('/');
      if (slash != std::string::npos) file = path.substr(0, slash + 1) + file;
    }
    return general_grid(std::move(box), MetricGridData::read(file), rmax);
  }
  throw config_error("chart config: unknown kind '" + kind + "'");
}

void MetricChart::require_inside(const Vec& x, const char* who) const {
  if (static_cast<int>(x.size()) != dim_)
    throw domain_error(std::string(who) + ": point dimension mismatch");
  if (!box_.contains(x, 1e-12 * (box_.hi - box_.lo).norm()))
    throw domain_error(std::string(who) + ": point outside chart domain");
}

Mat MetricChart::grid_metric_at(const Vec& x) const {
  const auto& d = *grid_;
  const int n = dim_;
  const int res = d.resolution;
  const std::size_t comps = static_cast<std::size_t>(n) * (n + 1) / 2;

  // Multilinear interpolation on the cell-center lattice, clamped at edges.
  double w[kMaxDim];
  int i0[kMaxDim];
  for (int a = 0; a < n; ++a) {
    const double h = (box_.hi[a] - box_.lo[a]) / res;
    double t = (x[a] - box_.lo[a]) / h - 0.5;  // lattice coordinate
    t = std::clamp(t, 0.0, static_cast<double>(res - 1));
    i0[a] = std::min(static_cast<int>(t), res - 2);
    if (res == 2) i0[a] = 0;
    w[a] = t - i0[a];
  }
  Mat g = Mat::Zero(n, n);
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      const int bit = (c >> a) & 1;
      weight *= bit ? w[a] : (1.0 - w[a]);
      idx = idx * res + static_cast<std::size_t>(i0[a] + bit);
    }
    if (weight == 0.0) continue;
    const double* p = d.components.data() + idx * comps;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        g(i, j) += weight * p[k];
        ++k;
      }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Mat MetricChart::metric_at(const Vec& x) const {
  switch (kind_) {
    case ChartKind::Euclidean:
      return Mat::Identity(dim_, dim_);
    case ChartKind::ConformalScalar: {
      const double lam = conformal_factor(x);
      return (lam * lam) * Mat::Identity(dim_, dim_);
    }
    case ChartKind::GeneralGrid:
      return grid_metric_at(x);
  }
  return Mat::Identity(dim_, dim_);
}

double MetricChart::sqrt_det_at(const Vec& x) const {
  switch (kind_) {
    case ChartKind::Euclidean:
      return 1.0;
    case ChartKind::ConformalScalar:
      return std::pow(conformal_factor(x), dim_);
    case ChartKind::GeneralGrid: {
      Mat g = grid_metric_at(x);
      Eigen::LLT<Mat> llt(g);
      if (llt.info() != Eigen::Success)
        throw domain_error("chart: metric not positive-definite");
      double prod = 1.0;
      for (int i = 0; i < dim_; ++i) prod *= llt.matrixL()(i, i);
      return prod;  // sqrt(det g) = prod of Cholesky diagonal
    }
  }
  return 1.0;
}

double MetricChart::length_element(const Vec& x, const Vec& v) const {
  switch (kind_) {
    case ChartKind::Euclidean:
      return v.norm();
    case ChartKind::ConformalScalar:
      return conformal_factor(x) * v.norm();
    case ChartKind::GeneralGrid: {
      Mat g = grid_metric_at(x);
      return std::sqrt(v.dot(g * v));
    }
  }
  return v.norm();
}

double MetricChart::conformal_factor(const Vec& x) const {
  if (kind_ == ChartKind::Euclidean) return 1.0;
  if (kind_ != ChartKind::ConformalScalar)
    throw domain_error("chart: conformal factor undefined for grid metric");
  return lambda_.eval(std::span<const double>(x.data(), x.size()));
}

double segment_length(const Vec& a, const Vec& b, const MetricChart& chart) {
  Vec mid = 0.5 * (a + b);
  return chart.length_element(mid, b - a);
}

double polyline_length(const std::vector<Vec>& vertices, const MetricChart& chart) {
  if (vertices.size() < 2)
    throw domain_error("curve_length: need at least 2 vertices");
  for (const Vec& v : vertices) chart.require_inside(v, "curve_length");
  std::vector<double> parts;
  parts.reserve(vertices.size() - 1);
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
    parts.push_back(segment_length(vertices[i], vertices[i + 1], chart));
  return pairwise_sum(parts);
}

}  // namespace modp

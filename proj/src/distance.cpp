#include "modp/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "modp/radial.hpp"

namespace modp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Lattice {
  const MetricChart* chart;
  Box box;
  int dim;
  int res;
  double h[kMaxDim];
  std::size_t stride[kMaxDim];
  std::size_t count;

  Lattice(const MetricChart& c, int resolution)
      : chart(&c), box(c.domain()), dim(c.dim()), res(resolution) {
    count = 1;
    for (int a = 0; a < dim; ++a) {
      h[a] = (box.hi[a] - box.lo[a]) / (res - 1);
      count *= static_cast<std::size_t>(res);
    }
    std::size_t s = 1;
    for (int a = dim - 1; a >= 0; --a) {
      stride[a] = s;
      s *= static_cast<std::size_t>(res);
    }
  }

  Vec point(std::size_t idx) const {
    Vec x(dim);
    std::size_t rest = idx;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = box.lo[a] + (rest % res) * h[a];
      rest /= res;
    }
    return x;
  }

  void coords(std::size_t idx, int* out) const {
    std::size_t rest = idx;
    for (int a = dim - 1; a >= 0; --a) {
      out[a] = static_cast<int>(rest % res);
      rest /= res;
    }
  }
};

// Solve sum_a ((u - b_a)/c_a)^2 = rhs^2 over the subset of axes with b_a < u,
// taking the largest consistent root over all subsets (n <= 4, brute force).
double eikonal_update(const std::vector<std::pair<double, double>>& arrivals,
                      double rhs) {
  const int m = static_cast<int>(arrivals.size());
  double best = kInf;
  for (int mask = 1; mask < (1 << m); ++mask) {
    double A = 0.0, B = 0.0, C = -rhs * rhs, bmax = -kInf;
    for (int k = 0; k < m; ++k)
      if (mask & (1 << k)) {
        const auto [b, c] = arrivals[k];
        A += 1.0 / (c * c);
        B += b / (c * c);
        C += b * b / (c * c);
        bmax = std::max(bmax, b);
      }
    const double disc = B * B - A * C;
    if (disc < 0.0) continue;
    const double u = (B + std::sqrt(disc)) / A;
    if (u >= bmax - 1e-15) best = std::min(best, u);
  }
  return best;
}

void fast_marching(const Lattice& lat, std::vector<double>& u,
                   std::vector<char>& state, const std::vector<char>& frozen,
                   std::priority_queue<std::pair<double, std::size_t>,
                                       std::vector<std::pair<double, std::size_t>>,
                                       std::greater<>>& heap) {
  // state: 0 = far, 1 = narrow-band, 2 = accepted, 3 = blocked
  int ci[kMaxDim];
  while (!heap.empty()) {
    auto [val, idx] = heap.top();
    heap.pop();
    if (state[idx] == 2 || val > u[idx] + 1e-18) continue;
    state[idx] = 2;
    lat.coords(idx, ci);
    for (int a = 0; a < lat.dim; ++a)
      for (int dir = -1; dir <= 1; dir += 2) {
        const int nb = ci[a] + dir;
        if (nb < 0 || nb >= lat.res) continue;
        const std::size_t nidx = idx + static_cast<std::size_t>(dir) * lat.stride[a];
        // Exactly seeded nodes are final; the local solve undershoots on
        // curved fronts and must not degrade them.
        if (state[nidx] == 2 || state[nidx] == 3 || frozen[nidx]) continue;
        // Recompute the tentative value at nidx from accepted neighbors.
        int nci[kMaxDim];
        lat.coords(nidx, nci);
        const Vec x = lat.point(nidx);
        const double lam = lat.chart->kind() == ChartKind::Euclidean
                               ? 1.0
                               : lat.chart->conformal_factor(x);
        std::vector<std::pair<double, double>> arrivals;
        for (int b = 0; b < lat.dim; ++b) {
          double bestb = kInf, bestc = 0.0;
          for (int d = -1; d <= 1; d += 2) {
            const int j1 = nci[b] + d;
            if (j1 < 0 || j1 >= lat.res) continue;
            const std::size_t i1 = nidx + static_cast<std::size_t>(d) * lat.stride[b];
            if (state[i1] != 2) continue;
            double bb = u[i1], cc = lat.h[b];
            const int j2 = nci[b] + 2 * d;
            if (j2 >= 0 && j2 < lat.res) {
              const std::size_t i2 =
                  nidx + static_cast<std::size_t>(2 * d) * lat.stride[b];
              if (state[i2] == 2 && u[i2] <= u[i1]) {
                bb = (4.0 * u[i1] - u[i2]) / 3.0;  // one-sided second order
                cc = 2.0 * lat.h[b] / 3.0;
              }
            }
            if (bb < bestb) {
              bestb = bb;
              bestc = cc;
            }
          }
          if (bestb < kInf) arrivals.emplace_back(bestb, bestc);
        }
        if (arrivals.empty()) continue;
        const double cand = eikonal_update(arrivals, lam);
        if (cand < u[nidx]) {
          u[nidx] = cand;
          state[nidx] = 1;
          heap.emplace(cand, nidx);
        }
      }
  }
}

void dijkstra_grid(const Lattice& lat, std::vector<double>& u,
                   std::vector<char>& state,
                   std::priority_queue<std::pair<double, std::size_t>,
                                       std::vector<std::pair<double, std::size_t>>,
                                       std::greater<>>& heap) {
  // Primitive offsets with |o|_inf <= 2 give ~4% worst-case angular error.
  std::vector<std::vector<int>> offsets;
  const int n = lat.dim;
  std::vector<int> o(n, -2);
  while (true) {
    bool nonzero = false;
    int g = 0;
    for (int a = 0; a < n; ++a) {
      if (o[a] != 0) nonzero = true;
      g = std::gcd(g, std::abs(o[a]));
    }
    if (nonzero && g == 1) offsets.push_back(o);
    int a = n - 1;
    while (a >= 0 && o[a] == 2) o[a--] = -2;
    if (a < 0) break;
    ++o[a];
  }

  int ci[kMaxDim];
  while (!heap.empty()) {
    auto [val, idx] = heap.top();
    heap.pop();
    if (state[idx] == 2 || val > u[idx] + 1e-18) continue;
    state[idx] = 2;
    lat.coords(idx, ci);
    const Vec xa = lat.point(idx);
    for (const auto& off : offsets) {
      std::size_t nidx = idx;
      bool ok = true;
      for (int a = 0; a < n; ++a) {
        const int j = ci[a] + off[a];
        if (j < 0 || j >= lat.res) {
          ok = false;
          break;
        }
        nidx += static_cast<std::size_t>(off[a]) * lat.stride[a];
      }
      if (!ok) continue;
      if (state[nidx] == 2 || state[nidx] == 3) continue;
      const Vec xb = lat.point(nidx);
      const double w = segment_length(xa, xb, *lat.chart);
      if (u[idx] + w < u[nidx]) {
        u[nidx] = u[idx] + w;
        state[nidx] = 1;
        heap.emplace(u[nidx], nidx);
      }
    }
  }
}

}  // namespace

DistanceField compute_distance_field(
    const MetricChart& chart, const Vec& source, int resolution,
    const std::function<bool(const Vec&)>& blocked) {
  chart.require_inside(source, "distance field");
  if (resolution < 3) throw domain_error("distance field: resolution too small");
  Lattice lat(chart, resolution);
  std::vector<double> u(lat.count, kInf);
  std::vector<char> state(lat.count, 0);
  std::priority_queue<std::pair<double, std::size_t>,
                      std::vector<std::pair<double, std::size_t>>, std::greater<>>
      heap;

  if (blocked)
    for (std::size_t i = 0; i < lat.count; ++i)
      if (blocked(lat.point(i))) state[i] = 3;

  // Exact initialization around the source removes the point-source
  // singularity error of the marching scheme (curvature truncation near the
  // source otherwise costs a full order of accuracy). When chart rays from
  // the source are geodesics (Euclidean, or a conformal factor radially
  // symmetric about the source) and nothing is blocked, the whole inscribed
  // ball can be seeded exactly; otherwise seed a ball of radius ~ sqrt(h),
  // where the ray-star approximation error O(r^3) stays below the scheme's.
  RadialGauge gauge(chart, source);
  double hmax = 0.0;
  for (int a = 0; a < lat.dim; ++a) hmax = std::max(hmax, lat.h[a]);
  double t_in = kInf;
  for (int a = 0; a < lat.dim; ++a)
    t_in = std::min({t_in, lat.box.hi[a] - source[a], source[a] - lat.box.lo[a]});
  double init_chart_radius;
  if (!blocked && gauge.radially_symmetric())
    init_chart_radius = t_in * (1.0 - 1e-12);
  else
    init_chart_radius = std::min(
        0.999 * t_in, std::max(4.0 * hmax, 0.75 * std::sqrt(hmax * t_in)));
  std::vector<char> frozen(lat.count, 0);
  for (std::size_t i = 0; i < lat.count; ++i) {
    if (state[i] == 3) continue;
    const Vec x = lat.point(i);
    if ((x - source).norm() <= init_chart_radius) {
      u[i] = gauge.radius_of(x);
      heap.emplace(u[i], i);
      state[i] = 1;
      frozen[i] = 1;
    }
  }
  if (heap.empty()) throw domain_error("distance field: source is blocked");

  if (chart.kind() == ChartKind::GeneralGrid)
    dijkstra_grid(lat, u, state, heap);
  else
    fast_marching(lat, u, state, frozen, heap);

  DistanceField field;
  field.box = lat.box;
  field.dim = lat.dim;
  field.resolution = lat.res;
  field.values = std::move(u);
  return field;
}

double DistanceField::at(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim)
    throw domain_error("distance field: dimension mismatch");
  double w[kMaxDim];
  int i0[kMaxDim];
  for (int a = 0; a < dim; ++a) {
    const double h = (box.hi[a] - box.lo[a]) / (resolution - 1);
    double t = (x[a] - box.lo[a]) / h;
    if (t < -1e-9 || t > resolution - 1 + 1e-9)
      throw domain_error("distance field: point outside the box");
    t = std::clamp(t, 0.0, static_cast<double>(resolution - 1));
    i0[a] = std::min(static_cast<int>(t), resolution - 2);
    w[a] = t - i0[a];
  }
  double acc = 0.0;
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (c >> a) & 1;
      weight *= bit ? w[a] : (1.0 - w[a]);
      idx = idx * resolution + static_cast<std::size_t>(i0[a] + bit);
    }
    if (weight <= 0.0) continue;
    const double v = values[idx];
    if (std::isinf(v))
      throw domain_error("geodesic distance: target unreachable");
    acc += weight * v;
  }
  return acc;
}

double geodesic_distance(const Vec& x, const Vec& y, const MetricChart& chart,
                         int resolution) {
  chart.require_inside(x, "geodesic distance");
  chart.require_inside(y, "geodesic distance");
  if ((x - y).norm() == 0.0) return 0.0;
  DistanceField field = compute_distance_field(chart, x, resolution);
  return field.at(y);
}

}  // namespace modp

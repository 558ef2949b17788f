#include "tsg/delta_calculus.hpp"

#include "tsg/error.hpp"
#include "tsg/number_format.hpp"
#include "tsg/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace tsg {

GridFunction2D::GridFunction2D(TimeScale scale1, TimeScale scale2, std::size_t dim)
    : scale1_(std::move(scale1)), scale2_(std::move(scale2)), dim_(dim) {
  if (dim_ == 0)
    throw DomainError("grid function dimension must be >= 1");
  xs_ = scale1_.lattice();
  ys_ = scale2_.lattice();
  values_.assign(xs_.size() * ys_.size() * dim_, 0.0);
}

GridFunction2D::GridFunction2D(TimeScale scale1, TimeScale scale2, std::size_t dim,
                               std::vector<double> values)
    : GridFunction2D(std::move(scale1), std::move(scale2), dim) {
  if (values.size() != values_.size())
    throw DomainError("grid value table has " + std::to_string(values.size()) + " entries, expected " +
                      std::to_string(values_.size()));
  values_ = std::move(values);
}

GridFunction2D GridFunction2D::sample(TimeScale scale1, TimeScale scale2, std::size_t dim,
                                      const std::function<Vec(double, double)>& fn) {
  GridFunction2D out(std::move(scale1), std::move(scale2), dim);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const Vec v = fn(out.xs_[i], out.ys_[j]);
      if (v.size() != dim)
        throw DomainError("sampled function returned " + std::to_string(v.size()) +
                          " components, expected " + std::to_string(dim));
      std::copy(v.begin(), v.end(), out.at(i, j).begin());
    }
  out.require_finite();
  return out;
}

std::span<const double> GridFunction2D::at(std::size_t i, std::size_t j) const {
  return {values_.data() + (i * ys_.size() + j) * dim_, dim_};
}

std::span<double> GridFunction2D::at(std::size_t i, std::size_t j) {
  return {values_.data() + (i * ys_.size() + j) * dim_, dim_};
}

void GridFunction2D::require_finite() const {
  for (std::size_t n = 0; n < values_.size(); ++n)
    if (!std::isfinite(values_[n])) {
      const std::size_t cell = n / dim_;
      const std::size_t i = cell / ys_.size(), j = cell % ys_.size();
      throw DomainError("non-finite grid value at (" + format_double(xs_[i]) + "," +
                        format_double(ys_[j]) + ")");
    }
}

double sup_distance(const GridFunction2D& a, const GridFunction2D& b) {
  if (a.values().size() != b.values().size())
    throw DomainError("sup_distance of grids with different shapes");
  double worst = 0.0;
  auto av = a.values(), bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n)
    worst = std::max(worst, std::abs(av[n] - bv[n]));
  return worst;
}

// ---------------------------------------------------------------------------
// derivatives

namespace {

void require_index(const GridFunction2D& u, std::size_t i, std::size_t j) {
  if (i >= u.rows() || j >= u.cols())
    throw DomainError("lattice index (" + std::to_string(i) + "," + std::to_string(j) +
                      ") out of range");
}

} // namespace

Vec partial_gamma(const GridFunction2D& u, std::size_t i, std::size_t j) {
  require_index(u, i, j);
  if (i + 1 == u.rows())
    throw DerivativeUndefined("partial_gamma undefined at the maximum of the first scale");
  const double mu = u.xs()[i + 1] - u.xs()[i];
  auto here = u.at(i, j), next = u.at(i + 1, j);
  Vec out(u.dim());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = (next[c] - here[c]) / mu;
  return out;
}

Vec partial_delta(const GridFunction2D& u, std::size_t i, std::size_t j) {
  require_index(u, i, j);
  if (j + 1 == u.cols())
    throw DerivativeUndefined("partial_delta undefined at the maximum of the second scale");
  const double mu = u.ys()[j + 1] - u.ys()[j];
  auto here = u.at(i, j), next = u.at(i, j + 1);
  Vec out(u.dim());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = (next[c] - here[c]) / mu;
  return out;
}

Vec mixed_gamma_delta(const GridFunction2D& u, std::size_t i, std::size_t j) {
  require_index(u, i, j);
  if (j + 1 == u.cols())
    throw DerivativeUndefined("mixed derivative undefined at the maximum of the second scale");
  const Vec g0 = partial_gamma(u, i, j);
  const Vec g1 = partial_gamma(u, i, j + 1);
  const double mu = u.ys()[j + 1] - u.ys()[j];
  Vec out(u.dim());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = (g1[c] - g0[c]) / mu;
  return out;
}

// ---------------------------------------------------------------------------
// integrals

namespace {

void require_rect(const TimeScale& T1, const TimeScale& T2, const Rect& r) {
  if (!T1.contains(r.a) || !T1.contains(r.b) || !T2.contains(r.c) || !T2.contains(r.d))
    throw DomainError("rectangle [" + format_double(r.a) + "," + format_double(r.b) + "]x[" +
                      format_double(r.c) + "," + format_double(r.d) + "] has a corner outside the scales");
  if (r.a > r.b || r.c > r.d)
    throw DomainError("rectangle corners must satisfy a <= b and c <= d");
}

// Partition nodes of [a, b], or the single node a when the interval is empty.
std::vector<double> nodes(const TimeScale& T, double a, double b, double delta) {
  if (a >= b)
    return {a};
  auto p = make_partition(T, a, b, delta);
  return {p.points().begin(), p.points().end()};
}

std::vector<double> cell_measures(const TimeScale& T, const std::vector<double>& pts) {
  std::vector<double> m;
  for (std::size_t l = 0; l + 1 < pts.size(); ++l)
    m.push_back(ts_measure(T, pts[l], pts[l + 1]));
  return m;
}

Vec finish(std::vector<CompensatedSum>& acc) {
  Vec out(acc.size());
  for (std::size_t c = 0; c < acc.size(); ++c)
    out[c] = acc[c].value();
  return out;
}

} // namespace

Vec delta_integral_1d(const TimeScale& T, double a, double b, double delta, const Integrand1D& g) {
  if (!T.contains(a) || !T.contains(b))
    throw DomainError("integration endpoints [" + format_double(a) + "," + format_double(b) +
                      ") not in " + T.to_string());
  if (a > b)
    throw DomainError("integration requires a <= b");
  if (a == b)
    return Vec(g(a).size(), 0.0);
  const auto pts = nodes(T, a, b, delta);
  const auto mu = cell_measures(T, pts);
  std::vector<CompensatedSum> acc;
  for (std::size_t l = 0; l < mu.size(); ++l) {
    const Vec v = g(pts[l]);
    if (acc.empty())
      acc.resize(v.size());
    for (std::size_t c = 0; c < v.size(); ++c)
      acc[c] += v[c] * mu[l];
  }
  return finish(acc);
}

DoubleIntegralResult double_integral(const TimeScale& T1, const TimeScale& T2, const Rect& rect,
                                     double delta, const Integrand2D& g) {
  require_rect(T1, T2, rect);
  const auto p1 = nodes(T1, rect.a, rect.b, delta);
  const auto p2 = nodes(T2, rect.c, rect.d, delta);
  const auto m1 = cell_measures(T1, p1);
  const auto m2 = cell_measures(T2, p2);
  DoubleIntegralResult out;
  out.delta_used = delta;
  out.cells_used = m1.size() * m2.size();
  if (out.cells_used == 0) {
    out.value.assign(g(rect.a, rect.c).size(), 0.0);
    return out;
  }
  std::vector<CompensatedSum> acc;
  for (std::size_t l = 0; l < m1.size(); ++l)
    for (std::size_t k = 0; k < m2.size(); ++k) {
      const Vec v = g(p1[l], p2[k]);
      if (acc.empty())
        acc.resize(v.size());
      const double cell = m1[l] * m2[k];
      for (std::size_t c = 0; c < v.size(); ++c)
        acc[c] += v[c] * cell;
    }
  out.value = finish(acc);
  return out;
}

Vec iterated_integral(const TimeScale& T1, const TimeScale& T2, const Rect& rect, double delta,
                      const Integrand2D& g) {
  require_rect(T1, T2, rect);
  if (rect.a == rect.b || rect.c == rect.d)
    return Vec(g(rect.a, rect.c).size(), 0.0);
  const auto inner = [&](double s) {
    return delta_integral_1d(T2, rect.c, rect.d, delta, [&](double t) { return g(s, t); });
  };
  return delta_integral_1d(T1, rect.a, rect.b, delta, inner);
}

AxisCells axis_cells(const TimeScale& T, const Partition& p) {
  AxisCells cells;
  const auto pts = p.points();
  for (std::size_t l = 0; l + 1 < pts.size(); ++l) {
    cells.index.push_back(T.index_of(pts[l]));
    cells.measure.push_back(ts_measure(T, pts[l], pts[l + 1]));
  }
  return cells;
}

namespace {

AxisCells grid_cells(const TimeScale& T, double a, double b, double delta) {
  if (a >= b)
    return {};
  return axis_cells(T, make_partition(T, a, b, delta));
}

} // namespace

Vec iterated_integral(const GridFunction2D& g, const AxisCells& cells1, const AxisCells& cells2) {
  const std::size_t n = g.dim();
  std::vector<CompensatedSum> outer(n);
  std::vector<CompensatedSum> inner(n);
  for (std::size_t l = 0; l < cells1.index.size(); ++l) {
    std::fill(inner.begin(), inner.end(), CompensatedSum{});
    for (std::size_t k = 0; k < cells2.index.size(); ++k) {
      auto v = g.at(cells1.index[l], cells2.index[k]);
      for (std::size_t c = 0; c < n; ++c)
        inner[c] += v[c] * cells2.measure[k];
    }
    for (std::size_t c = 0; c < n; ++c)
      outer[c] += inner[c].value() * cells1.measure[l];
  }
  return finish(outer);
}

DoubleIntegralResult double_integral(const GridFunction2D& g, const Rect& rect, double delta) {
  require_rect(g.scale1(), g.scale2(), rect);
  const auto c1 = grid_cells(g.scale1(), rect.a, rect.b, delta);
  const auto c2 = grid_cells(g.scale2(), rect.c, rect.d, delta);
  std::vector<CompensatedSum> acc(g.dim());
  for (std::size_t l = 0; l < c1.index.size(); ++l)
    for (std::size_t k = 0; k < c2.index.size(); ++k) {
      auto v = g.at(c1.index[l], c2.index[k]);
      const double cell = c1.measure[l] * c2.measure[k];
      for (std::size_t c = 0; c < v.size(); ++c)
        acc[c] += v[c] * cell;
    }
  return {finish(acc), c1.index.size() * c2.index.size(), delta};
}

Vec iterated_integral(const GridFunction2D& g, const Rect& rect, double delta) {
  require_rect(g.scale1(), g.scale2(), rect);
  return iterated_integral(g, grid_cells(g.scale1(), rect.a, rect.b, delta),
                           grid_cells(g.scale2(), rect.c, rect.d, delta));
}

// ---------------------------------------------------------------------------
// mean value containment

namespace {

using P2 = std::array<double, 2>;

double cross(const P2& o, const P2& a, const P2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain; counter-clockwise, no repeated end point.
std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3)
    return pts;
  std::vector<P2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0)
      --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double distance_to_segment(const P2& p, const P2& a, const P2& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

// Signed slack of p inside the hull: >= 0 inside, negative outside.
double hull_slack(const std::vector<P2>& hull, const P2& p) {
  if (hull.size() == 1)
    return -std::hypot(p[0] - hull[0][0], p[1] - hull[0][1]);
  if (hull.size() == 2)
    return -distance_to_segment(p, hull[0], hull[1]);
  double slack = std::numeric_limits<double>::infinity();
  bool outside = false;
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const P2& a = hull[e];
    const P2& b = hull[(e + 1) % hull.size()];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    const double d = cross(a, b, p) / len;
    if (d < 0)
      outside = true;
    slack = std::min(slack, d);
  }
  if (!outside)
    return slack;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < hull.size(); ++e)
    dist = std::min(dist, distance_to_segment(p, hull[e], hull[(e + 1) % hull.size()]));
  return -dist;
}

MvtReport containment(const Vec& integral, double measure, const std::vector<Vec>& samples) {
  const std::size_t n = integral.size();
  MvtReport rep;
  rep.integral = integral;
  rep.measure = measure;
  rep.lower.assign(n, std::numeric_limits<double>::infinity());
  rep.upper.assign(n, -std::numeric_limits<double>::infinity());
  double scale = 1.0;
  for (const auto& v : samples)
    for (std::size_t c = 0; c < n; ++c) {
      rep.lower[c] = std::min(rep.lower[c], v[c]);
      rep.upper[c] = std::max(rep.upper[c], v[c]);
      scale = std::max(scale, std::abs(v[c]));
    }
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    rep.lower[c] *= measure;
    rep.upper[c] *= measure;
    rep.margin = std::min({rep.margin, integral[c] - rep.lower[c], rep.upper[c] - integral[c]});
  }
  if (n <= 2) {
    rep.hull_checked = true;
    if (n == 2) {
      std::vector<P2> pts;
      pts.reserve(samples.size());
      for (const auto& v : samples)
        pts.push_back({v[0], v[1]});
      const P2 mean{integral[0] / measure, integral[1] / measure};
      rep.margin = std::min(rep.margin, measure * hull_slack(convex_hull(std::move(pts)), mean));
    }
  }
  const double tol = 1e-10 * measure * scale;
  rep.ok = rep.margin >= -tol;
  return rep;
}

} // namespace

MvtReport mvt_containment_check(const TimeScale& T1, const TimeScale& T2, const Rect& rect,
                                double delta, const Integrand2D& g) {
  require_rect(T1, T2, rect);
  if (!(rect.a < rect.b) || !(rect.c < rect.d))
    throw DomainError("mean value check needs a nonempty rectangle");
  const double measure = ts_measure(T1, rect.a, rect.b) * ts_measure(T2, rect.c, rect.d);
  const auto integral = double_integral(T1, T2, rect, delta, g).value;
  std::vector<Vec> samples;
  for (double s : nodes(T1, rect.a, rect.b, delta))
    for (double t : nodes(T2, rect.c, rect.d, delta))
      samples.push_back(g(s, t));
  return containment(integral, measure, samples);
}

MvtReport mvt_containment_check(const GridFunction2D& g, const Rect& rect, double delta) {
  require_rect(g.scale1(), g.scale2(), rect);
  if (!(rect.a < rect.b) || !(rect.c < rect.d))
    throw DomainError("mean value check needs a nonempty rectangle");
  const double measure =
      ts_measure(g.scale1(), rect.a, rect.b) * ts_measure(g.scale2(), rect.c, rect.d);
  const auto integral = double_integral(g, rect, delta).value;
  std::vector<Vec> samples;
  const std::size_t i0 = g.scale1().index_of(rect.a), i1 = g.scale1().index_of(rect.b);
  const std::size_t j0 = g.scale2().index_of(rect.c), j1 = g.scale2().index_of(rect.d);
  for (std::size_t i = i0; i <= i1; ++i)
    for (std::size_t j = j0; j <= j1; ++j) {
      auto v = g.at(i, j);
      samples.emplace_back(v.begin(), v.end());
    }
  return containment(integral, measure, samples);
}

} // namespace tsg

#pragma once

#include "tsg/time_scale.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tsg {

using Vec = std::vector<double>;

/// Values of an R^n-valued function on the lattice scale1 x scale2.
/// Both scales must be discrete. Storage is row-major in (i, j, component).
class GridFunction2D {
public:
  GridFunction2D(TimeScale scale1, TimeScale scale2, std::size_t dim);
  GridFunction2D(TimeScale scale1, TimeScale scale2, std::size_t dim, std::vector<double> values);

  /// Samples fn(x, y) at every lattice point.
  static GridFunction2D sample(TimeScale scale1, TimeScale scale2, std::size_t dim,
                               const std::function<Vec(double, double)>& fn);

  const TimeScale& scale1() const noexcept { return scale1_; }
  const TimeScale& scale2() const noexcept { return scale2_; }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::size_t rows() const noexcept { return xs_.size(); }
  std::size_t cols() const noexcept { return ys_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> at(std::size_t i, std::size_t j) const;
  std::span<double> at(std::size_t i, std::size_t j);
  std::span<const double> values() const noexcept { return values_; }

  /// Throws DomainError if any entry is NaN or infinite.
  void require_finite() const;

  friend bool operator==(const GridFunction2D& a, const GridFunction2D& b) {
    return a.dim_ == b.dim_ && a.xs_ == b.xs_ && a.ys_ == b.ys_ && a.values_ == b.values_;
  }

private:
  TimeScale scale1_;
  TimeScale scale2_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// max over components and lattice points of |a - b|.
double sup_distance(const GridFunction2D& a, const GridFunction2D& b);

/// Partial delta derivative in the first variable at lattice point (i, j).
Vec partial_gamma(const GridFunction2D& u, std::size_t i, std::size_t j);
/// Partial delta derivative in the second variable at lattice point (i, j).
Vec partial_delta(const GridFunction2D& u, std::size_t i, std::size_t j);
/// partial_delta of partial_gamma: the four-point stencil divided by mu1*mu2.
Vec mixed_gamma_delta(const GridFunction2D& u, std::size_t i, std::size_t j);

/// Integration rectangle [a, b] x [c, d]; sums run over [a, b) x [c, d).
struct Rect {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

struct DoubleIntegralResult {
  Vec value;
  std::size_t cells_used = 0;
  double delta_used = 0.0;
};

using Integrand1D = std::function<Vec(double)>;
using Integrand2D = std::function<Vec(double, double)>;

/// Left-endpoint delta Riemann sum of g over [a, b) on a partition finer than
/// delta. Exact on purely scattered stretches when delta is below every
/// graininess.
Vec delta_integral_1d(const TimeScale& T, double a, double b, double delta, const Integrand1D& g);

/// Product-partition Riemann sum, row-major with compensated accumulation.
DoubleIntegralResult double_integral(const TimeScale& T1, const TimeScale& T2, const Rect& rect,
                                     double delta, const Integrand2D& g);

/// Inner 1-D integral in t, then outer in s.
Vec iterated_integral(const TimeScale& T1, const TimeScale& T2, const Rect& rect, double delta,
                      const Integrand2D& g);

// Lattice-sampled variants: partition nodes are looked up in the grid.
DoubleIntegralResult double_integral(const GridFunction2D& g, const Rect& rect, double delta);
Vec iterated_integral(const GridFunction2D& g, const Rect& rect, double delta);

/// Cells of a partition of a discrete scale: lattice index of each cell's
/// left endpoint and the cell's time-scale measure.
struct AxisCells {
  std::vector<std::size_t> index;
  std::vector<double> measure;
};

AxisCells axis_cells(const TimeScale& T, const Partition& p);

/// Iterated sum over precomputed cells; the solver's hot path.
Vec iterated_integral(const GridFunction2D& g, const AxisCells& cells1, const AxisCells& cells2);

struct MvtReport {
  bool ok = false;
  /// Most negative slack of the containment (>= -tolerance when ok).
  double margin = 0.0;
  Vec integral;
  double measure = 0.0;
  Vec lower; ///< measure * componentwise min
  Vec upper; ///< measure * componentwise max
  bool hull_checked = false; ///< exact planar hull membership tested (n <= 2)
};

/// Checks  integral(g, rect) in measure(rect) * conv g(rect)  against the
/// values g takes at the partition nodes. For n <= 2 exact hull membership is
/// tested; for n > 2 only the componentwise bounding box.
MvtReport mvt_containment_check(const TimeScale& T1, const TimeScale& T2, const Rect& rect,
                                double delta, const Integrand2D& g);
MvtReport mvt_containment_check(const GridFunction2D& g, const Rect& rect, double delta);

} // namespace tsg

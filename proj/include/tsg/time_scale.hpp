#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsg {

/// Closed interval [lo, hi]; lo == hi encodes an isolated point.
struct Segment {
  double lo = 0.0;
  double hi = 0.0;

  bool is_point() const noexcept { return lo == hi; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Absolute tolerance used for membership and point identification.
inline constexpr double kMembershipTol = 1e-12;

/// A bounded time scale in canonical form: a sorted, pairwise disjoint union
/// of closed intervals and isolated points whose minimum element is 0.
///
/// Instances are immutable after construction.
class TimeScale {
public:
  /// Takes segments already in canonical order; throws DomainError otherwise.
  explicit TimeScale(std::vector<Segment> segments);

  /// Builds the union of arbitrary (possibly overlapping, unsorted) items.
  static TimeScale from_union(std::vector<Segment> items);

  /// Integer lattice {0, 1, ..., n}.
  static TimeScale integers(int n);
  /// The real interval [0, hi].
  static TimeScale interval(double hi);
  /// Explicit finite point set (must contain 0).
  static TimeScale points(std::vector<double> pts);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double min() const noexcept { return segments_.front().lo; }
  double max() const noexcept { return segments_.back().hi; }

  bool contains(double t) const noexcept;
  /// True when every segment is an isolated point.
  bool is_discrete() const noexcept;
  bool has_dense_part() const noexcept { return !is_discrete(); }

  /// Lattice points of a discrete scale, ascending. Throws DomainError if dense.
  std::vector<double> lattice() const;
  std::size_t size() const;

  /// Index of `t` in lattice(); throws DomainError if `t` is not a lattice point.
  std::size_t index_of(double t) const;

  std::string to_string() const;

  friend bool operator==(const TimeScale&, const TimeScale&) = default;

  /// Index of the segment holding t (within kMembershipTol), if any.
  std::optional<std::size_t> segment_of(double t) const noexcept;

private:
  std::vector<Segment> segments_;
  std::vector<double> lattice_; // cached when discrete
};

/// σ(t): least element of T strictly greater than t, or t itself at max T.
double forward_jump(const TimeScale& T, double t);

/// μ(t) = σ(t) − t.
double graininess(const TimeScale& T, double t);

/// Time-scale measure of [a, b) ∩ T: dense length plus graininess of the
/// scattered points in the half-open set.
double ts_measure(const TimeScale& T, double a, double b);

/// max(T ∩ (-inf, x]); requires x >= min T.
double largest_member_at_most(const TimeScale& T, double x);

/// Ordered division a = a_0 < ... < a_n = b of a time-scale interval, every
/// cell of which has measure <= delta or is a single forward jump.
class Partition {
public:
  Partition(std::vector<double> points, double delta)
      : points_(std::move(points)), delta_(delta) {}

  std::span<const double> points() const noexcept { return points_; }
  std::size_t cells() const noexcept { return points_.empty() ? 0 : points_.size() - 1; }
  double delta() const noexcept { return delta_; }

private:
  std::vector<double> points_;
  double delta_;
};

/// Greedy left-to-right partition of [a, b]: each cell is extended to the
/// largest admissible measure <= delta, and any jump whose graininess exceeds
/// delta becomes a cell of its own.
Partition make_partition(const TimeScale& T, double a, double b, double delta);

/// Replaces each dense segment by an arithmetic lattice of step <= h that
/// includes both endpoints. Isolated points are kept.
TimeScale discretize(const TimeScale& T, double h);

} // namespace tsg

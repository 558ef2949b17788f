#include "tsg/time_scale.hpp"

#include "tsg/error.hpp"
#include "tsg/number_format.hpp"
#include "tsg/summation.hpp"

#include <algorithm>
#include <cmath>

namespace tsg {

namespace {

std::string pt(double t) { return format_double(t); }

} // namespace

TimeScale::TimeScale(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty())
    throw DomainError("time scale must be nonempty");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi))
      throw DomainError("time scale must be bounded");
    if (s.lo > s.hi)
      throw DomainError("segment [" + pt(s.lo) + "," + pt(s.hi) + "] has lo > hi");
    if (k > 0 && !(s.lo > segments_[k - 1].hi))
      throw DomainError("segments must be sorted and pairwise disjoint");
  }
  if (std::abs(segments_.front().lo) > kMembershipTol)
    throw DomainError("time scale minimum must be 0, got " + pt(segments_.front().lo));
  segments_.front().lo = 0.0;
  if (segments_.front().hi < 0.0)
    segments_.front().hi = 0.0;

  if (is_discrete()) {
    lattice_.reserve(segments_.size());
    for (const auto& s : segments_)
      lattice_.push_back(s.lo);
  }
}

TimeScale TimeScale::from_union(std::vector<Segment> items) {
  if (items.empty())
    throw DomainError("time scale must be nonempty");
  std::sort(items.begin(), items.end(), [](const Segment& a, const Segment& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<Segment> merged;
  for (const auto& s : items) {
    if (s.lo > s.hi)
      throw DomainError("segment [" + pt(s.lo) + "," + pt(s.hi) + "] has lo > hi");
    if (!merged.empty() && s.lo <= merged.back().hi + kMembershipTol)
      merged.back().hi = std::max(merged.back().hi, s.hi);
    else
      merged.push_back(s);
  }
  return TimeScale(std::move(merged));
}

TimeScale TimeScale::integers(int n) {
  std::vector<Segment> segs;
  for (int k = 0; k <= n; ++k)
    segs.push_back({double(k), double(k)});
  return TimeScale(std::move(segs));
}

TimeScale TimeScale::interval(double hi) { return TimeScale({{0.0, hi}}); }

TimeScale TimeScale::points(std::vector<double> pts) {
  std::vector<Segment> segs;
  segs.reserve(pts.size());
  for (double p : pts)
    segs.push_back({p, p});
  return from_union(std::move(segs));
}

std::optional<std::size_t> TimeScale::segment_of(double t) const noexcept {
  if (!std::isfinite(t))
    return std::nullopt;
  // first segment whose hi >= t - tol
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t - kMembershipTol,
                             [](const Segment& s, double v) { return s.hi < v; });
  if (it == segments_.end() || it->lo - kMembershipTol > t)
    return std::nullopt;
  return std::size_t(it - segments_.begin());
}

bool TimeScale::contains(double t) const noexcept { return segment_of(t).has_value(); }

bool TimeScale::is_discrete() const noexcept {
  return std::all_of(segments_.begin(), segments_.end(),
                     [](const Segment& s) { return s.is_point(); });
}

std::vector<double> TimeScale::lattice() const {
  if (!is_discrete())
    throw DomainError("time scale " + to_string() + " has dense segments; discretize it first");
  return lattice_;
}

std::size_t TimeScale::size() const { return lattice().size(); }

std::size_t TimeScale::index_of(double t) const {
  if (!is_discrete())
    throw DomainError("index_of on a non-discrete time scale");
  auto it = std::lower_bound(lattice_.begin(), lattice_.end(), t - kMembershipTol);
  if (it == lattice_.end() || std::abs(*it - t) > kMembershipTol)
    throw DomainError(pt(t) + " is not a lattice point of " + to_string());
  return std::size_t(it - lattice_.begin());
}

std::string TimeScale::to_string() const {
  std::string out;
  for (const auto& s : segments_) {
    if (!out.empty())
      out += "; ";
    out += s.is_point() ? "{" + pt(s.lo) + "}" : "[" + pt(s.lo) + "," + pt(s.hi) + "]";
  }
  return out;
}

double forward_jump(const TimeScale& T, double t) {
  auto k = T.segment_of(t);
  if (!k)
    throw DomainError(pt(t) + " is not in time scale " + T.to_string());
  const auto& segs = T.segments();
  const Segment& s = segs[*k];
  if (t < s.hi - kMembershipTol)
    return t;
  if (*k + 1 == segs.size())
    return t;
  return segs[*k + 1].lo;
}

double graininess(const TimeScale& T, double t) { return forward_jump(T, t) - t; }

double ts_measure(const TimeScale& T, double a, double b) {
  if (!T.contains(a) || !T.contains(b))
    throw DomainError("measure endpoints [" + pt(a) + "," + pt(b) + ") not in " + T.to_string());
  if (a > b)
    throw DomainError("measure requires a <= b, got [" + pt(a) + "," + pt(b) + ")");
  const auto& segs = T.segments();
  CompensatedSum total;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const Segment& s = segs[k];
    if (s.lo >= b - kMembershipTol)
      break;
    if (!s.is_point()) {
      const double len = std::min(s.hi, b) - std::max(s.lo, a);
      if (len > 0.0)
        total += len;
    }
    // right-scattered endpoint of this segment contributes its gap
    if (k + 1 < segs.size() && s.hi >= a - kMembershipTol && s.hi < b - kMembershipTol)
      total += segs[k + 1].lo - s.hi;
  }
  return total.value();
}

double largest_member_at_most(const TimeScale& T, double x) {
  const auto& segs = T.segments();
  auto it = std::upper_bound(segs.begin(), segs.end(), x + kMembershipTol,
                             [](double v, const Segment& s) { return v < s.lo; });
  if (it == segs.begin())
    throw DomainError(pt(x) + " lies below the time scale minimum");
  const Segment& s = *std::prev(it);
  return x >= s.hi - kMembershipTol ? s.hi : x;
}

Partition make_partition(const TimeScale& T, double a, double b, double delta) {
  if (!T.contains(a) || !T.contains(b))
    throw DomainError("partition endpoints [" + pt(a) + "," + pt(b) + "] not in " + T.to_string());
  if (!(a < b))
    throw DomainError("partition requires a < b, got [" + pt(a) + "," + pt(b) + "]");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw DomainError("partition fineness must be positive, got " + pt(delta));

  std::vector<double> points{a};
  double cur = a;
  while (cur < b - kMembershipTol) {
    double next = largest_member_at_most(T, std::min(cur + delta, b));
    if (next <= cur + kMembershipTol)
      next = forward_jump(T, cur); // jump longer than delta: its own cell
    if (next >= b - kMembershipTol)
      next = b;
    if (!(next > cur))
      throw DomainError("partition made no progress at " + pt(cur));
    points.push_back(next);
    cur = next;
  }
  points.back() = b;
  return Partition(std::move(points), delta);
}

TimeScale discretize(const TimeScale& T, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError("discretization step must be positive, got " + pt(h));
  std::vector<Segment> out;
  for (const auto& s : T.segments()) {
    if (s.is_point()) {
      out.push_back(s);
      continue;
    }
    const double len = s.hi - s.lo;
    const auto n = std::max<long>(1, long(std::ceil(len / h - 1e-9)));
    for (long k = 0; k < n; ++k) {
      const double p = s.lo + len * double(k) / double(n);
      out.push_back({p, p});
    }
    out.push_back({s.hi, s.hi});
  }
  return TimeScale(std::move(out));
}

} // namespace tsg

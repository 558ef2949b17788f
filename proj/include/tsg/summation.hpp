#pragma once

#ifdef __FAST_MATH__
#error fast math enabled, this would negate compensation.
#endif

#include <cmath>

namespace tsg {

/// Neumaier-compensated accumulator. Results depend only on the order of
/// additions, so a fixed traversal order gives bit-reproducible sums.
class CompensatedSum {
public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
      carry_ += (sum_ - t) + value;
    else
      carry_ += (value - t) + sum_;
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  double value() const noexcept { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

} // namespace tsg

#pragma once

#include <cmath>

namespace greenfcc {

/// Neumaier variant of Kahan summation. Unlike plain Kahan it stays exact when
/// an addend is larger in magnitude than the running sum.
template <typename Scalar>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Scalar initial) : sum_(initial) {}

  CompensatedSum& operator+=(Scalar value) {
    const Scalar next = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - next) + value;
    } else {
      compensation_ += (value - next) + sum_;
    }
    sum_ = next;
    return *this;
  }

  [[nodiscard]] Scalar value() const { return sum_ + compensation_; }

 private:
  Scalar sum_{0};
  Scalar compensation_{0};
};

}  // namespace greenfcc

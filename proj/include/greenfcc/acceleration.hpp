#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "greenfcc/types.hpp"

namespace greenfcc {

/// A zero first difference inside the sequence leaves the transform undefined.
/// The caller should fall back to the last raw partial sum.
class DegenerateDifference : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PartialSumSequence {
  Eigen::VectorXd sums;
  Method source_method = Method::series5;
};

template <typename Scalar>
struct AcceleratedValue {
  Scalar value;
  /// Difference between the last two retained transform columns. A heuristic,
  /// not a bound.
  Scalar error_estimate;
};

namespace detail {

template <typename Derived>
void check_sequence(const Eigen::DenseBase<Derived>& sums) {
  if (sums.size() < 1) throw std::invalid_argument("acceleration: empty sequence");
  if (!sums.allFinite()) throw std::invalid_argument("acceleration: non-finite partial sum");
}

template <typename Derived>
void check_interior_differences(const Eigen::DenseBase<Derived>& sums) {
  for (Eigen::Index i = 0; i + 1 < sums.size(); ++i) {
    if (sums(i + 1) == sums(i)) throw DegenerateDifference("acceleration: equal consecutive partial sums");
  }
}

template <typename Derived>
std::vector<typename Derived::Scalar> to_vector(const Eigen::DenseBase<Derived>& sums) {
  std::vector<typename Derived::Scalar> out(static_cast<std::size_t>(sums.size()));
  for (Eigen::Index i = 0; i < sums.size(); ++i) out[static_cast<std::size_t>(i)] = sums(i);
  return out;
}

}  // namespace detail

/// Wynn epsilon algorithm. Returns the last entry of the highest even column
/// of the epsilon table that could be formed.
///
/// A sequence whose last two entries coincide is already converged and is
/// returned as is. Columns stop growing at the first zero difference or
/// non-finite entry.
template <typename Derived>
auto wynn_epsilon(const Eigen::DenseBase<Derived>& sums) -> AcceleratedValue<typename Derived::Scalar> {
  using Scalar = typename Derived::Scalar;
  detail::check_sequence(sums);
  const Eigen::Index count = sums.size();
  if (count < 3) throw std::invalid_argument("wynn_epsilon: needs at least 3 partial sums");
  if (sums(count - 1) == sums(count - 2)) return {sums(count - 1), Scalar(0)};
  detail::check_interior_differences(sums);

  std::vector<Scalar> previous(static_cast<std::size_t>(count), Scalar(0));  // column -1
  std::vector<Scalar> current = detail::to_vector(sums);
  Scalar best = current.back();
  Scalar prior_best = sums(count - 2);

  for (int column = 1; current.size() > 1; ++column) {
    std::vector<Scalar> next(current.size() - 1);
    bool usable = true;
    for (std::size_t i = 0; i + 1 < current.size(); ++i) {
      const Scalar difference = current[i + 1] - current[i];
      if (difference == Scalar(0)) {
        usable = false;
        break;
      }
      next[i] = previous[i + 1] + Scalar(1) / difference;
      if (!std::isfinite(next[i])) {
        usable = false;
        break;
      }
    }
    if (!usable) break;
    previous = std::move(current);
    current = std::move(next);
    if (column % 2 == 0) {
      prior_best = best;
      best = current.back();
    }
  }
  return {best, std::abs(best - prior_best)};
}

/// Iterated Aitken delta-squared. Each pass maps s_i, s_(i+1), s_(i+2) to
/// s_(i+2) - (Delta s_(i+1))^2 / Delta^2 s_i; iteration stops when fewer than
/// three entries remain or a second difference vanishes.
template <typename Derived>
auto aitken_delta2(const Eigen::DenseBase<Derived>& sums) -> AcceleratedValue<typename Derived::Scalar> {
  using Scalar = typename Derived::Scalar;
  detail::check_sequence(sums);
  const Eigen::Index count = sums.size();
  if (count < 3) throw std::invalid_argument("aitken_delta2: needs at least 3 partial sums");
  if (sums(count - 1) == sums(count - 2)) return {sums(count - 1), Scalar(0)};
  detail::check_interior_differences(sums);

  std::vector<Scalar> level = detail::to_vector(sums);
  Scalar prior_best = sums(count - 2);
  bool first_pass = true;
  while (level.size() >= 3) {
    std::vector<Scalar> next(level.size() - 2);
    bool usable = true;
    for (std::size_t i = 0; i + 2 < level.size(); ++i) {
      const Scalar forward = level[i + 2] - level[i + 1];
      const Scalar second = forward - (level[i + 1] - level[i]);
      if (second == Scalar(0)) {
        usable = false;
        break;
      }
      next[i] = level[i + 2] - forward * forward / second;
      if (!std::isfinite(next[i])) {
        usable = false;
        break;
      }
    }
    if (!usable) {
      if (first_pass) throw DegenerateDifference("aitken_delta2: vanishing second difference");
      break;
    }
    first_pass = false;
    prior_best = level.back();
    level = std::move(next);
  }
  return {level.back(), std::abs(level.back() - prior_best)};
}

inline AcceleratedValue<double> accelerate(const PartialSumSequence& sequence, Acceleration kind) {
  switch (kind) {
    case Acceleration::wynn: return wynn_epsilon(sequence.sums);
    case Acceleration::aitken: return aitken_delta2(sequence.sums);
    case Acceleration::none: break;
  }
  const auto& sums = sequence.sums;
  const double last = sums(sums.size() - 1);
  return {last, sums.size() > 1 ? std::abs(last - sums(sums.size() - 2)) : 0.0};
}

/// Indices b, 2b, 4b, ..., b 2^q <= last_index with b in [4, 7] (or all indices
/// when last_index < 16). Sampling a sum with tail a N^-p + b N^-p' + ... at doubling
/// indices turns each power into a geometric component, which the epsilon
/// algorithm removes; consecutive sums of a band-edge series do not accelerate.
std::vector<int> geometric_sample_indices(int last_index);

/// Partial sums at geometric_sample_indices(sums.size() - 1).
PartialSumSequence geometric_subsequence(const PartialSumSequence& sequence);

struct GuardedAcceleration {
  double value;
  double error_estimate;
  bool accelerated;
};

/// Applies `kind` to the geometric subsequence of `raw`. Falls back to the last
/// raw partial sum (accelerated = false) when the transform is undefined, when
/// fewer than three samples exist, or when the accelerated value moves away from
/// the last raw sum by more than 10 * raw_tail_estimate.
GuardedAcceleration accelerate_with_guard(const PartialSumSequence& raw, double raw_tail_estimate,
                                          Acceleration kind);

}  // namespace greenfcc

#include "greenfcc/acceleration.hpp"

#include <bit>
#include <cmath>

namespace greenfcc {

std::vector<int> geometric_sample_indices(int last_index) {
  std::vector<int> indices;
  if (last_index < 0) return indices;
  if (last_index < 16) {
    for (int i = 0; i <= last_index; ++i) indices.push_back(i);
    return indices;
  }
  const int shift = std::bit_width(static_cast<unsigned>(last_index)) - 3;
  const int base = last_index >> shift;
  for (int q = 0; q <= shift; ++q) indices.push_back(base << q);
  return indices;
}

PartialSumSequence geometric_subsequence(const PartialSumSequence& sequence) {
  const auto indices = geometric_sample_indices(static_cast<int>(sequence.sums.size()) - 1);
  PartialSumSequence sampled{Eigen::VectorXd(static_cast<Eigen::Index>(indices.size())), sequence.source_method};
  for (std::size_t q = 0; q < indices.size(); ++q) sampled.sums(static_cast<Eigen::Index>(q)) = sequence.sums(indices[q]);
  return sampled;
}

GuardedAcceleration accelerate_with_guard(const PartialSumSequence& raw, double raw_tail_estimate,
                                          Acceleration kind) {
  const auto& sums = raw.sums;
  if (sums.size() < 1) throw std::invalid_argument("accelerate_with_guard: empty sequence");
  const double last = sums(sums.size() - 1);
  GuardedAcceleration fallback{last, raw_tail_estimate, false};
  if (kind == Acceleration::none) return fallback;

  const auto sampled = geometric_subsequence(raw);
  if (sampled.sums.size() < 3) return fallback;
  try {
    const auto result = accelerate(sampled, kind);
    if (!std::isfinite(result.value)) return fallback;
    if (std::isfinite(raw_tail_estimate) && std::abs(result.value - last) > 10.0 * raw_tail_estimate) {
      return fallback;
    }
    return {result.value, result.error_estimate, true};
  } catch (const DegenerateDifference&) {
    return fallback;
  }
}

}  // namespace greenfcc

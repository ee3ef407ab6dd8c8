#pragma once

#include <Eigen/Core>

namespace greenfcc {

/// I_n = integral of cos^n over [0, pi]; exactly zero for odd n.
double cosine_power_integral(int n);

/// L_n(k) = integral over [0, pi] of cos(k x) cos^n(x), k >= 1, evaluated by the
/// finite expansion of cos(k x) in powers of cos(x):
///   2^(k-1) I_(k+n) + k sum_{i=1}^{E[k/2]} (-1)^i 2^(k-2i-1) F_(i-1)(k-i-1) I_(k+n-2i) / i.
/// The alternating sum is accumulated in exact integer arithmetic while it fits
/// in 128 bits, so no cancellation error appears for moderate n and k.
double cosine_product_integral(int n, int k);

/// J_n(k): zero when k > n or k + n is odd, else I_n (k = 0), I_(n+1) (k = 1),
/// or L_n(k) (k >= 2). The zero rules are checked first.
double j_integral(int n, int k);

/// Memoized I_n and J_n(k), stored divided by pi.
///
/// Built eagerly for n <= max_power and k <= max_frequency; immutable after
/// construction, so concurrent readers need no synchronisation.
class IntegralTable {
 public:
  IntegralTable(int max_power, int max_frequency);

  [[nodiscard]] int max_power() const { return max_power_; }
  [[nodiscard]] int max_frequency() const { return max_frequency_; }

  [[nodiscard]] double i_over_pi(int n) const { return i_over_pi_(n); }
  /// J_n(k) / pi, with n the power and k the frequency.
  [[nodiscard]] double j_over_pi(int n, int k) const { return j_over_pi_(n, k); }
  [[nodiscard]] double i(int n) const;
  [[nodiscard]] double j(int n, int k) const;

 private:
  int max_power_;
  int max_frequency_;
  Eigen::ArrayXd i_over_pi_;
  Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> j_over_pi_;
};

namespace detail {
/// I_n / pi = 2^-n C(n, n/2) for even n.
double cosine_power_integral_over_pi(int n);
/// L_n(k) / pi from the cos(kx) power expansion.
double cosine_product_integral_over_pi(int n, int k);
double j_integral_over_pi(int n, int k);
}  // namespace detail

}  // namespace greenfcc

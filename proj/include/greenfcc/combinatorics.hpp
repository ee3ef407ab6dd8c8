#pragma once

#include <Eigen/Core>
#include <optional>

namespace greenfcc {

/// F_m(n) for integer n >= 0: n(n-1)...(n-m+1)/m!, zero for m < 0 or m > n.
/// Exact (one final rounding) while the value fits in 128 bits.
double binomial_integer(long n, long m);

/// F_m(n) for real order n: (-1)^m Gamma(m-n) / (m! Gamma(-n)).
/// Integer orders are routed to the exact integer form; non-integer orders go
/// through log-gamma with explicit sign tracking. Throws DomainError for a
/// non-finite order.
double binomial_general(double n, long m);

/// E(n/2) = n/2 - (1 - (-1)^n)/4, i.e. floor(n/2).
int summation_limit(int n);

namespace detail {
__extension__ typedef __int128 Int128;

/// C(n, m) as an exact 128-bit integer, or nullopt on overflow.
std::optional<Int128> binomial_exact(long n, long m);
}  // namespace detail

/// Dense table of F_j(i), 0 <= j <= i <= max_order.
///
/// Immutable after construction. `scaled(i, j)` is F_j(i) 2^-i, which is the
/// binomial(i, 1/2) probability and is exact because the scaling is a power of
/// two.
class BinomialTable {
 public:
  explicit BinomialTable(int max_order);

  [[nodiscard]] int max_order() const { return max_order_; }
  [[nodiscard]] double operator()(int i, int j) const { return coefficients_(i, j); }
  [[nodiscard]] double scaled(int i, int j) const { return scaled_(i, j); }

 private:
  using RowArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  int max_order_;
  RowArray coefficients_;
  RowArray scaled_;
};

}  // namespace greenfcc

#include "greenfcc/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "greenfcc/types.hpp"

namespace greenfcc {

using detail::Int128;

namespace detail {

std::optional<Int128> binomial_exact(long n, long m) {
  if (m < 0 || n < 0 || m > n) return Int128{0};
  m = std::min(m, n - m);
  Int128 result = 1;
  for (long j = 0; j < m; ++j) {
    Int128 product;
    if (__builtin_mul_overflow(result, static_cast<Int128>(n - j), &product)) return std::nullopt;
    // C(n, j) * (n - j) is divisible by j + 1.
    result = product / (j + 1);
  }
  return result;
}

}  // namespace detail

double binomial_integer(long n, long m) {
  if (m < 0 || m > n || n < 0) return 0.0;
  m = std::min(m, n - m);

  Int128 exact = 1;
  long j = 0;
  for (; j < m; ++j) {
    Int128 product;
    if (__builtin_mul_overflow(exact, static_cast<Int128>(n - j), &product)) break;
    exact = product / (j + 1);
  }
  if (j == m) return static_cast<double>(exact);

  // Past 128 bits: continue the running product in floating point.
  double value = static_cast<double>(exact);
  for (; j < m; ++j) {
    value = value * static_cast<double>(n - j) / static_cast<double>(j + 1);
  }
  return value;
}

double binomial_general(double n, long m) {
  if (!std::isfinite(n)) throw DomainError("binomial order must be finite");
  if (m < 0) return 0.0;

  if (n == std::floor(n)) {
    const long k = static_cast<long>(n);
    if (k >= 0) return binomial_integer(k, m);
    // F_m(-k) = (-1)^m C(m + k - 1, m) for k > 0.
    const double magnitude = binomial_integer(m - k - 1, m);
    return (m % 2 == 0) ? magnitude : -magnitude;
  }

  // Gamma(m - n) / Gamma(-n) in log space; both arguments are non-integer here.
  const long double order = n;
  int sign_num = 1;
  int sign_den = 1;
  const long double log_num = lgammal_r(static_cast<long double>(m) - order, &sign_num);
  const long double log_den = lgammal_r(-order, &sign_den);
  const long double log_fact = lgammal(static_cast<long double>(m) + 1.0L);
  const long double magnitude = expl(log_num - log_den - log_fact);
  int sign = sign_num * sign_den;
  if (m % 2 != 0) sign = -sign;
  return static_cast<double>(sign * magnitude);
}

int summation_limit(int n) {
  const int parity_sign = (n % 2 == 0) ? 1 : -1;
  return (2 * n - (1 - parity_sign)) / 4;
}

BinomialTable::BinomialTable(int max_order)
    : max_order_(max_order),
      coefficients_(RowArray::Zero(max_order + 1, max_order + 1)),
      scaled_(RowArray::Zero(max_order + 1, max_order + 1)) {
  if (max_order < 0) throw std::invalid_argument("BinomialTable: negative order");
  // Row-wise running product, exact in 128 bits until the row overflows.
  for (int i = 0; i <= max_order; ++i) {
    Int128 exact = 1;
    bool exact_ok = true;
    double value = 1.0;
    for (int j = 0; j <= i / 2; ++j) {
      if (j > 0) {
        Int128 product;
        if (exact_ok && !__builtin_mul_overflow(exact, static_cast<Int128>(i - j + 1), &product)) {
          exact = product / j;
          value = static_cast<double>(exact);
        } else {
          exact_ok = false;
          value = value * static_cast<double>(i - j + 1) / static_cast<double>(j);
        }
      }
      coefficients_(i, j) = value;
      coefficients_(i, i - j) = value;
      scaled_(i, j) = std::ldexp(value, -i);
      scaled_(i, i - j) = scaled_(i, j);
    }
  }
}

}  // namespace greenfcc

#include "greenfcc/basic_integrals.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "greenfcc/combinatorics.hpp"

namespace greenfcc {

using detail::Int128;

namespace detail {

double cosine_power_integral_over_pi(int n) {
  if (n < 0) throw std::invalid_argument("cosine_power_integral: negative power");
  if (n % 2 != 0) return 0.0;
  if (const auto exact = binomial_exact(n, n / 2)) {
    return std::ldexp(static_cast<double>(*exact), -n);
  }
  // prod_{q=1}^{n/2} (2q - 1) / (2q), the same ratio without the huge binomial.
  long double value = 1.0L;
  for (int q = 1; q <= n / 2; ++q) {
    value *= static_cast<long double>(2 * q - 1) / static_cast<long double>(2 * q);
  }
  return static_cast<double>(value);
}

namespace {

/// Integer bracket of the expansion:
///   S = sum_i (-1)^i c_i C(k+n-2i, (k+n)/2 - i),  c_0 = 1, c_i = k F_(i-1)(k-i-1) / i,
/// so that L_n(k) / pi = 2^-(n+1) S. Returns nullopt on 128-bit overflow.
std::optional<Int128> product_bracket_exact(int n, int k) {
  const int half = (k + n) / 2;
  Int128 total = 0;
  for (int i = 0; i <= summation_limit(k); ++i) {
    Int128 coefficient = 1;
    if (i > 0) {
      const auto f = binomial_exact(k - i - 1, i - 1);
      if (!f) return std::nullopt;
      Int128 scaled;
      if (__builtin_mul_overflow(*f, static_cast<Int128>(k), &scaled)) return std::nullopt;
      coefficient = scaled / i;
    }
    const auto c = binomial_exact(k + n - 2 * i, half - i);
    if (!c) return std::nullopt;
    Int128 term;
    if (__builtin_mul_overflow(coefficient, *c, &term)) return std::nullopt;
    const bool ok = (i % 2 == 0) ? !__builtin_add_overflow(total, term, &total)
                                 : !__builtin_sub_overflow(total, term, &total);
    if (!ok) return std::nullopt;
  }
  return total;
}

using BigInt = boost::multiprecision::cpp_int;

BigInt big_binomial(long n, long m) {
  if (m < 0 || n < 0 || m > n) return 0;
  m = std::min(m, n - m);
  BigInt result = 1;
  for (long j = 0; j < m; ++j) {
    result *= n - j;
    result /= j + 1;
  }
  return result;
}

/// The same bracket in arbitrary precision.
BigInt product_bracket_big(int n, int k) {
  const int half = (k + n) / 2;
  BigInt total = big_binomial(k + n, half);
  for (int i = 1; i <= summation_limit(k); ++i) {
    const BigInt term = k * big_binomial(k - i - 1, i - 1) / i * big_binomial(k + n - 2 * i, half - i);
    if (i % 2 == 0) {
      total += term;
    } else {
      total -= term;
    }
  }
  return total;
}

/// value * 2^exponent, also when value itself exceeds the double range.
double scaled_to_double(const BigInt& value, int exponent) {
  if (value == 0) return 0.0;
  const auto bits = static_cast<long>(boost::multiprecision::msb(abs(value))) + 1;
  const long shift = std::max(0L, bits - 64);
  const BigInt top = value >> shift;
  return std::ldexp(top.convert_to<double>(), static_cast<int>(exponent + shift));
}

}  // namespace

double cosine_product_integral_over_pi(int n, int k) {
  if (n < 0 || k < 1) throw std::invalid_argument("cosine_product_integral: requires n >= 0, k >= 1");
  if ((k + n) % 2 != 0) return 0.0;

  if (const auto bracket = product_bracket_exact(n, k)) {
    return std::ldexp(static_cast<double>(*bracket), -(n + 1));
  }

  return scaled_to_double(product_bracket_big(n, k), -(n + 1));
}

double j_integral_over_pi(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("j_integral: negative index");
  if (k > n || (k + n) % 2 != 0) return 0.0;
  if (k == 0) return cosine_power_integral_over_pi(n);
  if (k == 1) return cosine_power_integral_over_pi(n + 1);
  return cosine_product_integral_over_pi(n, k);
}

}  // namespace detail

double cosine_power_integral(int n) { return std::numbers::pi * detail::cosine_power_integral_over_pi(n); }

double cosine_product_integral(int n, int k) {
  return std::numbers::pi * detail::cosine_product_integral_over_pi(n, k);
}

double j_integral(int n, int k) { return std::numbers::pi * detail::j_integral_over_pi(n, k); }

IntegralTable::IntegralTable(int max_power, int max_frequency)
    : max_power_(max_power),
      max_frequency_(max_frequency),
      i_over_pi_(max_power + 2),
      j_over_pi_(max_power + 1, max_frequency + 1) {
  if (max_power < 0 || max_frequency < 0) throw std::invalid_argument("IntegralTable: negative cap");
  for (int n = 0; n <= max_power + 1; ++n) i_over_pi_(n) = detail::cosine_power_integral_over_pi(n);
  for (int n = 0; n <= max_power; ++n) {
    for (int k = 0; k <= max_frequency; ++k) {
      if (k > n || (k + n) % 2 != 0) {
        j_over_pi_(n, k) = 0.0;
      } else if (k == 0) {
        j_over_pi_(n, k) = i_over_pi_(n);
      } else if (k == 1) {
        j_over_pi_(n, k) = i_over_pi_(n + 1);
      } else {
        j_over_pi_(n, k) = detail::cosine_product_integral_over_pi(n, k);
      }
    }
  }
}

double IntegralTable::i(int n) const { return std::numbers::pi * i_over_pi_(n); }
double IntegralTable::j(int n, int k) const { return std::numbers::pi * j_over_pi_(n, k); }

}  // namespace greenfcc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "greenfcc/combinatorics.hpp"
#include "greenfcc/types.hpp"

using namespace greenfcc;

TEST_CASE("integer binomials") {
  CHECK(binomial_integer(0, 0) == 1.0);
  CHECK(binomial_integer(5, 2) == 10.0);
  CHECK(binomial_integer(10, 5) == 252.0);
  CHECK(binomial_integer(5, 6) == 0.0);
  CHECK(binomial_integer(5, -1) == 0.0);
  CHECK(binomial_integer(60, 30) == 118264581564861424.0);
}

TEST_CASE("large binomials stay finite and close to lgamma") {
  const double value = binomial_integer(400, 200);
  const double reference = std::exp(std::lgamma(401.0) - 2.0 * std::lgamma(201.0));
  CHECK(std::isfinite(value));
  CHECK(value == doctest::Approx(reference).epsilon(1e-11));
}

TEST_CASE("generalized binomial at negative integer order") {
  // F_i(-1) = (-1)^i
  for (int i = 0; i < 12; ++i) CHECK(binomial_general(-1.0, i) == ((i % 2 == 0) ? 1.0 : -1.0));
  // F_j(-1-i) = (-1)^j C(i+j, j)
  CHECK(binomial_general(-3.0, 2) == 6.0);
  CHECK(binomial_general(-3.0, 3) == -10.0);
  CHECK(binomial_general(4.0, 2) == 6.0);
  CHECK(binomial_general(2.5, -1) == 0.0);
}

TEST_CASE("generalized binomial at non-integer order") {
  CHECK(binomial_general(0.5, 0) == doctest::Approx(1.0));
  CHECK(binomial_general(0.5, 1) == doctest::Approx(0.5));
  CHECK(binomial_general(0.5, 2) == doctest::Approx(-0.125));
  CHECK(binomial_general(0.5, 3) == doctest::Approx(0.0625));
  CHECK(binomial_general(-0.5, 2) == doctest::Approx(0.375));
  CHECK(binomial_general(-0.5, 3) == doctest::Approx(-0.3125));
}

TEST_CASE("non-finite order is rejected") {
  CHECK_THROWS_AS(binomial_general(std::nan(""), 2), DomainError);
  CHECK_THROWS_AS(binomial_general(INFINITY, 2), DomainError);
}

TEST_CASE("summation limit is floor(n/2)") {
  for (int n = 0; n < 50; ++n) CHECK(summation_limit(n) == n / 2);
}

TEST_CASE("binomial table") {
  const BinomialTable table(1000);
  CHECK(table.max_order() == 1000);
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= i; ++j) CHECK(table(i, j) == binomial_integer(i, j));
  double row = 0.0;
  for (int j = 0; j <= 1000; ++j) {
    CHECK(std::isfinite(table(1000, j)));
    row += table.scaled(1000, j);
  }
  CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(table.scaled(4, 2) == 0.375);
  CHECK(table(7, 3) == table(7, 4));
}

TEST_CASE("documented examples") {
  CHECK(binomial_integer(4, 2) == 6.0);
  CHECK(binomial_integer(5, 0) == 1.0);
  CHECK(binomial_integer(3, -1) == 0.0);
  CHECK(binomial_general(-1.0, 3) == -1.0);
  CHECK(binomial_general(0.5, 1) == 0.5);
  CHECK(binomial_general(-1.5, 2) == doctest::Approx(1.875).epsilon(1e-14));
  CHECK(summation_limit(4) == 2);
  CHECK(summation_limit(5) == 2);
  CHECK(summation_limit(0) == 0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "greenfcc/green_series.hpp"
#include "greenfcc/quadrature.hpp"

using namespace greenfcc;

namespace {

// Twelve nearest neighbours; the xy bonds carry weight gamma/4, the rest 1/4.
struct Step {
  int dx, dy, dz;
  bool xy;
};

std::vector<Step> fcc_shell() {
  std::vector<Step> steps;
  for (int a : {-1, 1})
    for (int b : {-1, 1}) {
      steps.push_back({a, b, 0, true});
      steps.push_back({0, a, b, false});
      steps.push_back({a, 0, b, false});
    }
  return steps;
}

double walk_weight(const std::vector<Step>& shell, int steps_left, int x, int y, int z, int l, int m, int n,
                   double gamma) {
  if (steps_left == 0) return (x == l && y == m && z == n) ? 1.0 : 0.0;
  if (std::abs(x - l) + std::abs(y - m) + std::abs(z - n) > 2 * steps_left) return 0.0;
  double total = 0.0;
  for (const auto& s : shell) {
    const double w = s.xy ? gamma / 4.0 : 0.25;
    total += w * walk_weight(shell, steps_left - 1, x + s.dx, y + s.dy, z + s.dz, l, m, n, gamma);
  }
  return total;
}

/// (1/pi^3) integral of cos(lx)cos(my)cos(nz) omega^i, by enumerating walks and
/// averaging the endpoint over the eight sign images.
double enumerated_moment(int i, int l, int m, int n, double gamma) {
  const auto shell = fcc_shell();
  double total = 0.0;
  for (int sl : {-1, 1})
    for (int sm : {-1, 1})
      for (int sn : {-1, 1}) total += walk_weight(shell, i, 0, 0, 0, sl * l, sm * m, sn * n, gamma);
  return total / 8.0;
}

GreenParams point(double t, double gamma, int l, int m, int n) { return {t, gamma, l, m, n}; }

constexpr double kWatson = 0.4482203943883817;

}  // namespace

TEST_CASE("walk enumerator reproduces the small moments") {
  CHECK(enumerated_moment(0, 0, 0, 0, 1.0) == 1.0);
  CHECK(enumerated_moment(1, 0, 0, 0, 1.0) == 0.0);
  CHECK(enumerated_moment(2, 0, 0, 0, 1.0) == doctest::Approx(0.75));
  CHECK(enumerated_moment(3, 0, 0, 0, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("moments match the walk enumerator") {
  const auto tables = SeriesTables::for_series5(8, 4);
  for (double gamma : {1.0, 0.5, 2.0}) {
    for (const auto& site : std::vector<std::array<int, 3>>{{0, 0, 0}, {1, 1, 0}, {2, 0, 0}, {1, 0, 1}, {2, 1, 1}}) {
      const auto p = point(5.0, gamma, site[0], site[1], site[2]);
      for (int i = 0; i <= 6; ++i) {
        CAPTURE(gamma);
        CAPTURE(i);
        CAPTURE(site[0]);
        CAPTURE(site[1]);
        CAPTURE(site[2]);
        CHECK(std::abs(moment_coefficient(i, p, tables) - enumerated_moment(i, site[0], site[1], site[2], gamma)) <=
              1e-12);
      }
    }
  }
}

TEST_CASE("known isotropic moments") {
  const auto tables = SeriesTables::for_series5(8, 0);
  const auto p = point(4.0, 1.0, 0, 0, 0);
  const std::array<double, 7> expected{1.0, 0.0, 0.75, 0.75, 2.109375, 4.21875, 10.3125};
  for (int i = 0; i <= 6; ++i) CHECK(moment_coefficient(i, p, tables) == doctest::Approx(expected[i]).epsilon(1e-13));
  for (int i = 0; i <= 60; ++i) {
    const double mu = normalized_moment(i, p, tables.covers_series5(60, 0) ? tables : SeriesTables::for_series5(60, 0));
    CHECK(mu >= 0.0);
    CHECK(mu <= 1.0);
  }
}

TEST_CASE("term scaling") {
  const auto tables = SeriesTables::for_series5(10, 0);
  const auto p = point(4.0, 1.0, 0, 0, 0);
  const double pi3 = std::pow(std::numbers::pi, 3);
  for (int i = 0; i <= 10; ++i) {
    CHECK(series5_term(i, p, tables) == doctest::Approx(moment_coefficient(i, p, tables) / std::pow(4.0, i + 1)));
    CHECK(outer_term_series5(i, p, tables) == doctest::Approx(pi3 * series5_term(i, p, tables)));
  }
  CHECK_THROWS(series5_term(-1, p, tables));
}

TEST_CASE("reference values") {
  SeriesOptions tight;
  tight.tol = 1e-13;
  const auto a = evaluate_series5(point(4.0, 1.0, 0, 0, 0), tight);
  CHECK(a.converged);
  CHECK(a.method == Method::series5);
  CHECK(a.value == doctest::Approx(0.269416233867).epsilon(1e-12));
  CHECK(a.abs_error_estimate <= 1e-13);
  CHECK(a.terms_used > 0);

  const auto b = evaluate_series6(point(3.5, 1.0, 2, 1, 1), {});
  CHECK(b.converged);
  CHECK(b.method == Method::series6);
  CHECK(b.value == doctest::Approx(0.01100729301).epsilon(1e-9));
}

TEST_CASE("series agree with each other and with quadrature") {
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (const auto& site : std::vector<std::array<int, 3>>{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}) {
      const auto p = point(5.0, gamma, site[0], site[1], site[2]);
      const auto s5 = evaluate_series5(p, {});
      const auto s6 = evaluate_series6(p, {});
      const auto q = green_by_quadrature(p);
      CHECK(std::abs(s5.value - s6.value) <= 1e-10);
      CHECK(std::abs(s5.value - q.value) <= 1e-9);
    }
  }
}

TEST_CASE("large t limit") {
  for (Method method : {Method::series5, Method::series6}) {
    const auto r = evaluate_series(method, point(1e6, 1.0, 0, 0, 0), {});
    CHECK(std::abs(1e6 * r.value - 1.0) <= 1e-9);
    CHECK(r.converged);
  }
}

TEST_CASE("symmetry in the first two site indices") {
  const auto a = evaluate_series5(point(4.0, 1.7, 2, 0, 0), {});
  const auto b = evaluate_series5(point(4.0, 1.7, 0, 2, 0), {});
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("isotropic permutation symmetry") {
  const auto a = evaluate_series5(point(4.0, 1.0, 2, 1, 1), {});
  const auto b = evaluate_series5(point(4.0, 1.0, 1, 1, 2), {});
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(evaluate_series5(point(2.9, 1.0, 0, 0, 0), {}), DomainError);
  CHECK_THROWS_WITH_AS(evaluate_series5(point(2.9, 1.0, 0, 0, 0), {}), "series methods require t >= 3", DomainError);
  CHECK_THROWS_AS(evaluate_series6(point(3.5, 2.0, 0, 0, 0), {}), DomainError);
  CHECK_THROWS_AS(evaluate_series5(point(4.0, 1.0, 1, 0, 0), {}), DomainError);
  CHECK_THROWS_AS(evaluate_series5(point(4.0, -1.0, 0, 0, 0), {}), DomainError);
  CHECK_THROWS_AS(evaluate_series5(point(4.0, 1.0, -2, 0, 0), {}), DomainError);
  CHECK_THROWS_AS(evaluate_series5(point(NAN, 1.0, 0, 0, 0), {}), DomainError);
}

TEST_CASE("option validation") {
  const auto p = point(4.0, 1.0, 0, 0, 0);
  SeriesOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(evaluate_series5(p, bad), std::invalid_argument);
  bad = {};
  bad.n_max = kHardMaxTerms + 1;
  CHECK_THROWS_AS(evaluate_series5(p, bad), std::invalid_argument);
  bad = {};
  bad.l_max = 0;
  CHECK_THROWS_AS(evaluate_series6(p, bad), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_series(Method::quadrature, p, {}), std::invalid_argument);
}

TEST_CASE("truncation without convergence is reported") {
  SeriesOptions options;
  options.n_max = 10;
  const auto r = evaluate_series5(point(3.5, 1.0, 0, 0, 0), options);
  CHECK_FALSE(r.converged);
  CHECK(r.terms_used == 10);
  CHECK(r.abs_error_estimate > options.tol);
}

TEST_CASE("band edge: raw series is slow, wynn on sampled sums gets close") {
  const auto p = point(3.0, 1.0, 0, 0, 0);
  const auto raw = evaluate_series5(p, {});
  CHECK_FALSE(raw.converged);
  CHECK(std::abs(raw.value - kWatson) > 1e-3);

  SeriesOptions options;
  options.accel = Acceleration::wynn;
  const auto fast = evaluate_series5(p, options);
  CHECK(fast.accelerated == Acceleration::wynn);
  CHECK(std::abs(fast.value - kWatson) < 1e-5);
  options.n_max = kHardMaxTerms;
  CHECK(std::abs(evaluate_series5(p, options).value - kWatson) < 1e-6);
}

TEST_CASE("aitken near the band edge") {
  const auto p = point(3.1, 1.0, 0, 0, 0);
  const auto reference = green_by_quadrature(p);
  SeriesOptions options;
  options.accel = Acceleration::aitken;
  const auto r = evaluate_series5(p, options);
  CHECK(std::abs(r.value - reference.value) < 1e-7);
}

TEST_CASE("acceleration is skipped once the raw series converged") {
  SeriesOptions options;
  options.accel = Acceleration::wynn;
  const auto r = evaluate_series5(point(6.0, 1.0, 0, 0, 0), options);
  CHECK(r.converged);
  CHECK(r.accelerated == Acceleration::none);
}

TEST_CASE("shared tables give identical results") {
  const auto tables = SeriesTables::for_series6(kDefaultMaxTerms, kDefaultMaxTerms, 4);
  CHECK(tables.covers_series5(kDefaultMaxTerms, 4));
  CHECK(tables.covers_series6(kDefaultMaxTerms, kDefaultMaxTerms, 4));
  CHECK_FALSE(tables.covers_series6(kDefaultMaxTerms, kDefaultMaxTerms, 5));
  const auto p = point(3.7, 1.3, 2, 2, 0);
  CHECK(evaluate_series5(p, {}, tables).value == evaluate_series5(p, {}).value);
  CHECK(evaluate_series6(p, {}, tables).value == evaluate_series6(p, {}).value);
}

TEST_CASE("convergence trace") {
  SeriesOptions options;
  const auto rows = convergence_trace(Method::series5, point(5.0, 1.0, 0, 0, 0), options, 30);
  REQUIRE(rows.size() == 30);
  CHECK(rows[0].index == 0);
  CHECK(rows[0].term == doctest::Approx(0.2));
  CHECK(rows[1].term == 0.0);
  CHECK(rows[29].partial_sum == doctest::Approx(evaluate_series5(point(5.0, 1.0, 0, 0, 0), {}).value).epsilon(1e-6));
  for (const auto& row : rows) {
    CHECK(row.accelerated_estimate == row.partial_sum);
    CHECK(row.tail_bound == doctest::Approx(row.term * 1.5));
  }
  options.n_max = 9;
  CHECK(convergence_trace(Method::series6, point(5.0, 1.0, 0, 0, 0), options, 30).size() == 10);
  CHECK_THROWS(convergence_trace(Method::series5, point(5.0, 1.0, 0, 0, 0), {}, 0));
}

TEST_CASE("term ratio at t = 5 approaches 0.6 slowly") {
  const auto rows = convergence_trace(Method::series5, point(5.0, 1.0, 0, 0, 0), {}, 200);
  const double late = rows[199].term / rows[198].term;
  CHECK(late == doctest::Approx(0.6 * (1.0 - 1.5 / 199.0)).epsilon(2e-3));
}

TEST_CASE("documented outer-term examples") {
  const auto tables = SeriesTables::for_series5(4, 2);
  const double pi3 = std::pow(std::numbers::pi, 3);
  CHECK(outer_term_series5(0, point(7.0, 1.3, 0, 0, 0), tables) == doctest::Approx(pi3 / 7.0));
  CHECK(outer_term_series5(0, point(4.0, 1.0, 2, 0, 0), tables) == 0.0);
  CHECK(outer_term_series5(2, point(4.0, 1.0, 0, 0, 0), tables) == doctest::Approx(0.75 * pi3 / 64.0));
  const auto p = point(4.0, 2.5, 0, 0, 0);
  CHECK(moment_coefficient(1, p, tables) == 0.0);
}

TEST_CASE("documented evaluation examples") {
  SeriesOptions options;
  options.tol = 1e-9;
  CHECK(std::abs(1e6 * evaluate_series5(point(1e6, 1.0, 0, 0, 0), options).value - 1.0) <= 1e-9);
  const auto s5 = evaluate_series5(point(4.0, 1.0, 0, 0, 0), {});
  CHECK(std::abs(s5.value - green_by_quadrature(point(4.0, 1.0, 0, 0, 0)).value) <= 1e-8);
  CHECK_THROWS_WITH_AS(evaluate_series5(point(4.0, 1.0, 1, 1, 1), {}), "l+m+n must be even", DomainError);
  SeriesOptions tight;
  tight.tol = 1e-13;
  CHECK(std::abs(evaluate_series6(point(4.0, 1.0, 0, 0, 0), {}).value -
                 evaluate_series5(point(4.0, 1.0, 0, 0, 0), tight).value) <= 1e-10);
  CHECK(std::abs(evaluate_series6(point(5.0, 1.0, 2, 0, 0), {}).value -
                 green_by_quadrature(point(5.0, 1.0, 2, 0, 0)).value) <= 1e-8);
}

TEST_CASE("short band-edge runs: sampled acceleration beats the raw partial sum") {
  // 60 terms at t = 3 do not reach 1e-6 with either transform; the best seen is
  // a few 1e-3, still well ahead of the raw sum.
  SeriesOptions options;
  options.n_max = 59;
  const auto raw = evaluate_series5(point(3.0, 1.0, 0, 0, 0), options);
  options.accel = Acceleration::wynn;
  const auto fast = evaluate_series5(point(3.0, 1.0, 0, 0, 0), options);
  CHECK(std::abs(fast.value - kWatson) < std::abs(raw.value - kWatson));
  CHECK(std::abs(fast.value - kWatson) < 5e-3);
}

TEST_CASE("convergence trace at large t and at the band edge") {
  const auto far = convergence_trace(Method::series5, point(1e6, 1.0, 0, 0, 0), {}, 2);
  CHECK(far[0].tail_bound <= 1e-10);
  CHECK(far[0].partial_sum == 1e-6);

  SeriesOptions options;
  options.accel = Acceleration::wynn;
  const auto edge = convergence_trace(Method::series5, point(3.0, 1.0, 0, 0, 0), options, 400);
  CHECK(std::isinf(edge[399].tail_bound));
  CHECK(std::abs(edge[399].accelerated_estimate - kWatson) < 1e-5);
  CHECK(std::abs(edge[399].partial_sum - kWatson) > 1e-3);
  CHECK(std::abs(edge[399].accelerated_estimate - edge[199].accelerated_estimate) <
        std::abs(edge[399].partial_sum - edge[199].partial_sum));
}

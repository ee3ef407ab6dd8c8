#include "greenfcc/green_series.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "greenfcc/acceleration.hpp"
#include "greenfcc/compensated_sum.hpp"

namespace greenfcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_options(const SeriesOptions& options, bool double_series) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (options.n_max < 1 || options.n_max > kHardMaxTerms) {
    throw std::invalid_argument("n_max must lie in [1, " + std::to_string(kHardMaxTerms) + "]");
  }
  if (double_series && (options.l_max < 1 || options.l_max > kHardMaxTerms)) {
    throw std::invalid_argument("l_max must lie in [1, " + std::to_string(kHardMaxTerms) + "]");
  }
}

/// Tracks the geometric tail estimate max(x_N, x_prev) q / (1 - q) over the
/// positive terms, where q = ratio^gap and gap is the index distance to the
/// previous positive term.
class TailTracker {
 public:
  explicit TailTracker(double ratio) : ratio_(ratio) {}

  void update(int index, double value) {
    if (!(value > 0.0)) return;
    if (previous_index_ >= 0) {
      const double q = std::pow(ratio_, index - previous_index_);
      const double estimate = q < 1.0 ? std::max(value, previous_value_) * q / (1.0 - q) : kInf;
      best_ = std::min(best_, estimate);
    }
    previous_index_ = index;
    previous_value_ = value;
  }

  [[nodiscard]] double estimate() const { return best_; }

 private:
  double ratio_;
  double best_ = kInf;
  int previous_index_ = -1;
  double previous_value_ = 0.0;
};

/// Terms of the single-index series. Every term is written as
///   normalized_moment(i) * r^i / t,   r = (2 + gamma) / t,
/// with the moment expanded as
///   sum_j B(j; i, b) sum_k F_k(j) 2^-j J~_(i-j+k)(l) J~_(i-k)(m) J~_j(n),
/// B the binomial(i, b = 2 / (2 + gamma)) probability and J~ = J / pi. All
/// weights lie in [0, 1], so nothing overflows at any order.
class Series5Kernel {
 public:
  Series5Kernel(const GreenParams& params, const SeriesTables& tables, int max_order)
      : params_(params), tables_(tables), bond_(max_order + 1), cross_(max_order + 1) {
    if (!tables.covers_series5(max_order, params.max_site_index())) {
      throw std::invalid_argument("series tables too small for the requested order");
    }
    const double total = 2.0 + params.gamma;
    const double bond_weight = params.gamma / total;
    const double cross_weight = 2.0 / total;
    for (int p = 0; p <= max_order; ++p) {
      bond_(p) = std::pow(bond_weight, p);
      cross_(p) = std::pow(cross_weight, p);
    }
  }

  [[nodiscard]] double normalized_moment(int i) const {
    const auto& binomials = tables_.binomials();
    const auto& integrals = tables_.integrals();
    const int l = params_.l;
    const int m = params_.m;
    const int n = params_.n;

    CompensatedSum<double> outer;
    for (int j = n; j <= i; j += 2) {
      const double z_factor = integrals.j_over_pi(j, n);
      if (z_factor == 0.0) continue;
      int k_lo = std::max(0, l - i + j);
      if ((k_lo - (i - m)) % 2 != 0) ++k_lo;
      const int k_hi = std::min(j, i - m);
      CompensatedSum<double> inner;
      for (int k = k_lo; k <= k_hi; k += 2) {
        inner += binomials.scaled(j, k) * integrals.j_over_pi(i - j + k, l) * integrals.j_over_pi(i - k, m);
      }
      const double weight = binomials(i, j) * cross_(j) * bond_(i - j);
      outer += weight * inner.value() * z_factor;
    }
    return outer.value();
  }

  [[nodiscard]] double term(int i) const {
    const double ratio = (2.0 + params_.gamma) / params_.t;
    return normalized_moment(i) * (std::pow(ratio, i) / params_.t);
  }

 private:
  const GreenParams& params_;
  const SeriesTables& tables_;
  Eigen::ArrayXd bond_;
  Eigen::ArrayXd cross_;
};

struct RawSeries {
  std::vector<double> partial_sums;
  int last_index = 0;
  double tail_estimate = kInf;
  bool converged = false;
};

SeriesEvaluation finish(const RawSeries& raw, const SeriesOptions& options, Method method) {
  SeriesEvaluation result;
  result.value = raw.partial_sums.back();
  result.terms_used = raw.last_index;
  result.abs_error_estimate = raw.tail_estimate;
  result.method = method;
  result.accelerated = Acceleration::none;
  result.converged = raw.converged;
  if (raw.converged || options.accel == Acceleration::none) return result;

  const PartialSumSequence sequence{
      Eigen::Map<const Eigen::VectorXd>(raw.partial_sums.data(), static_cast<Eigen::Index>(raw.partial_sums.size())),
      method};
  const auto guarded = accelerate_with_guard(sequence, raw.tail_estimate, options.accel);
  if (!guarded.accelerated) return result;
  result.value = guarded.value;
  result.abs_error_estimate = guarded.error_estimate;
  result.accelerated = options.accel;
  result.converged = guarded.error_estimate <= options.tol;
  return result;
}

/// Inner sums of the double series for one outer index i.
class Series6Kernel {
 public:
  Series6Kernel(const GreenParams& params, const SeriesTables& tables) : params_(params), tables_(tables) {}

  /// sum_k F_k(i) 2^-i J~_(j+k)(l) J~_(j+i-k)(m)
  [[nodiscard]] double cross_sum(int i, int j) const {
    const auto& binomials = tables_.binomials();
    const auto& integrals = tables_.integrals();
    const int l = params_.l;
    const int m = params_.m;
    int k_lo = std::max(0, l - j);
    if ((k_lo - (l - j)) % 2 != 0) ++k_lo;
    const int k_hi = std::min(i, j + i - m);
    CompensatedSum<double> sum;
    for (int k = k_lo; k <= k_hi; k += 2) {
      sum += binomials.scaled(i, k) * integrals.j_over_pi(j + k, l) * integrals.j_over_pi(j + i - k, m);
    }
    return sum.value();
  }

  struct Row {
    double value = 0.0;
    double tail_bound = 0.0;
    bool converged = true;
  };

  /// Row i of the double series, summed over j until the negative-binomial tail
  /// bound drops below row_tol or l_max is reached.
  [[nodiscard]] Row row(int i, int l_max, double row_tol) const {
    Row result;
    const double z_factor = tables_.integrals().j_over_pi(i, params_.n);
    if (z_factor == 0.0) return result;
    const double t = params_.t;
    const double bond = params_.gamma / t;
    const double prefactor = std::pow(2.0 / t, i) / t * z_factor;

    CompensatedSum<double> sum;
    // weight_j = C(i + j, j) (gamma / t)^j = (-1)^j F_j(-1-i) (gamma / t)^j
    double weight = 1.0;
    result.converged = false;
    result.tail_bound = kInf;
    for (int j = 0; j <= l_max; ++j) {
      if (j > 0) weight *= static_cast<double>(i + j) / static_cast<double>(j) * bond;
      sum += weight * cross_sum(i, j);
      const double next_weight = weight * static_cast<double>(i + j + 1) / static_cast<double>(j + 1) * bond;
      const double next_ratio = static_cast<double>(i + j + 2) / static_cast<double>(j + 2) * bond;
      if (next_ratio < 1.0) {
        result.tail_bound = prefactor * next_weight / (1.0 - next_ratio);
        if (result.tail_bound <= row_tol) {
          result.converged = true;
          break;
        }
      }
    }
    result.value = prefactor * sum.value();
    return result;
  }

 private:
  const GreenParams& params_;
  const SeriesTables& tables_;
};

RawSeries sum_series5(const GreenParams& params, const SeriesOptions& options, const SeriesTables& tables) {
  const Series5Kernel kernel(params, tables, options.n_max);
  TailTracker tail((2.0 + params.gamma) / params.t);
  RawSeries raw;
  raw.partial_sums.reserve(static_cast<std::size_t>(options.n_max) + 1);
  CompensatedSum<double> sum;
  for (int i = 0; i <= options.n_max; ++i) {
    const double term = kernel.term(i);
    sum += term;
    raw.partial_sums.push_back(sum.value());
    raw.last_index = i;
    tail.update(i, term);
    if (tail.estimate() <= options.tol) {
      raw.converged = true;
      break;
    }
  }
  raw.tail_estimate = tail.estimate();
  return raw;
}

struct RawDoubleSeries {
  RawSeries outer;
  std::vector<double> rows;
  std::vector<double> row_tails;
  double inner_tail_total = 0.0;
  bool inner_converged = true;
};

RawDoubleSeries sum_series6(const GreenParams& params, const SeriesOptions& options, const SeriesTables& tables,
                            bool stop_early) {
  if (!tables.covers_series6(options.n_max, options.l_max, params.max_site_index())) {
    throw std::invalid_argument("series tables too small for the requested order");
  }
  const Series6Kernel kernel(params, tables);
  const double outer_ratio = 2.0 / (params.t - params.gamma);
  const double row_tol = 0.5 * options.tol / static_cast<double>(options.n_max + 1);
  TailTracker tail(outer_ratio);

  RawDoubleSeries raw;
  CompensatedSum<double> sum;
  CompensatedSum<double> inner_tails;
  for (int i = 0; i <= options.n_max; ++i) {
    const auto row = kernel.row(i, options.l_max, row_tol);
    if (!row.converged) raw.inner_converged = false;
    inner_tails += row.tail_bound;
    sum += row.value;
    raw.rows.push_back(row.value);
    raw.row_tails.push_back(row.tail_bound);
    raw.outer.partial_sums.push_back(sum.value());
    raw.outer.last_index = i;
    tail.update(i, row.value);
    if (stop_early && raw.inner_converged && tail.estimate() + inner_tails.value() <= options.tol) {
      raw.outer.converged = true;
      break;
    }
  }
  raw.inner_tail_total = inner_tails.value();
  raw.outer.tail_estimate = tail.estimate() + raw.inner_tail_total;
  return raw;
}

}  // namespace

SeriesTables::SeriesTables(int max_order, int max_power, int max_frequency)
    : binomials_(max_order), integrals_(max_power, max_frequency) {}

SeriesTables SeriesTables::for_series5(int n_max, int max_site_index) {
  return SeriesTables(n_max, n_max, max_site_index);
}

SeriesTables SeriesTables::for_series6(int n_max, int l_max, int max_site_index) {
  return SeriesTables(n_max, n_max + l_max, max_site_index);
}

bool SeriesTables::covers_series5(int n_max, int max_site_index) const {
  return binomials_.max_order() >= n_max && integrals_.max_power() >= n_max &&
         integrals_.max_frequency() >= max_site_index;
}

bool SeriesTables::covers_series6(int n_max, int l_max, int max_site_index) const {
  return binomials_.max_order() >= n_max && integrals_.max_power() >= n_max + l_max &&
         integrals_.max_frequency() >= max_site_index;
}

void check_series_domain(const GreenParams& params) {
  params.validate();
  if (params.t < params.band_edge()) {
    if (params.gamma == 1.0) throw DomainError("series methods require t >= 3");
    throw DomainError("series methods require t >= 2+gamma");
  }
}

double normalized_moment(int i, const GreenParams& params, const SeriesTables& tables) {
  if (i < 0) throw std::invalid_argument("moment order must be non-negative");
  return Series5Kernel(params, tables, i).normalized_moment(i);
}

double moment_coefficient(int i, const GreenParams& params, const SeriesTables& tables) {
  return normalized_moment(i, params, tables) * std::pow(2.0 + params.gamma, i);
}

double series5_term(int i, const GreenParams& params, const SeriesTables& tables) {
  if (i < 0) throw std::invalid_argument("term index must be non-negative");
  return Series5Kernel(params, tables, i).term(i);
}

double outer_term_series5(int i, const GreenParams& params, const SeriesTables& tables) {
  constexpr double pi_cubed = std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return pi_cubed * series5_term(i, params, tables);
}

SeriesEvaluation evaluate_series5(const GreenParams& params, const SeriesOptions& options) {
  check_series_domain(params);
  check_options(options, false);
  const auto tables = SeriesTables::for_series5(options.n_max, params.max_site_index());
  return evaluate_series5(params, options, tables);
}

SeriesEvaluation evaluate_series5(const GreenParams& params, const SeriesOptions& options,
                                  const SeriesTables& tables) {
  check_series_domain(params);
  check_options(options, false);
  return finish(sum_series5(params, options, tables), options, Method::series5);
}

SeriesEvaluation evaluate_series6(const GreenParams& params, const SeriesOptions& options) {
  check_series_domain(params);
  check_options(options, true);
  const auto tables = SeriesTables::for_series6(options.n_max, options.l_max, params.max_site_index());
  return evaluate_series6(params, options, tables);
}

SeriesEvaluation evaluate_series6(const GreenParams& params, const SeriesOptions& options,
                                  const SeriesTables& tables) {
  check_series_domain(params);
  check_options(options, true);
  const auto raw = sum_series6(params, options, tables, true);
  auto result = finish(raw.outer, options, Method::series6);
  if (!raw.inner_converged) result.converged = false;
  return result;
}

SeriesEvaluation evaluate_series(Method method, const GreenParams& params, const SeriesOptions& options) {
  switch (method) {
    case Method::series5: return evaluate_series5(params, options);
    case Method::series6: return evaluate_series6(params, options);
    case Method::quadrature: break;
  }
  throw std::invalid_argument("evaluate_series: not a series method");
}

std::vector<ConvergenceRow> convergence_trace(Method method, const GreenParams& params,
                                              const SeriesOptions& options, int terms) {
  check_series_domain(params);
  const bool double_series = method == Method::series6;
  check_options(options, double_series);
  if (method == Method::quadrature) throw std::invalid_argument("convergence_trace: not a series method");
  if (terms < 1) throw std::invalid_argument("convergence_trace: terms must be positive");
  const int count = std::min(terms, options.n_max + 1);

  std::vector<double> values;
  double ratio = 0.0;
  if (double_series) {
    SeriesOptions truncated = options;
    truncated.n_max = count - 1;
    const auto tables = SeriesTables::for_series6(truncated.n_max, truncated.l_max, params.max_site_index());
    values = sum_series6(params, truncated, tables, false).rows;
    ratio = 2.0 / (params.t - params.gamma);
  } else {
    const auto tables = SeriesTables::for_series5(count - 1, params.max_site_index());
    const Series5Kernel kernel(params, tables, count - 1);
    for (int i = 0; i < count; ++i) values.push_back(kernel.term(i));
    ratio = (2.0 + params.gamma) / params.t;
  }
  const double tail_factor = ratio < 1.0 ? ratio / (1.0 - ratio) : kInf;

  std::vector<ConvergenceRow> rows;
  PartialSumSequence sums{Eigen::VectorXd(count), method};
  CompensatedSum<double> sum;
  for (int i = 0; i < count; ++i) {
    sum += values[static_cast<std::size_t>(i)];
    sums.sums(i) = sum.value();
    ConvergenceRow row;
    row.index = i;
    row.term = values[static_cast<std::size_t>(i)];
    row.partial_sum = sum.value();
    row.tail_bound = row.term == 0.0 ? 0.0 : row.term * tail_factor;
    row.accelerated_estimate = row.partial_sum;
    if (options.accel != Acceleration::none) {
      const PartialSumSequence prefix{sums.sums.head(i + 1), method};
      const auto sampled = geometric_subsequence(prefix);
      if (sampled.sums.size() >= 3) {
        try {
          row.accelerated_estimate = accelerate(sampled, options.accel).value;
        } catch (const DegenerateDifference&) {
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace greenfcc

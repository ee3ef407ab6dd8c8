#pragma once

#include <vector>

#include "greenfcc/basic_integrals.hpp"
#include "greenfcc/combinatorics.hpp"
#include "greenfcc/types.hpp"

namespace greenfcc {

inline constexpr int kDefaultMaxTerms = 400;
/// Beyond this order the binomial table entries overflow double precision.
inline constexpr int kHardMaxTerms = 1000;

struct SeriesOptions {
  double tol = 1e-10;
  /// Truncation cap N of the outer sum.
  int n_max = kDefaultMaxTerms;
  /// Truncation cap L of the inner sum of the double series.
  int l_max = kDefaultMaxTerms;
  Acceleration accel = Acceleration::none;
};

/// Binomial and basic-integral tables shared by every evaluation that needs no
/// more than the capacities given at construction. Immutable once built.
class SeriesTables {
 public:
  SeriesTables(int max_order, int max_power, int max_frequency);

  static SeriesTables for_series5(int n_max, int max_site_index);
  static SeriesTables for_series6(int n_max, int l_max, int max_site_index);

  [[nodiscard]] const BinomialTable& binomials() const { return binomials_; }
  [[nodiscard]] const IntegralTable& integrals() const { return integrals_; }

  [[nodiscard]] bool covers_series5(int n_max, int max_site_index) const;
  [[nodiscard]] bool covers_series6(int n_max, int l_max, int max_site_index) const;

 private:
  BinomialTable binomials_;
  IntegralTable integrals_;
};

/// Throws DomainError unless the point is valid and t >= 2 + gamma.
void check_series_domain(const GreenParams& params);

/// The i-th moment (1/pi^3) * integral of cos(lx)cos(my)cos(nz) omega^i, divided
/// by (2 + gamma)^i so that it lies in [0, 1] for every order.
double normalized_moment(int i, const GreenParams& params, const SeriesTables& tables);

/// Coefficient of t^(-1-i) in the 1/t expansion of G.
double moment_coefficient(int i, const GreenParams& params, const SeriesTables& tables);

/// Contribution of outer index i to G, i.e. the i-th term including 1/pi^3.
double series5_term(int i, const GreenParams& params, const SeriesTables& tables);

/// The i-th outer term of the binomial series, without the global 1/pi^3.
double outer_term_series5(int i, const GreenParams& params, const SeriesTables& tables);

/// G by the single-index binomial series.
///
/// Stops at the first index N >= 1 where the last two terms are positive and
/// max(term_N, term_(N-1)) r / (1 - r) <= tol, r = (2 + gamma) / t. The reported
/// error is the smallest such tail estimate seen so far. `terms_used` is N.
SeriesEvaluation evaluate_series5(const GreenParams& params, const SeriesOptions& options);
SeriesEvaluation evaluate_series5(const GreenParams& params, const SeriesOptions& options,
                                  const SeriesTables& tables);

/// G by the double series in which the gamma cos x cos y bond is expanded
/// separately. Each inner sum carries a rigorous negative-binomial tail bound;
/// the outer sum uses the same heuristic tail estimate as evaluate_series5,
/// with ratio 2 / (t - gamma) per row.
SeriesEvaluation evaluate_series6(const GreenParams& params, const SeriesOptions& options);
SeriesEvaluation evaluate_series6(const GreenParams& params, const SeriesOptions& options,
                                  const SeriesTables& tables);

SeriesEvaluation evaluate_series(Method method, const GreenParams& params, const SeriesOptions& options);

struct ConvergenceRow {
  int index = 0;
  double term = 0.0;
  double partial_sum = 0.0;
  /// term r / (1 - r); infinite at the band edge.
  double tail_bound = 0.0;
  double accelerated_estimate = 0.0;
};

/// Per-term diagnostics for `terms` outer indices (capped at options.n_max + 1).
/// The accelerated column uses options.accel on geometrically sampled partial
/// sums and equals the partial sum when acceleration is off.
std::vector<ConvergenceRow> convergence_trace(Method method, const GreenParams& params,
                                              const SeriesOptions& options, int terms);

}  // namespace greenfcc

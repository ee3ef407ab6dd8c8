#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace greenfcc {

/// Raised when an evaluation point lies outside the domain of the requested method.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Method { series5, series6, quadrature };
enum class Acceleration { none, wynn, aitken };

std::string_view to_string(Method method);
std::string_view to_string(Acceleration accel);
std::optional<Method> parse_method(std::string_view text);
std::optional<Acceleration> parse_acceleration(std::string_view text);

/// Evaluation point of G(t, l, m, n; gamma).
///
/// The site indices enter only through cos(l x) cos(m y) cos(n z), so they are
/// kept non-negative; l + m + n must be even for the site to be on the lattice.
struct GreenParams {
  double t = 4.0;
  double gamma = 1.0;
  int l = 0;
  int m = 0;
  int n = 0;

  /// Upper edge of the spectrum of omega, max omega = 2 + gamma.
  [[nodiscard]] double band_edge() const { return 2.0 + gamma; }
  [[nodiscard]] int max_site_index() const;

  /// Checks gamma > 0, finite t, non-negative indices and the parity rule.
  /// Throws DomainError naming the violated invariant.
  void validate() const;
};

struct SeriesEvaluation {
  double value = 0.0;
  int terms_used = 0;
  double abs_error_estimate = 0.0;
  Method method = Method::series5;
  Acceleration accelerated = Acceleration::none;
  bool converged = false;
};

}  // namespace greenfcc

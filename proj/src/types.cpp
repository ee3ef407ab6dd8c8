#include "greenfcc/types.hpp"

#include <algorithm>
#include <cmath>

namespace greenfcc {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::series5: return "series5";
    case Method::series6: return "series6";
    case Method::quadrature: return "quadrature";
  }
  return "unknown";
}

std::string_view to_string(Acceleration accel) {
  switch (accel) {
    case Acceleration::none: return "none";
    case Acceleration::wynn: return "wynn";
    case Acceleration::aitken: return "aitken";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "series5") return Method::series5;
  if (text == "series6") return Method::series6;
  if (text == "quadrature") return Method::quadrature;
  return std::nullopt;
}

std::optional<Acceleration> parse_acceleration(std::string_view text) {
  if (text == "none") return Acceleration::none;
  if (text == "wynn") return Acceleration::wynn;
  if (text == "aitken") return Acceleration::aitken;
  return std::nullopt;
}

int GreenParams::max_site_index() const { return std::max({l, m, n}); }

void GreenParams::validate() const {
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive and finite");
  if (l < 0 || m < 0 || n < 0) throw DomainError("l, m, n must be non-negative");
  if ((l + m + n) % 2 != 0) throw DomainError("l+m+n must be even");
}

}  // namespace greenfcc

#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "greenfcc/types.hpp"

namespace greenfcc {

/// omega(x, y, z) = gamma cos x cos y + cos y cos z + cos z cos x.
double omega(double x, double y, double z, double gamma);

/// Gauss-Legendre rule on [-1, 1]: Golub-Welsch eigen-decomposition of the
/// Jacobi matrix, then one Newton polish of every node.
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  static GaussLegendreRule make(int order);
};

struct QuadratureSpec {
  int nodes_per_axis = 24;
  int subdivisions_per_axis = 4;
  /// Dyadic levels toward the singular corners, used when t - (2 + gamma) < 1.
  int corner_refinement_levels = 12;
  double target_tol = 1e-10;
  /// Worker threads for the cell loop. The reduction order is fixed, so the
  /// result does not depend on this.
  int threads = 1;

  void validate() const;
};

/// Whether a point triggers dyadic corner refinement.
bool needs_corner_refinement(const GreenParams& params);

/// Integrand evaluations performed by one integrate_green call.
std::int64_t node_count(const QuadratureSpec& spec, const GreenParams& params);

/// One tensor-product Gauss-Legendre evaluation of
///   (1/pi^3) integral over [0, pi]^3 of cos(lx) cos(my) cos(nz) / (t - omega).
/// The denominator is formed as (t - 2 - gamma) + (2 + gamma - omega) with the
/// second part written in terms of 2 sin^2(x/2), so it stays accurate next to
/// the corner where it vanishes at the band edge. The corner cell at (pi, pi, pi)
/// is the point reflection of the one at the origin and carries the same
/// integral, so only the origin corner is refined.
double integrate_green(const GreenParams& params, const QuadratureSpec& spec);

/// The spec for the k-th refinement step after `base`.
QuadratureSpec refined_spec(const QuadratureSpec& base, int step);

/// G by direct quadrature. Evaluates successive refinements of `spec` until two
/// consecutive values differ by at most spec.target_tol (at most four levels);
/// the last difference is the error estimate and terms_used is the node count
/// of the final level. Throws DomainError for t < 2 + gamma.
SeriesEvaluation green_by_quadrature(const GreenParams& params, const QuadratureSpec& spec = {});

}  // namespace greenfcc

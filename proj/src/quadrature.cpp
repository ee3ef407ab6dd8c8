#include "greenfcc/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "greenfcc/compensated_sum.hpp"

namespace greenfcc {

double omega(double x, double y, double z, double gamma) {
  const double cx = std::cos(x);
  const double cy = std::cos(y);
  const double cz = std::cos(z);
  return gamma * cx * cy + cy * cz + cz * cx;
}

GaussLegendreRule GaussLegendreRule::make(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off_diagonal(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) {
    off_diagonal(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diagonal, off_diagonal, Eigen::ComputeEigenvectors);

  GaussLegendreRule rule{solver.eigenvalues(), Eigen::VectorXd(order)};
  for (int i = 0; i < order; ++i) {
    double x = rule.nodes(i);
    double derivative = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      // P_order(x) and its derivative by the three-term recurrence.
      double p_prev = 1.0;
      double p = x;
      for (int k = 2; k <= order; ++k) {
        const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
      }
      derivative = order * (x * p - p_prev) / (x * x - 1.0);
      if (pass == 0) x -= p / derivative;
    }
    rule.nodes(i) = x;
    rule.weights(i) = 2.0 / ((1.0 - x * x) * derivative * derivative);
  }
  return rule;
}

void QuadratureSpec::validate() const {
  if (nodes_per_axis < 4) throw std::invalid_argument("nodes_per_axis must be >= 4");
  if (subdivisions_per_axis < 1) throw std::invalid_argument("subdivisions_per_axis must be >= 1");
  if (corner_refinement_levels < 0) throw std::invalid_argument("corner_refinement_levels must be >= 0");
  if (!(target_tol > 0.0)) throw std::invalid_argument("target_tol must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

bool needs_corner_refinement(const GreenParams& params) { return params.t - params.band_edge() < 1.0; }

namespace {

int effective_subdivisions(const QuadratureSpec& spec, bool refine) {
  return refine ? std::max(spec.subdivisions_per_axis, 2) : spec.subdivisions_per_axis;
}

/// Nodes of one Gauss-Legendre rule mapped to [lo, hi], with the per-node
/// quantities the integrand needs along that axis.
struct AxisNodes {
  Eigen::ArrayXd weights;
  Eigen::ArrayXd cosines;   // cos(frequency * x)
  Eigen::ArrayXd versines;  // 1 - cos x = 2 sin^2(x / 2)
};

AxisNodes map_axis(const GaussLegendreRule& rule, double lo, double hi, int frequency) {
  const auto count = rule.nodes.size();
  AxisNodes axis{Eigen::ArrayXd(count), Eigen::ArrayXd(count), Eigen::ArrayXd(count)};
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (Eigen::Index p = 0; p < count; ++p) {
    const double x = mid + half * rule.nodes(p);
    const double s = std::sin(0.5 * x);
    axis.weights(p) = half * rule.weights(p);
    axis.cosines(p) = std::cos(frequency * x);
    axis.versines(p) = 2.0 * s * s;
  }
  return axis;
}

/// Tensor-product sum over one box of
///   cos(lx) cos(my) cos(nz) / (gap + (2 + gamma - omega)),
/// where 2 + gamma - omega = gamma (u + v - u v) + u + v + w (2 - u - v) in the
/// versines u, v, w.
double box_sum(const AxisNodes& ax, const AxisNodes& ay, const AxisNodes& az, double gap, double gamma) {
  CompensatedSum<double> total;
  for (Eigen::Index p = 0; p < ax.weights.size(); ++p) {
    const double u = ax.versines(p);
    for (Eigen::Index q = 0; q < ay.weights.size(); ++q) {
      const double v = ay.versines(q);
      const double base = gap + gamma * (u + v - u * v) + u + v;
      const double slope = 2.0 - u - v;
      double inner = 0.0;
      for (Eigen::Index r = 0; r < az.weights.size(); ++r) {
        inner += az.weights(r) * az.cosines(r) / (base + slope * az.versines(r));
      }
      total += ax.weights(p) * ax.cosines(p) * ay.weights(q) * ay.cosines(q) * inner;
    }
  }
  return total.value();
}

/// Integral over [0, h]^3 by dyadic shells: at each level the cube [0, e]^3 is
/// split into eight halves, seven are integrated and the one at the corner is
/// split again; the last corner cube is integrated directly.
double corner_cube(const GaussLegendreRule& rule, const GreenParams& params, double gap, double h, int levels) {
  CompensatedSum<double> total;
  double edge = h;
  for (int level = 0; level < levels; ++level) {
    const double half = 0.5 * edge;
    const AxisNodes x_parts[2] = {map_axis(rule, 0.0, half, params.l), map_axis(rule, half, edge, params.l)};
    const AxisNodes y_parts[2] = {map_axis(rule, 0.0, half, params.m), map_axis(rule, half, edge, params.m)};
    const AxisNodes z_parts[2] = {map_axis(rule, 0.0, half, params.n), map_axis(rule, half, edge, params.n)};
    for (int octant = 1; octant < 8; ++octant) {
      total += box_sum(x_parts[octant & 1], y_parts[(octant >> 1) & 1], z_parts[(octant >> 2) & 1], gap,
                       params.gamma);
    }
    edge = half;
  }
  total += box_sum(map_axis(rule, 0.0, edge, params.l), map_axis(rule, 0.0, edge, params.m),
                   map_axis(rule, 0.0, edge, params.n), gap, params.gamma);
  return total.value();
}

template <typename Work>
void run_indexed(int count, int threads, Work&& work) {
  if (threads <= 1 || count <= 1) {
    for (int index = 0; index < count; ++index) work(index);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int index = next++; index < count; index = next++) work(index);
    });
  }
}

}  // namespace

std::int64_t node_count(const QuadratureSpec& spec, const GreenParams& params) {
  const bool refine = needs_corner_refinement(params);
  const std::int64_t s = effective_subdivisions(spec, refine);
  const std::int64_t per_box = static_cast<std::int64_t>(spec.nodes_per_axis) * spec.nodes_per_axis *
                               spec.nodes_per_axis;
  std::int64_t boxes = s * s * s;
  if (refine) boxes += -2 + 7 * static_cast<std::int64_t>(spec.corner_refinement_levels) + 1;
  return boxes * per_box;
}

double integrate_green(const GreenParams& params, const QuadratureSpec& spec) {
  params.validate();
  spec.validate();
  if (params.t < params.band_edge()) {
    throw DomainError("quadrature requires t >= 2+gamma (the pole would cross the integration domain)");
  }
  const double gap = params.t - params.band_edge();
  const bool refine = needs_corner_refinement(params);
  const int s = effective_subdivisions(spec, refine);
  const double h = std::numbers::pi / s;
  const auto rule = GaussLegendreRule::make(spec.nodes_per_axis);

  std::vector<AxisNodes> x_axis;
  std::vector<AxisNodes> y_axis;
  std::vector<AxisNodes> z_axis;
  for (int a = 0; a < s; ++a) {
    x_axis.push_back(map_axis(rule, a * h, (a + 1) * h, params.l));
    y_axis.push_back(map_axis(rule, a * h, (a + 1) * h, params.m));
    z_axis.push_back(map_axis(rule, a * h, (a + 1) * h, params.n));
  }

  const int cells = s * s * s;
  std::vector<double> contributions(static_cast<std::size_t>(cells) + 1, 0.0);
  run_indexed(cells + 1, spec.threads, [&](int index) {
    if (index == cells) {
      if (refine) contributions[static_cast<std::size_t>(index)] =
          2.0 * corner_cube(rule, params, gap, h, spec.corner_refinement_levels);
      return;
    }
    const int a = index / (s * s);
    const int b = (index / s) % s;
    const int c = index % s;
    const bool origin_corner = a == 0 && b == 0 && c == 0;
    const bool far_corner = a == s - 1 && b == s - 1 && c == s - 1;
    if (refine && (origin_corner || far_corner)) return;
    contributions[static_cast<std::size_t>(index)] =
        box_sum(x_axis[static_cast<std::size_t>(a)], y_axis[static_cast<std::size_t>(b)],
                z_axis[static_cast<std::size_t>(c)], gap, params.gamma);
  });

  CompensatedSum<double> total;
  for (const double value : contributions) total += value;
  constexpr double pi_cubed = std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return total.value() / pi_cubed;
}

QuadratureSpec refined_spec(const QuadratureSpec& base, int step) {
  QuadratureSpec next = base;
  next.nodes_per_axis = base.nodes_per_axis + 8 * step;
  next.corner_refinement_levels = base.corner_refinement_levels + 4 * step;
  return next;
}

SeriesEvaluation green_by_quadrature(const GreenParams& params, const QuadratureSpec& spec) {
  constexpr int kMaxSteps = 3;
  double previous = integrate_green(params, spec);
  double current = previous;
  double difference = std::numeric_limits<double>::infinity();
  QuadratureSpec last = spec;
  for (int step = 1; step <= kMaxSteps; ++step) {
    last = refined_spec(spec, step);
    current = integrate_green(params, last);
    difference = std::abs(current - previous);
    if (difference <= spec.target_tol) break;
    previous = current;
  }
  SeriesEvaluation result;
  result.value = current;
  result.abs_error_estimate = difference;
  result.method = Method::quadrature;
  result.accelerated = Acceleration::none;
  result.converged = difference <= spec.target_tol;
  result.terms_used = static_cast<int>(std::min<std::int64_t>(node_count(last, params), std::numeric_limits<int>::max()));
  return result;
}

}  // namespace greenfcc

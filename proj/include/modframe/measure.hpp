#pragma once

#include <vector>

namespace modframe {

enum class QuadratureRule { GaussLegendre, Trapezoid, Midpoint };

const char* to_string(QuadratureRule r);

struct QuadratureNode {
  double point = 0.0;
  double weight = 0.0;
};

/// A positive measure reduced to finitely many weighted nodes, either a
/// quadrature discretization of Lebesgue measure on [a, b] or an explicit
/// discrete measure.
struct MeasureDiscretization {
  enum class Provenance { Interval, Discrete };
  Provenance provenance = Provenance::Discrete;
  std::vector<QuadratureNode> nodes;
  // Interval provenance only:
  double a = 0.0;
  double b = 0.0;
  QuadratureRule rule = QuadratureRule::GaussLegendre;
  int n = 0;

  double weight_sum() const;
};

/// Discretize Lebesgue measure on [a, b]. Gauss-Legendre uses n points
/// (exact through degree 2n-1); Trapezoid uses n panels (n+1 nodes);
/// Midpoint uses n panels. Requires a < b and n >= 1.
MeasureDiscretization discretize_interval(double a, double b, QuadratureRule rule, int n);

/// Explicit node list; weights must be >= 0.
MeasureDiscretization discrete_measure(std::vector<QuadratureNode> nodes);

}  // namespace modframe

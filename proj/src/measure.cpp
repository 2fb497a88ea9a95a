#include "modframe/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace modframe {

const char* to_string(QuadratureRule r) {
  switch (r) {
    case QuadratureRule::GaussLegendre: return "gauss_legendre";
    case QuadratureRule::Trapezoid: return "trapezoid";
    case QuadratureRule::Midpoint: return "midpoint";
  }
  return "gauss_legendre";
}

double MeasureDiscretization::weight_sum() const {
  double s = 0.0;
  for (const auto& node : nodes) s += node.weight;
  return s;
}

namespace {

// Legendre P_n and P_n' at x via the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = p0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Gauss-Legendre nodes on [-1, 1] by Newton iteration from the Chebyshev
// initial guess; exact for polynomials of degree 2n - 1.
std::vector<QuadratureNode> gauss_legendre_reference(int n) {
  std::vector<QuadratureNode> nodes(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_eval(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_eval(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = {-x, w};
    nodes[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) {
    double p = 0.0, dp = 1.0;
    legendre_eval(n, 0.0, p, dp);
    nodes[n / 2] = {0.0, 2.0 / (dp * dp)};
  }
  return nodes;
}

}  // namespace

MeasureDiscretization discretize_interval(double a, double b, QuadratureRule rule, int n) {
  if (!(a < b)) throw std::invalid_argument("discretize_interval: requires a < b");
  if (n < 1) throw std::invalid_argument("discretize_interval: requires n >= 1");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("discretize_interval: endpoints must be finite");

  MeasureDiscretization m;
  m.provenance = MeasureDiscretization::Provenance::Interval;
  m.a = a;
  m.b = b;
  m.rule = rule;
  m.n = n;

  const double half = (b - a) / 2.0;
  const double mid = (a + b) / 2.0;
  switch (rule) {
    case QuadratureRule::GaussLegendre:
      for (const auto& node : gauss_legendre_reference(n))
        m.nodes.push_back({mid + half * node.point, half * node.weight});
      break;
    case QuadratureRule::Trapezoid: {
      const double h = (b - a) / n;
      for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? h / 2.0 : h;
        m.nodes.push_back({a + i * h, w});
      }
      break;
    }
    case QuadratureRule::Midpoint: {
      const double h = (b - a) / n;
      for (int i = 0; i < n; ++i) m.nodes.push_back({a + (i + 0.5) * h, h});
      break;
    }
  }
  return m;
}

MeasureDiscretization discrete_measure(std::vector<QuadratureNode> nodes) {
  if (nodes.empty())
    throw std::invalid_argument("discrete_measure: at least one node required");
  for (const auto& node : nodes) {
    if (!std::isfinite(node.point) || !std::isfinite(node.weight))
      throw std::invalid_argument("discrete_measure: nodes must be finite");
    if (node.weight < 0.0)
      throw std::invalid_argument("discrete_measure: weights must be >= 0");
  }
  MeasureDiscretization m;
  m.provenance = MeasureDiscretization::Provenance::Discrete;
  m.nodes = std::move(nodes);
  return m;
}

}  // namespace modframe

#include "hnls/cutoff.hpp"

#include <cmath>

#include "hnls/error.hpp"
#include "hnls/quadrature.hpp"

namespace hnls {

namespace {

// Bump B(s) = exp(-1/q), q = s(1-s), and its first three derivatives.
double bump(double s, int order) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double q = s * (1.0 - s);
  const double q1 = 1.0 - 2.0 * s;
  const double b = std::exp(-1.0 / q);
  if (order == 0) return b;
  // With B = exp(-1/q): B' = B P1, P1 = q'/q^2; B'' = B (P1^2 + P1');
  // B''' = B (P1^3 + 3 P1 P1' + P1'').
  const double q2 = q * q;
  const double p1 = q1 / q2;
  const double p1d = (-2.0 * q2 - 2.0 * q * q1 * q1) / (q2 * q2);
  if (order == 1) return b * p1;
  if (order == 2) return b * (p1 * p1 + p1d);
  const double p1dd = 12.0 * q1 / (q2 * q) + 6.0 * q1 * q1 * q1 / (q2 * q2);
  return b * (p1 * p1 * p1 + 3.0 * p1 * p1d + p1dd);
}

double partial_integral(double x) {
  static const QuadratureRule rule = gauss_legendre(64);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * bump(0.5 * x * (rule.nodes[i] + 1.0), 0);
  return 0.5 * x * sum;
}

double normalizer() {
  static const double z = 2.0 * partial_integral(0.5);
  return z;
}

}  // namespace

double eta(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x <= 0.5) return partial_integral(x) / normalizer();
  return 1.0 - partial_integral(1.0 - x) / normalizer();
}

double eta_derivative(double x, int order) {
  require(order >= 0 && order <= 4, ErrorCode::kInvalidInput, "eta derivative order must be 0..4");
  if (order == 0) return eta(x);
  return bump(x, order - 1) / normalizer();
}

}  // namespace hnls

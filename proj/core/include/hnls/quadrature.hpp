#pragma once

#include <functional>
#include <vector>

namespace hnls {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Adaptive composite 16-point Gauss-Legendre on [a, b]: intervals are
/// bisected until the halves agree with the parent to `tol` (absolute).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                          int max_depth = 40);

}  // namespace hnls

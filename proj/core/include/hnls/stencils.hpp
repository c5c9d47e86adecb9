#pragma once

#include <span>
#include <vector>

#include "hnls/error.hpp"

namespace hnls {

/// Second-order first derivative: centered in the interior, one-sided
/// three-point at both ends. Works for real or complex samples.
template <class T>
void derivative1(std::span<const T> u, double dx, std::span<T> out) {
  const int n = static_cast<int>(u.size());
  require(n >= 3 && static_cast<int>(out.size()) == n, ErrorCode::kInvalidInput, "derivative1 needs >= 3 samples");
  const double c = 0.5 / dx;
  for (int j = 1; j < n - 1; ++j) out[j] = (u[j + 1] - u[j - 1]) * c;
  out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * c;
  out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * c;
}

/// Second-order second derivative with four-point one-sided ends.
template <class T>
void derivative2(std::span<const T> u, double dx, std::span<T> out) {
  const int n = static_cast<int>(u.size());
  require(n >= 4 && static_cast<int>(out.size()) == n, ErrorCode::kInvalidInput, "derivative2 needs >= 4 samples");
  const double c = 1.0 / (dx * dx);
  for (int j = 1; j < n - 1; ++j) out[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * c;
  out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * c;
  out[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) * c;
}

template <class T>
std::vector<T> derivative1(std::span<const T> u, double dx) {
  std::vector<T> out(u.size());
  derivative1<T>(u, dx, out);
  return out;
}

template <class T>
std::vector<T> derivative2(std::span<const T> u, double dx) {
  std::vector<T> out(u.size());
  derivative2<T>(u, dx, out);
  return out;
}

/// u_x(0) by the second-order one-sided difference.
template <class T>
T boundary_derivative1(std::span<const T> u, double dx) {
  return (-3.0 * u[0] + 4.0 * u[1] - u[2]) * (0.5 / dx);
}

/// u_xx(0) by the second-order one-sided difference.
template <class T>
T boundary_derivative2(std::span<const T> u, double dx) {
  return (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (dx * dx);
}

/// Finite-difference weights for derivatives 0..max_order at `x0` on arbitrary
/// distinct nodes (Fornberg's recursion). Result is indexed [order][node].
std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes, int max_order);

}  // namespace hnls

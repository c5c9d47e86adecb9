#pragma once

#include <span>

#include "hnls/grid.hpp"
#include "hnls/weight.hpp"

namespace hnls {

/// Composite trapezoid rule on uniformly spaced samples.
double trapezoid(std::span<const double> f, double dx);
Complex trapezoid(std::span<const Complex> f, double dx);

/// (sum_j |u_j|^2 psi(x_j) w_j)^(1/2) with trapezoid weights w_j.
double weighted_l2_norm(const GridFunction& u, const WeightSpec& w);
double weighted_l2_norm(std::span<const Complex> u, const HalfLineGrid& grid, const WeightSpec& w);
double l2_norm(std::span<const Complex> u, double dx);

/// Discrete weighted inner product int u conj(v) psi dx (trapezoid).
Complex weighted_inner(std::span<const Complex> u, std::span<const Complex> v, const HalfLineGrid& grid,
                       const WeightSpec& w);

struct SigmaPlusValue {
  double value = 0.0;
  /// Window start that attains the supremum.
  double x0 = 0.0;
};

/// sup over x0 (grid nodes with x0 + 1 <= L) of the L2 norm of u over
/// (0,T) x (x0, x0+1). Throws domain-too-short if L < 1.
SigmaPlusValue sigma_plus(const FieldHistory& u_history);

/// int_{L-1}^{L} |u|^2 dx divided by int_0^L |u|^2 dx (0 for the zero field).
double tail_mass_fraction(std::span<const Complex> u, const HalfLineGrid& grid);

/// Throws tail-contamination when the tail fraction exceeds `threshold`.
void enforce_tail_guard(std::span<const Complex> u, const HalfLineGrid& grid, double threshold, double t);

}  // namespace hnls

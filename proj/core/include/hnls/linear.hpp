#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hnls/banded.hpp"
#include "hnls/grid.hpp"
#include "hnls/problem.hpp"
#include "hnls/weight.hpp"

namespace hnls {

/// Crank-Nicolson step for  u_t = A u - i g,  A = i a D2 - b D1 - D3.
///
/// Row 0 carries the Dirichlet value, row N the closure u(L) = 0. D3 is the
/// centered five-point stencil; next to x = 0 it switches to a six-point
/// one-sided stencil, next to x = L it uses a ghost value from u_x(L) = 0.
/// The implicit matrix has two sub- and four super-diagonals.
class LinearStepOperator {
 public:
  LinearStepOperator(const HalfLineGrid& grid, const Coefficients& coeffs);

  const HalfLineGrid& grid() const { return grid_; }
  const Coefficients& coeffs() const { return coeffs_; }

  /// out = A u on rows 1..N-1; out[0] = out[N] = 0.
  void apply(std::span<const Complex> u, std::span<Complex> out) const;

  /// u_next := one step from u_n with effective source g at t_{n+1/2}
  /// (g = f minus whatever the caller moved to the right-hand side) and
  /// boundary value u_next[0] = mu_next.
  void step(std::span<const Complex> u_n, std::span<const Complex> g_half, Complex mu_next,
            std::span<Complex> u_next) const;

 private:
  HalfLineGrid grid_;
  Coefficients coeffs_;
  BandedLu lu_;
};

/// One step with an explicit source slice (zero source if f_half is empty).
GridFunction linear_step(const LinearStepOperator& op, const GridFunction& u_n, const GridFunction& f_half,
                         Complex mu_next);

/// Runs the linear problem (nonlinear coefficients ignored) over the whole
/// grid with u(t, 0) = mu(t) imposed directly.
FieldHistory solve_linear(const ProblemSpec& spec, const HalfLineGrid& grid);

struct CompatibilityChain {
  std::vector<GridFunction> phi;
  /// |mu^(l)(0) - Phi_l(0)| for l = 0..order.
  std::vector<double> mismatches;
};

/// Phi_0 = u0, Phi_l = -i d_t^{l-1} f(0, .) + (i a d_x^2 - b d_x - d_x^3) Phi_{l-1}.
/// Spatial derivatives use sixth-order nine-point stencils. For order > 2 the
/// chain is recomputed on the stride-2 subgrid and an accuracy error raised
/// when the two disagree.
CompatibilityChain compatibility_chain(const ProblemSpec& spec, const HalfLineGrid& grid, int order);

/// u_x(t_n, 0) for every stored level (second-order one-sided).
std::vector<Complex> boundary_trace(const FieldHistory& u);

/// Residual series of the weighted L2 balance for the linear problem with
/// homogeneous boundary data at levels t_1..t_{M-1} (centered time
/// differences). Null f0/f1 mean zero; empty mu1 means "take u_x(t, 0)".
std::vector<double> energy_identity_residual(const FieldHistory& u, std::span<const Complex> mu1,
                                             const WeightSpec& w, const Coefficients& coeffs,
                                             const FieldHistory* f0 = nullptr, const FieldHistory* f1 = nullptr);

}  // namespace hnls

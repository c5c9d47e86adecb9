#pragma once

#include <vector>

#include "hnls/grid.hpp"
#include "hnls/problem.hpp"

namespace hnls {

enum class GalerkinVariant {
  /// phi(0) = phi'(0) = 0; system  i V_t + a V_xx + i b V_x + i V_xxx = F.
  kTwoCondition,
  /// phi(0) = 0; adjoint system  i V_t + a V_xx - i b V_x - i V_xxx = F.
  kOneCondition,
};

/// phi_j(x) = x^s L^(alpha)_{j-1}(2x) e^{-x}, j = 1..k, with (s, alpha) = (2, 4)
/// for the two-condition variant and (1, 2) for the one-condition variant.
/// The generalized Laguerre parameter makes the Gram matrix diagonal.
/// Integrals use composite 16-point Gauss-Legendre panels on [0, 60 + 4k].
class GalerkinBasis {
 public:
  GalerkinBasis(int k, GalerkinVariant variant);

  int dimension() const { return k_; }
  GalerkinVariant variant() const { return variant_; }

  /// d^order phi_j / dx^order at x, j = 0..k-1, order 0..3.
  double phi(int j, double x, int order = 0) const;

  /// int phi_j phi_m dx and S_d[m][j] = int phi_j phi_m^(d) dx.
  double gram(int m, int j) const { return gram_[m * k_ + j]; }
  double stiffness(int order, int m, int j) const { return stiffness_[order - 1][m * k_ + j]; }
  double condition_number() const { return condition_; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// phi_j at every quadrature node, row j.
  const std::vector<double>& samples(int j) const { return samples_[j]; }

 private:
  int k_;
  GalerkinVariant variant_;
  int power_;
  double alpha_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> samples_;
  std::vector<double> gram_;
  std::vector<double> stiffness_[3];
  double condition_ = 1.0;
};

struct GalerkinHistory {
  GalerkinVariant variant = GalerkinVariant::kTwoCondition;
  std::vector<double> t;
  std::vector<std::vector<Complex>> c;
  /// ||V_k(t)||^2 = c^H G c.
  std::vector<double> norm2;
  /// int_0^t (2 Im int F conj(V) dx - |V_x(t, 0)|^2) dt, integrated with the ODE.
  std::vector<double> balance;
  /// int_0^t ||F|| dt, integrated with the ODE.
  std::vector<double> forcing_l1;
  /// V_kx(t, 0).
  std::vector<Complex> trace_x;
  int accepted_steps = 0;
  int rejected_steps = 0;
};

/// Integrates G c' = i (K c - F(t)) from c(0) = 0 with step-doubling RK4,
/// K = a S2 - i b S1 - i S3 (two-condition) or a S2 + i b S1 + i S3
/// (one-condition). Outputs at `outputs` + 1 uniform times on [0, T]. Throws
/// stiffness when the step collapses.
GalerkinHistory galerkin_solve(const GalerkinBasis& basis, const FieldFn& F, double T, const Coefficients& coeffs,
                               int outputs = 100, double tol = 1e-12);

/// ||V(t)||^2 - balance(t): the integrated form of the energy identity.
std::vector<double> galerkin_identity_residual(const GalerkinHistory& history);

/// Same for the one-condition variant, where the trace term is present.
std::vector<double> adjoint_identity_residual(const GalerkinHistory& history);

/// V_k(x) for coefficient vector c.
Complex galerkin_evaluate(const GalerkinBasis& basis, const std::vector<Complex>& c, double x, int order = 0);

}  // namespace hnls

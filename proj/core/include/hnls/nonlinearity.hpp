#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hnls/boundary.hpp"
#include "hnls/grid.hpp"
#include "hnls/linear.hpp"
#include "hnls/problem.hpp"
#include "hnls/weight.hpp"

namespace hnls {

/// g_h(theta) = int_0^theta p y^{p-1} eta(2 - h y) dy: equal to theta^p up to
/// 1/h, constant beyond 2/h. g*_h(theta) = int_0^theta g_h(sqrt y) dy.
class RegularizedNonlinearity {
 public:
  RegularizedNonlinearity(double h, double p);

  double h() const { return h_; }
  double p() const { return p_; }
  double threshold() const { return 1.0 / h_; }

  double value(double theta) const;
  double derivative(double theta) const;
  double primitive(double theta) const;

 private:
  double ramp(double theta) const;

  double h_;
  double p_;
  double plateau_;
};

/// lambda g(|u|) u + i beta D(g(|u|) u) + i gamma D(g(|u|)) u, D the
/// second-order first-difference operator (one-sided at both ends).
void nonlinear_apply(std::span<const Complex> u, double dx, const Coefficients& coeffs,
                     const RegularizedNonlinearity& reg, std::span<Complex> out);
GridFunction nonlinear_apply(const GridFunction& u, const Coefficients& coeffs, const RegularizedNonlinearity& reg);

struct StepControl {
  double tol = 1e-10;
  int max_iter = 50;
  /// Norm used for the successive-iterate distance.
  WeightSpec weight = WeightSpec::one();
};

struct StepLog {
  int iterations = 0;
  /// Ratio of the last two successive distances (0 when only one iterate).
  double contraction = 0.0;
  double distance = 0.0;
  bool regularization_active = false;
};

/// Picard iteration around the Crank-Nicolson step with the nonlinearity
/// evaluated at the time-centred average. With a lifting the unknown is
/// U = u - Psi0 (zero boundary value, source f - F0); otherwise u itself with
/// u(t, 0) = mu(t).
class HnlsStepper {
 public:
  HnlsStepper(const ProblemSpec& spec, const HalfLineGrid& grid, RegularizedNonlinearity reg, StepControl control,
              std::shared_ptr<const LiftingPair> lifting = nullptr);

  const HalfLineGrid& grid() const { return op_.grid(); }
  bool lifted() const { return lifting_ != nullptr; }

  /// Advances level n to n+1. `start` seeds the iteration (empty: use U_n).
  /// Throws contraction-failure after max_iter iterations.
  StepLog step(int n, std::span<const Complex> U_n, std::span<const Complex> start, std::span<Complex> U_next) const;

  /// u = U + Psi0 at level n (identity without lifting).
  void to_physical(int n, std::span<const Complex> U, std::span<Complex> u) const;
  void to_unknown(int n, std::span<const Complex> u, std::span<Complex> U) const;

 private:
  ProblemSpec spec_;
  RegularizedNonlinearity reg_;
  StepControl control_;
  std::shared_ptr<const LiftingPair> lifting_;
  LinearStepOperator op_;
};

/// Single step on the physical field u at level n (0-based) of u_n's grid.
GridFunction hnls_step(const GridFunction& u_n, const ProblemSpec& spec, const RegularizedNonlinearity& reg,
                       std::shared_ptr<const LiftingPair> lifting = nullptr, double tol = 1e-10, int max_iter = 50,
                       int level = 0, StepLog* log = nullptr);

enum class BoundaryMode {
  /// Lifting when mu is nonzero and the equation is nonlinear.
  kAuto,
  kLifting,
  kDirect,
};

struct SolveOptions {
  double h = 1e-3;
  StepControl control;
  BoundaryMode boundary = BoundaryMode::kAuto;
  std::optional<double> lambda0;
  /// Abort with tail-contamination when the mass fraction in [L-1, L]
  /// exceeds this; nonpositive disables the guard.
  double tail_threshold = 1e-8;
};

struct HnlsSolution {
  FieldHistory u;
  std::vector<StepLog> logs;
  std::shared_ptr<const LiftingPair> lifting;

  int max_iterations() const;
  bool regularization_active() const;
};

HnlsSolution solve_hnls(const ProblemSpec& spec, const HalfLineGrid& grid, const SolveOptions& options = {});

}  // namespace hnls

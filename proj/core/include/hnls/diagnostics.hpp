#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hnls/fourier_oracle.hpp"
#include "hnls/grid.hpp"
#include "hnls/nonlinearity.hpp"
#include "hnls/problem.hpp"
#include "hnls/weight.hpp"

namespace hnls {

/// d/dt int|u|^2 at levels 1..M-1 (centred) minus the boundary and source
/// fluxes: -|u_x(0)|^2 + 2 Im int f conj(u), and when mu != 0 also
/// 2a Im(u_x(0) conj mu) + b|mu|^2 + 2 Re(u_xx(0) conj mu) plus the nonlinear
/// trace (2beta + 2gamma) g(|mu|)|mu|^2 - (beta + 2gamma) g*(|mu|^2).
/// Pass nullptr for f when it vanishes; `reg` may be null for the exact
/// |u|^p. Entry n-1 belongs to level n.
std::vector<double> l2_balance_residual(const FieldHistory& u, const ProblemSpec& spec,
                                        const RegularizedNonlinearity* reg = nullptr);

/// max_t |int|u(t)|^2 - int|u0|^2| / int|u0|^2 for the spectral full-line
/// solution sampled at `times`.
double fullline_l2_drift(const PeriodicBox& box, const Coefficients& coeffs, const ProfileFn& u0,
                         const std::vector<double>& times);

/// E(u) = int |u_x|^2 + (i/(beta+gamma))(lambda - a(3beta+2gamma)/3) u conj(u_x)
///        - (2(3beta+2gamma)/(3(p+2))) |u|^{p+2} dx.
class EnergyFunctional {
 public:
  /// Throws undefined-functional when beta + gamma = 0.
  explicit EnergyFunctional(const Coefficients& coeffs);

  /// Complex so callers can check the imaginary round-off.
  Complex evaluate(std::span<const Complex> u, double dx) const;
  double value(std::span<const Complex> u, double dx) const { return evaluate(u, dx).real(); }

  /// (gamma/3) int (|u|^p)_x (|u|^2)_xx dx.
  double gamma_term(std::span<const Complex> u, double dx) const;

 private:
  Coefficients coeffs_;
};

struct EnergyIdentitySeries {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> dE_dt;
  std::vector<double> gamma_term;
  std::vector<double> residual;
  /// max |Im E| / max(1, |E|) over the history.
  double max_imaginary = 0.0;
};

/// dE/dt by second-order differences (one-sided at both ends) at every level,
/// the gamma term by quadrature, residual = dE/dt - gamma_term.
EnergyIdentitySeries energy_identity_residual_nl(const FieldHistory& u, const Coefficients& coeffs);

/// Space-time test function: value(t, x, i, j) = d^i/dt^i d^j/dx^j phi,
/// i <= 1, j <= 3.
struct TestFunction {
  std::string name;
  std::function<Complex(double, double, int, int)> value;
};

/// theta_m(t) x^2 e^{(-1 + i kappa_k) x} with theta_m(t) = (1 - t/T) cos(m pi t / T),
/// m = 0..time_modes-1 and kappa_k = k/2, k = 0..space_modes-1.
std::vector<TestFunction> default_test_family(double T, int time_modes = 2, int space_modes = 3);

/// Left side of the weak formulation for each test function, by trapezoid
/// quadrature in x and t (including i int u0 phi(0) dx and i int mu phi_xx(t,0) dt).
/// Returns |residual| per function. Throws invalid-test-function when phi(T,.),
/// phi(.,0) or phi_x(.,0) is not zero.
std::vector<double> weak_form_residual(const FieldHistory& u, const ProblemSpec& spec,
                                       const std::vector<TestFunction>& family);

/// Function and first derivative: fn(x, order), order 0 or 1.
using ProbeFn = std::function<Complex(double, int)>;

/// a e^{-delta x} cos(omega x + phase), with delta in [1, 3], omega in [0, 10].
std::vector<ProbeFn> damped_wave_family(int count, std::uint64_t seed = 20240601);

struct InterpolationProbe {
  double s = 0.0;
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

/// Ratio ||phi psi1^s psi2^{1/2-s}||_q / (||(|phi'|+|phi|) psi1^{1/2}||^{2s}
/// ||phi psi2^{1/2}||^{1-2s}) with s = 1/4 - 1/(2q), evaluated on `points`
/// uniform nodes of [0, x_max]. q = infinity is allowed. Throws
/// numerical-degeneracy when a denominator vanishes but the numerator does not.
InterpolationProbe interpolation_probe(const std::vector<ProbeFn>& phi, const WeightSpec& psi1,
                                       const WeightSpec& psi2, double q, double x_max = 40.0, int points = 4000);

/// max_n ||u^n||_psi + (sum_n dt ||D u^n||^2_psi')^{1/2}.
double x_norm(const FieldHistory& u, const WeightSpec& psi);

/// (sum (1 + lambda_k^2)^{1/3} |mu_hat_k|^2)^{1/2} on the tapered lifting
/// window of `grid`, normalised so that the zero-order sum is the L2 norm.
double h13_norm(const BoundarySignal& mu, const HalfLineGrid& grid);

/// int_0^T ||f(t)||_psi dt by the trapezoid rule over the grid levels.
double l1_l2_norm(const Source& f, const HalfLineGrid& grid, const WeightSpec& psi);

enum class PerturbationKind { kInitial, kBoundary, kSource };
std::string to_string(PerturbationKind kind);

/// Perturbed data = base + eps * shape of the chosen kind.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::kInitial;
  ProfileFn initial;
  BoundarySignal boundary;
  Source source;

  static Perturbation initial_shape(ProfileFn shape);
  static Perturbation boundary_shape(BoundarySignal shape);
  static Perturbation source_shape(Source shape);
};

struct PerturbationRow {
  PerturbationKind kind;
  double eps = 0.0;
  double data_distance = 0.0;
  double solution_distance = 0.0;
  /// solution / data distance; 0 when both vanish.
  double ratio = 0.0;
};

struct PerturbationExperiment {
  std::vector<PerturbationRow> rows;
  /// max ratio / min ratio per perturbation kind, in the order given.
  std::vector<double> spread;
};

/// Solves the base problem and every perturbed problem (the perturbed runs in
/// parallel) and tabulates distances. Throws config-rejected outside
/// p in [1, 2] or when the uniqueness condition fails for psi, and
/// unconverged-run when any solve fails.
PerturbationExperiment continuous_dependence_experiment(const ProblemSpec& base, const HalfLineGrid& grid,
                                                        const std::vector<Perturbation>& perturbations,
                                                        const WeightSpec& psi,
                                                        const std::vector<double>& eps = {1e-1, 1e-2, 1e-3},
                                                        const SolveOptions& options = {});

}  // namespace hnls

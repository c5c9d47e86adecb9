#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "hnls/grid.hpp"
#include "hnls/problem.hpp"

namespace hnls {

/// Root of r^3 - i a r^2 + b r + i lambda = 0 with negative real part.
struct CharacteristicRoot {
  double lambda = 0.0;
  Complex r0;
  double residual = 0.0;
};

/// All three roots (complex Cardano, then Newton polishing), unsorted.
std::array<Complex, 3> characteristic_roots(double lambda, double a, double b);

/// Throws below-cutoff unless exactly one root has Re r < 0 (roots within
/// round-off of the imaginary axis do not count as negative).
CharacteristicRoot find_root(double lambda, double a, double b);

struct Lambda0Calibration {
  double a = 0.0;
  double b = 0.0;
  double lambda0 = 1.0;
  /// Decay margin: Re r0 <= -2 eps |lambda|^{1/3} for every scanned |lambda| >= lambda0.
  double eps = 0.0;
};

/// Scans |lambda| on a log grid over [1, 1e8] (both signs). lambda0 is the
/// smallest grid value above which every root is found with residual below
/// 1e-12 max(1, |lambda|); eps is 0.99 of the smallest observed margin.
Lambda0Calibration calibrate_lambda0(double a, double b);

/// Uniform sampling window around [0, T] used for time transforms.
struct TimeWindow {
  double start = 0.0;
  double spacing = 1.0;
  int samples = 0;
  /// Window index of t = 0.
  int origin = 0;

  double t(int k) const { return start + k * spacing; }
  /// Smooth taper: 1 in the middle, eta-shaped over the outer 10% at both ends.
  double taper(int k) const;
  std::vector<double> frequencies() const;
};

/// Window sampled at half time steps, padded by 1.5 T on both sides.
TimeWindow lifting_window(const HalfLineGrid& grid);

/// mu (tapered on the window) = mu0 + mu1 with mu0 carrying |lambda| < lambda0.
struct FrequencySplit {
  double lambda0 = 1.0;
  TimeWindow window;
  std::vector<double> lambda;
  std::vector<Complex> mu0_hat;
  std::vector<Complex> mu1_hat;
  std::vector<Complex> mu0;
  std::vector<Complex> mu1;
  /// d mu0 / dt on the window (spectral).
  std::vector<Complex> mu0_t;
};

FrequencySplit split_frequencies(const BoundarySignal& mu, const HalfLineGrid& grid, double lambda0);

/// J+ and its derivatives at half steps m = 0..2M on the nodes with x_j < 2.
class JPlusField {
 public:
  enum Component { kValue = 0, kX = 1, kXX = 2, kXXX = 3, kT = 4 };

  JPlusField(int half_steps, int support_nodes);

  int half_steps() const { return half_steps_; }
  int support_nodes() const { return support_nodes_; }
  Complex operator()(int m, int j, Component c = kValue) const { return data_[c][index(m, j)]; }
  Complex& at(int m, int j, Component c) { return data_[c][index(m, j)]; }

 private:
  std::size_t index(int m, int j) const { return static_cast<std::size_t>(m) * support_nodes_ + j; }

  int half_steps_;
  int support_nodes_;
  std::array<std::vector<Complex>, 5> data_;
};

/// Number of grid nodes with x_j < 2 (the lifting support).
int lifting_support_nodes(const HalfLineGrid& grid);

/// J+(t, x) = sum_k e^{i lambda_k t} e^{r0(lambda_k) x} mu1_hat_k from a
/// ready spectrum; every nonzero bin must satisfy |lambda_k| >= lambda0.
JPlusField synthesize_J_plus(std::span<const Complex> mu1_hat, const TimeWindow& window, const HalfLineGrid& grid,
                             const Coefficients& coeffs, double lambda0);

/// Samples mu1 on the lifting window, transforms it, and synthesizes J+.
/// Throws splitting-violation when more than 1e-10 of the spectral energy
/// sits below lambda0.
JPlusField build_J_plus(const BoundarySignal& mu1, const HalfLineGrid& grid, const Coefficients& coeffs,
                        double lambda0);

/// Psi0 = [mu0 + J+] eta(2 - x) and F0 = i Psi0_t + a Psi0_xx + i b Psi0_x + i Psi0_xxx
/// at half steps, stored on the support x < 2 (both vanish beyond).
class LiftingPair {
 public:
  LiftingPair() = default;
  LiftingPair(const HalfLineGrid& grid, double lambda0);

  bool empty() const { return half_steps_ == 0; }
  double lambda0() const { return lambda0_; }
  int half_steps() const { return half_steps_; }
  int support_nodes() const { return support_nodes_; }

  /// Values at half step m (t = m dt / 2); length support_nodes().
  std::span<const Complex> psi(int m) const;
  std::span<const Complex> source(int m) const;
  std::span<Complex> psi(int m);
  std::span<Complex> source(int m);

  /// Full-grid histories at integer levels (zero for x >= 2).
  FieldHistory psi_history() const;
  FieldHistory source_history() const;

 private:
  HalfLineGrid grid_{1.0, 8, 1.0, 2};
  double lambda0_ = 1.0;
  int half_steps_ = 0;
  int support_nodes_ = 0;
  std::vector<Complex> psi_;
  std::vector<Complex> source_;
};

/// Assembles split, J+, Psi0 and F0. lambda0 defaults to the calibrated
/// value for (a, b). Verifies Psi0(t, 0) = mu(t) at every half step.
LiftingPair build_lifting(const BoundarySignal& mu, const HalfLineGrid& grid, const Coefficients& coeffs,
                          std::optional<double> lambda0 = std::nullopt);

}  // namespace hnls

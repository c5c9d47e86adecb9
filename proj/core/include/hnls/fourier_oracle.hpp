#pragma once

#include <span>
#include <vector>

#include "hnls/grid.hpp"
#include "hnls/problem.hpp"

namespace hnls {

/// Uniform periodic box [x_min, x_min + width) with `points` samples.
struct PeriodicBox {
  double x_min = 0.0;
  double width = 1.0;
  int points = 2;

  double spacing() const { return width / points; }
  double x(int j) const { return x_min + j * spacing(); }
  std::vector<double> frequencies() const;

  /// Box of width 2L centred on [0, L] with the grid spacing, so that node j
  /// of `grid` is box sample offset() + j. Needs an even cell count.
  static PeriodicBox around(const HalfLineGrid& grid);
  int offset() const;
};

/// Dispersion relation omega(xi) = xi^3 - a xi^2 - b xi.
double dispersion(double xi, const Coefficients& coeffs);

/// Fraction of spectral energy carried by the top third of |xi|.
double spectral_tail_fraction(std::span<const Complex> hat);

/// w_hat(t) = u0_hat e^{i omega t} - i int_0^t f_hat(tau) e^{i omega (t - tau)} dtau,
/// trapezoid in tau over f_hat levels tau_m = m t / (levels - 1). Empty
/// f_hat means f = 0. Raises a resolution error when any input spectrum has
/// tail fraction above 1e-10.
std::vector<Complex> fourier_oracle_fullline(std::span<const Complex> u0_hat,
                                             const std::vector<std::vector<Complex>>& f_hat, double t,
                                             const Coefficients& coeffs, std::span<const double> xi);

/// Physical-space convenience wrapper: samples u0 (and f on `time_levels`
/// levels of [0, t]) on the box, transforms, evolves, transforms back.
std::vector<Complex> fullline_solution(const PeriodicBox& box, const Coefficients& coeffs, const ProfileFn& u0,
                                       double t, const Source& f = {}, int time_levels = 0);

}  // namespace hnls

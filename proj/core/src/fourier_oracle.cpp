#include "hnls/fourier_oracle.hpp"

#include <cmath>

#include "hnls/error.hpp"
#include "hnls/fft.hpp"

namespace hnls {

std::vector<double> PeriodicBox::frequencies() const { return fft_frequencies(points, spacing()); }

PeriodicBox PeriodicBox::around(const HalfLineGrid& grid) {
  require(grid.cells() % 2 == 0, ErrorCode::kInvalidInput, "periodic box needs an even cell count");
  return {-0.5 * grid.length(), 2.0 * grid.length(), 2 * grid.cells()};
}

int PeriodicBox::offset() const { return static_cast<int>(std::lround(-x_min / spacing())); }

double dispersion(double xi, const Coefficients& coeffs) { return xi * xi * xi - coeffs.a * xi * xi - coeffs.b * xi; }

double spectral_tail_fraction(std::span<const Complex> hat) {
  const int n = static_cast<int>(hat.size());
  double total = 0.0;
  double tail = 0.0;
  for (int k = 0; k < n; ++k) {
    const int index = k < (n + 1) / 2 ? k : n - k;
    const double e = std::norm(hat[k]);
    total += e;
    if (3 * index > n) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

namespace {

void guard(std::span<const Complex> hat, const char* what) {
  const double tail = spectral_tail_fraction(hat);
  if (tail > 1e-10) {
    fail(ErrorCode::kResolution, std::string(what) + " spectrum has tail fraction " + std::to_string(tail) +
                                     " above 1e-10; refine the box");
  }
}

}  // namespace

std::vector<Complex> fourier_oracle_fullline(std::span<const Complex> u0_hat,
                                             const std::vector<std::vector<Complex>>& f_hat, double t,
                                             const Coefficients& coeffs, std::span<const double> xi) {
  const std::size_t n = u0_hat.size();
  require(xi.size() == n, ErrorCode::kInvalidInput, "frequency array size mismatch");
  require(f_hat.empty() || f_hat.size() >= 2, ErrorCode::kInsufficientData, "source needs >= 2 time levels");
  guard(u0_hat, "initial");
  for (const auto& level : f_hat) {
    require(level.size() == n, ErrorCode::kInvalidInput, "source spectrum size mismatch");
    guard(level, "source");
  }
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = u0_hat[k] * std::exp(Complex(0.0, dispersion(xi[k], coeffs) * t));
  if (!f_hat.empty()) {
    const int last = static_cast<int>(f_hat.size()) - 1;
    const double dtau = t / last;
    for (int m = 0; m <= last; ++m) {
      const double weight = (m == 0 || m == last ? 0.5 : 1.0) * dtau;
      const double remaining = t - m * dtau;
      for (std::size_t k = 0; k < n; ++k) {
        out[k] += Complex(0.0, -weight) * f_hat[m][k] * std::exp(Complex(0.0, dispersion(xi[k], coeffs) * remaining));
      }
    }
  }
  return out;
}

std::vector<Complex> fullline_solution(const PeriodicBox& box, const Coefficients& coeffs, const ProfileFn& u0,
                                       double t, const Source& f, int time_levels) {
  const Fft fft(box.points);
  std::vector<Complex> samples(box.points);
  for (int j = 0; j < box.points; ++j) samples[j] = u0(box.x(j));
  const auto u0_hat = fft.forward(samples);
  std::vector<std::vector<Complex>> f_hat;
  if (!f.is_zero()) {
    require(time_levels >= 2, ErrorCode::kInsufficientData, "source quadrature needs >= 2 levels");
    for (int m = 0; m < time_levels; ++m) {
      const double tau = t * m / (time_levels - 1);
      for (int j = 0; j < box.points; ++j) samples[j] = f(tau, box.x(j));
      f_hat.push_back(fft.forward(samples));
    }
  }
  const auto xi = box.frequencies();
  return fft.inverse(fourier_oracle_fullline(u0_hat, f_hat, t, coeffs, xi));
}

}  // namespace hnls

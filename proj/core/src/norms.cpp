#include "hnls/norms.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "hnls/error.hpp"

namespace hnls {

double trapezoid(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) sum += f[j];
  return sum * dx;
}

Complex trapezoid(std::span<const Complex> f, double dx) {
  if (f.size() < 2) return 0.0;
  Complex sum = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) sum += f[j];
  return sum * dx;
}

double weighted_l2_norm(std::span<const Complex> u, const HalfLineGrid& grid, const WeightSpec& w) {
  require(static_cast<int>(u.size()) == grid.nodes(), ErrorCode::kInvalidInput, "field and grid sizes differ");
  std::vector<double> density(u.size());
  for (int j = 0; j < grid.nodes(); ++j) {
    const double mag2 = std::norm(u[j]);
    require(std::isfinite(mag2), ErrorCode::kInvalidInput, "non-finite sample in weighted norm");
    density[j] = mag2 * w(grid.x(j));
  }
  return std::sqrt(trapezoid(density, grid.dx()));
}

double weighted_l2_norm(const GridFunction& u, const WeightSpec& w) {
  return weighted_l2_norm(u.values(), u.grid(), w);
}

double l2_norm(std::span<const Complex> u, double dx) {
  std::vector<double> density(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) density[j] = std::norm(u[j]);
  return std::sqrt(trapezoid(density, dx));
}

Complex weighted_inner(std::span<const Complex> u, std::span<const Complex> v, const HalfLineGrid& grid,
                       const WeightSpec& w) {
  std::vector<Complex> density(u.size());
  for (int j = 0; j < grid.nodes(); ++j) density[j] = u[j] * std::conj(v[j]) * w(grid.x(j));
  return trapezoid(density, grid.dx());
}

SigmaPlusValue sigma_plus(const FieldHistory& u_history) {
  const HalfLineGrid& grid = u_history.grid();
  require(grid.length() >= 1.0, ErrorCode::kDomainTooShort, "sigma+ needs L >= 1");
  require(u_history.levels() >= 2, ErrorCode::kInsufficientData, "sigma+ needs at least two time levels");
  const double dx = grid.dx();
  const int nodes = grid.nodes();
  int windows = 0;
  while (windows < nodes && grid.x(windows) + 1.0 <= grid.length() + 1e-12 * grid.length()) ++windows;

  std::vector<double> cumulative(nodes);
  std::vector<std::vector<double>> window_mass(u_history.levels(), std::vector<double>(windows));
  for (int n = 0; n < u_history.levels(); ++n) {
    const auto u = u_history.slice(n);
    cumulative[0] = 0.0;
    for (int j = 1; j < nodes; ++j) cumulative[j] = cumulative[j - 1] + 0.5 * dx * (std::norm(u[j - 1]) + std::norm(u[j]));
    for (int i = 0; i < windows; ++i) {
      const double end = (grid.x(i) + 1.0) / dx;
      const int k = std::min(static_cast<int>(std::floor(end)), nodes - 2);
      const double frac = end - k;
      const double c_end = cumulative[k] + frac * (cumulative[k + 1] - cumulative[k]);
      window_mass[n][i] = c_end - cumulative[i];
    }
  }
  SigmaPlusValue best;
  const double dt = grid.dt();
  for (int i = 0; i < windows; ++i) {
    double total = 0.0;
    const int last = u_history.levels() - 1;
    for (int n = 0; n <= last; ++n) total += (n == 0 || n == last ? 0.5 : 1.0) * window_mass[n][i];
    total *= dt;
    const double value = std::sqrt(std::max(total, 0.0));
    if (value > best.value) best = {value, grid.x(i)};
  }
  return best;
}

double tail_mass_fraction(std::span<const Complex> u, const HalfLineGrid& grid) {
  const double dx = grid.dx();
  const int tail_start = std::max(0, static_cast<int>(std::floor((grid.length() - 1.0) / dx)));
  std::vector<double> density(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) density[j] = std::norm(u[j]);
  const double total = trapezoid(density, dx);
  if (total == 0.0) return 0.0;
  const double tail = trapezoid(std::span<const double>(density).subspan(tail_start), dx);
  return tail / total;
}

void enforce_tail_guard(std::span<const Complex> u, const HalfLineGrid& grid, double threshold, double t) {
  const double fraction = tail_mass_fraction(u, grid);
  if (fraction > threshold) {
    std::ostringstream msg;
    msg << "tail mass fraction " << fraction << " exceeds " << threshold << " at t = " << t
        << "; enlarge L or shorten T";
    fail(ErrorCode::kTailContamination, msg.str());
  }
}

}  // namespace hnls

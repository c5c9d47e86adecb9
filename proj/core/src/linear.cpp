#include "hnls/linear.hpp"

#include <algorithm>
#include <cmath>

#include "hnls/error.hpp"
#include "hnls/norms.hpp"
#include "hnls/stencils.hpp"

namespace hnls {

namespace {

constexpr int kLower = 2;
constexpr int kUpper = 4;
// Six-point one-sided third derivative at x_1 on nodes x_0..x_5 (times dx^3).
constexpr double kD3Left[6] = {-1.75, 6.25, -8.5, 5.5, -1.75, 0.25};

// Calls emit(col, coeff) for every nonzero of row j (1 <= j <= N-1) of A.
template <class Emit>
void operator_row(int j, int cells, double dx, const Coefficients& c, Emit&& emit) {
  const double h2 = 1.0 / (dx * dx);
  const Complex ia(0.0, c.a);
  emit(j - 1, ia * h2 + c.b * 0.5 / dx);
  emit(j, -2.0 * ia * h2);
  emit(j + 1, ia * h2 - c.b * 0.5 / dx);

  const double h3 = 1.0 / (dx * dx * dx);
  if (j == 1) {
    for (int k = 0; k < 6; ++k) emit(k, -kD3Left[k] * h3);
  } else if (j == cells - 1) {
    // Ghost u_{N+1} = u_{N-1} from u_x(L) = 0.
    const double s = 0.5 * h3;
    emit(j - 2, s);
    emit(j - 1, -2.0 * s);
    emit(j, -s);
    emit(j + 1, 2.0 * s);
  } else {
    const double s = 0.5 * h3;
    emit(j - 2, s);
    emit(j - 1, -2.0 * s);
    emit(j + 1, 2.0 * s);
    emit(j + 2, -s);
  }
}

}  // namespace

LinearStepOperator::LinearStepOperator(const HalfLineGrid& grid, const Coefficients& coeffs)
    : grid_(grid), coeffs_(coeffs), lu_(grid.nodes(), kLower, kUpper) {
  const int cells = grid.cells();
  const double half_dt = 0.5 * grid.dt();
  lu_.set(0, 0, 1.0);
  lu_.set(cells, cells, 1.0);
  for (int j = 1; j < cells; ++j) {
    lu_.add(j, j, 1.0);
    operator_row(j, cells, grid.dx(), coeffs_, [&](int col, Complex v) { lu_.add(j, col, -half_dt * v); });
  }
  lu_.factor();
}

void LinearStepOperator::apply(std::span<const Complex> u, std::span<Complex> out) const {
  const int cells = grid_.cells();
  require(static_cast<int>(u.size()) == grid_.nodes() && static_cast<int>(out.size()) == grid_.nodes(),
          ErrorCode::kInvalidInput, "operator size mismatch");
  out[0] = 0.0;
  out[cells] = 0.0;
  for (int j = 1; j < cells; ++j) {
    Complex sum{};
    operator_row(j, cells, grid_.dx(), coeffs_, [&](int col, Complex v) { sum += v * u[col]; });
    out[j] = sum;
  }
}

void LinearStepOperator::step(std::span<const Complex> u_n, std::span<const Complex> g_half, Complex mu_next,
                              std::span<Complex> u_next) const {
  const int cells = grid_.cells();
  const double dt = grid_.dt();
  apply(u_n, u_next);
  const Complex minus_i_dt(0.0, -dt);
  for (int j = 1; j < cells; ++j) {
    u_next[j] = u_n[j] + 0.5 * dt * u_next[j];
    if (!g_half.empty()) u_next[j] += minus_i_dt * g_half[j];
  }
  u_next[0] = mu_next;
  u_next[cells] = 0.0;
  lu_.solve(u_next);
}

GridFunction linear_step(const LinearStepOperator& op, const GridFunction& u_n, const GridFunction& f_half,
                         Complex mu_next) {
  require(u_n.grid() == op.grid(), ErrorCode::kInvalidInput, "grid mismatch in linear_step");
  GridFunction out(op.grid());
  op.step(u_n.values(), f_half.values(), mu_next, out.values());
  return out;
}

FieldHistory solve_linear(const ProblemSpec& spec, const HalfLineGrid& grid) {
  const LinearStepOperator op(grid, spec.coeffs);
  FieldHistory history(grid);
  GridFunction u = spec.initial_on(grid);
  u[0] = spec.boundary(0.0);
  u.require_finite();
  history.push_back(u.values());
  std::vector<Complex> g(spec.source.is_zero() ? 0 : grid.nodes());
  std::vector<Complex> next(grid.nodes());
  for (int n = 0; n < grid.steps(); ++n) {
    if (!g.empty()) spec.source.sample(grid.t(n) + 0.5 * grid.dt(), grid, g);
    op.step(history.slice(n), g, spec.boundary(grid.t(n + 1)), next);
    history.push_back(next);
  }
  return history;
}

namespace {

// (i a d^2 - b d - d^3) v with sixth-order nine-point Fornberg stencils,
// windows clipped at both ends of the grid.
std::vector<Complex> high_order_operator(std::span<const Complex> v, const HalfLineGrid& grid,
                                         const Coefficients& c) {
  const int nodes = grid.nodes();
  const int width = std::min(9, nodes);
  std::vector<Complex> out(nodes);
  std::vector<double> xs(width);
  for (int j = 0; j < nodes; ++j) {
    const int start = std::clamp(j - width / 2, 0, nodes - width);
    for (int k = 0; k < width; ++k) xs[k] = grid.x(start + k);
    const auto w = fornberg_weights(grid.x(j), xs, 3);
    Complex sum{};
    for (int k = 0; k < width; ++k) {
      const Complex coeff = Complex(0.0, c.a) * w[2][k] - c.b * w[1][k] - w[3][k];
      sum += coeff * v[start + k];
    }
    out[j] = sum;
  }
  return out;
}

// d^order/dt^order f(0, x_j) by a forward (order + 6)-point stencil.
std::vector<Complex> source_time_derivative(const Source& f, const HalfLineGrid& grid, int order) {
  std::vector<Complex> out(grid.nodes());
  if (f.is_zero()) return out;
  if (order == 0) {
    f.sample(0.0, grid, out);
    return out;
  }
  const double h = 1e-2;
  std::vector<double> ts(order + 6);
  for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = k * h;
  const auto w = fornberg_weights(0.0, ts, order);
  std::vector<Complex> slice(grid.nodes());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    f.sample(ts[k], grid, slice);
    for (int j = 0; j < grid.nodes(); ++j) out[j] += w[order][k] * slice[j];
  }
  return out;
}

CompatibilityChain build_chain(const ProblemSpec& spec, const HalfLineGrid& grid, int order) {
  CompatibilityChain chain;
  chain.phi.push_back(spec.initial_on(grid));
  for (int l = 1; l <= order; ++l) {
    auto next = high_order_operator(chain.phi.back().values(), grid, spec.coeffs);
    const auto ft = source_time_derivative(spec.source, grid, l - 1);
    for (int j = 0; j < grid.nodes(); ++j) next[j] += Complex(0.0, -1.0) * ft[j];
    chain.phi.emplace_back(grid, std::move(next));
  }
  for (int l = 0; l <= order; ++l) chain.mismatches.push_back(std::abs(spec.boundary.derivative(0.0, l) - chain.phi[l][0]));
  return chain;
}

}  // namespace

CompatibilityChain compatibility_chain(const ProblemSpec& spec, const HalfLineGrid& grid, int order) {
  require(order >= 0, ErrorCode::kInvalidInput, "negative compatibility order");
  CompatibilityChain chain = build_chain(spec, grid, order);
  if (order > 2) {
    require(grid.cells() % 2 == 0 && grid.cells() >= 16, ErrorCode::kAccuracy,
            "accuracy check for order > 2 needs an even cell count >= 16");
    const HalfLineGrid coarse(grid.length(), grid.cells() / 2, grid.horizon(), grid.steps());
    const CompatibilityChain check = build_chain(spec, coarse, order);
    const auto fine = chain.phi.back().values();
    const auto crude = check.phi.back().values();
    double scale = 0.0;
    double diff = 0.0;
    for (int j = 0; j < coarse.nodes(); ++j) {
      scale = std::max(scale, std::abs(fine[2 * j]));
      diff = std::max(diff, std::abs(fine[2 * j] - crude[j]));
    }
    if (!(diff <= 1e-3 * std::max(1.0, scale))) {
      fail(ErrorCode::kAccuracy, "grid cannot resolve d_x^" + std::to_string(3 * order) +
                                     " (stride-2 discrepancy " + std::to_string(diff) + ")");
    }
  }
  return chain;
}

std::vector<Complex> boundary_trace(const FieldHistory& u) {
  std::vector<Complex> out(u.levels());
  for (int n = 0; n < u.levels(); ++n) out[n] = boundary_derivative1(u.slice(n), u.grid().dx());
  return out;
}

std::vector<double> energy_identity_residual(const FieldHistory& u, std::span<const Complex> mu1,
                                             const WeightSpec& w, const Coefficients& coeffs,
                                             const FieldHistory* f0, const FieldHistory* f1) {
  require(u.levels() >= 3, ErrorCode::kInsufficientData, "energy identity needs at least three levels");
  require(mu1.empty() || static_cast<int>(mu1.size()) >= u.levels(), ErrorCode::kInsufficientData,
          "mu1 history shorter than solution history");
  require(!f0 || f0->levels() >= u.levels(), ErrorCode::kInsufficientData, "f0 history too short");
  require(!f1 || f1->levels() >= u.levels(), ErrorCode::kInsufficientData, "f1 history too short");
  const HalfLineGrid& grid = u.grid();
  const int nodes = grid.nodes();
  const double dx = grid.dx();
  const double dt = grid.dt();

  std::vector<double> psi(nodes), psi1(nodes), psi3(nodes);
  for (int j = 0; j < nodes; ++j) {
    psi[j] = w(grid.x(j));
    psi1[j] = w.derivative(grid.x(j), 1);
    psi3[j] = w.derivative(grid.x(j), 3);
  }
  std::vector<double> mass(u.levels());
  std::vector<double> d(nodes);
  for (int n = 0; n < u.levels(); ++n) {
    const auto s = u.slice(n);
    for (int j = 0; j < nodes; ++j) d[j] = std::norm(s[j]) * psi[j];
    mass[n] = trapezoid(d, dx);
  }

  std::vector<double> residual;
  residual.reserve(u.levels() - 2);
  std::vector<Complex> ux(nodes), cross(nodes), weighted(nodes), weighted_x(nodes);
  for (int n = 1; n + 1 < u.levels(); ++n) {
    const auto s = u.slice(n);
    derivative1<Complex>(s, dx, ux);
    const Complex trace = mu1.empty() ? ux[0] : mu1[n];
    for (int j = 0; j < nodes; ++j) {
      d[j] = (3.0 * std::norm(ux[j]) - coeffs.b * std::norm(s[j])) * psi1[j] - std::norm(s[j]) * psi3[j];
      cross[j] = ux[j] * std::conj(s[j]) * psi1[j];
    }
    double r = (mass[n + 1] - mass[n - 1]) / (2.0 * dt) + std::norm(trace) * psi[0];
    r += trapezoid(d, dx) - 2.0 * coeffs.a * trapezoid(cross, dx).imag();
    if (f0) {
      const auto f = f0->slice(n);
      for (int j = 0; j < nodes; ++j) cross[j] = f[j] * std::conj(s[j]) * psi[j];
      r -= 2.0 * trapezoid(cross, dx).imag();
    }
    if (f1) {
      const auto f = f1->slice(n);
      for (int j = 0; j < nodes; ++j) weighted[j] = std::conj(s[j]) * psi[j];
      derivative1<Complex>(weighted, dx, weighted_x);
      for (int j = 0; j < nodes; ++j) cross[j] = f[j] * weighted_x[j];
      r += 2.0 * trapezoid(cross, dx).imag();
    }
    residual.push_back(r);
  }
  return residual;
}

}  // namespace hnls

#include "hnls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hnls/cutoff.hpp"
#include "hnls/error.hpp"
#include "hnls/norms.hpp"
#include "hnls/quadrature.hpp"
#include "hnls/stencils.hpp"

namespace hnls {

RegularizedNonlinearity::RegularizedNonlinearity(double h, double p) : h_(h), p_(p), plateau_(0.0) {
  require(h > 0.0 && h <= 1.0, ErrorCode::kInvalidInput, "regularization h must lie in (0, 1]");
  require(p >= 1.0, ErrorCode::kInvalidInput, "exponent p must be >= 1");
  plateau_ = ramp(2.0 / h_);
}

double RegularizedNonlinearity::ramp(double theta) const {
  const double start = 1.0 / h_;
  const double tol = 1e-15 * std::max(1.0, std::pow(2.0 / h_, p_));
  const auto integrand = [this](double y) { return p_ * std::pow(y, p_ - 1.0) * eta(2.0 - h_ * y); };
  return std::pow(start, p_) + integrate_adaptive(integrand, start, theta, tol);
}

double RegularizedNonlinearity::value(double theta) const {
  require(theta >= 0.0, ErrorCode::kInvalidInput, "g_h needs theta >= 0");
  if (theta <= 1.0 / h_) return std::pow(theta, p_);
  if (theta >= 2.0 / h_) return plateau_;
  return ramp(theta);
}

double RegularizedNonlinearity::derivative(double theta) const {
  require(theta >= 0.0, ErrorCode::kInvalidInput, "g_h needs theta >= 0");
  if (p_ == 1.0) return eta(2.0 - h_ * theta);
  return p_ * std::pow(theta, p_ - 1.0) * eta(2.0 - h_ * theta);
}

double RegularizedNonlinearity::primitive(double theta) const {
  require(theta >= 0.0, ErrorCode::kInvalidInput, "g* needs theta >= 0");
  const double q = 0.5 * p_ + 1.0;
  const double exact_end = 1.0 / (h_ * h_);
  if (theta <= exact_end) return std::pow(theta, q) / q;
  const double flat_start = 4.0 / (h_ * h_);
  const double tol = 1e-14 * std::max(1.0, plateau_ * flat_start);
  double sum = std::pow(exact_end, q) / q;
  sum += integrate_adaptive([this](double y) { return value(std::sqrt(y)); }, exact_end, std::min(theta, flat_start),
                            tol, 30);
  if (theta > flat_start) sum += plateau_ * (theta - flat_start);
  return sum;
}

void nonlinear_apply(std::span<const Complex> u, double dx, const Coefficients& coeffs,
                     const RegularizedNonlinearity& reg, std::span<Complex> out) {
  const std::size_t n = u.size();
  require(out.size() == n, ErrorCode::kInvalidInput, "nonlinear_apply size mismatch");
  std::vector<Complex> g(n), gu(n), dg(n), dgu(n);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = reg.value(std::abs(u[j]));
    gu[j] = g[j] * u[j];
  }
  if (coeffs.beta != 0.0) derivative1<Complex>(gu, dx, dgu);
  if (coeffs.gamma != 0.0) derivative1<Complex>(g, dx, dg);
  const Complex ib(0.0, coeffs.beta);
  const Complex ig(0.0, coeffs.gamma);
  for (std::size_t j = 0; j < n; ++j) out[j] = coeffs.lambda * gu[j] + ib * dgu[j] + ig * dg[j] * u[j];
}

GridFunction nonlinear_apply(const GridFunction& u, const Coefficients& coeffs, const RegularizedNonlinearity& reg) {
  GridFunction out(u.grid());
  nonlinear_apply(u.values(), u.grid().dx(), coeffs, reg, out.values());
  return out;
}

HnlsStepper::HnlsStepper(const ProblemSpec& spec, const HalfLineGrid& grid, RegularizedNonlinearity reg,
                         StepControl control, std::shared_ptr<const LiftingPair> lifting)
    : spec_(spec), reg_(reg), control_(std::move(control)), lifting_(std::move(lifting)), op_(grid, spec.coeffs) {
  require(control_.tol > 0.0 && control_.max_iter >= 1, ErrorCode::kInvalidInput, "bad step control");
  if (lifting_) {
    require(lifting_->half_steps() == 2 * grid.steps() + 1, ErrorCode::kInvalidInput, "lifting/grid mismatch");
  }
}

namespace {

void add_support(std::span<Complex> field, std::span<const Complex> support, double scale) {
  for (std::size_t j = 0; j < support.size(); ++j) field[j] += scale * support[j];
}

}  // namespace

void HnlsStepper::to_physical(int n, std::span<const Complex> U, std::span<Complex> u) const {
  std::copy(U.begin(), U.end(), u.begin());
  if (lifting_) add_support(u, lifting_->psi(2 * n), 1.0);
}

void HnlsStepper::to_unknown(int n, std::span<const Complex> u, std::span<Complex> U) const {
  std::copy(u.begin(), u.end(), U.begin());
  if (lifting_) add_support(U, lifting_->psi(2 * n), -1.0);
}

StepLog HnlsStepper::step(int n, std::span<const Complex> U_n, std::span<const Complex> start,
                          std::span<Complex> U_next) const {
  const HalfLineGrid& g = grid();
  const int nodes = g.nodes();
  require(n >= 0 && n < g.steps(), ErrorCode::kInvalidInput, "step index out of range");
  require(static_cast<int>(U_n.size()) == nodes && static_cast<int>(U_next.size()) == nodes,
          ErrorCode::kInvalidInput, "step size mismatch");
  const double t_half = g.t(n) + 0.5 * g.dt();

  // Fixed part of the source: f - F0 at the half step.
  std::vector<Complex> fixed(nodes);
  spec_.source.sample(t_half, g, fixed);
  if (lifting_) add_support(fixed, lifting_->source(2 * n + 1), -1.0);
  const Complex boundary = lifting_ ? Complex{} : spec_.boundary(g.t(n + 1));

  std::vector<Complex> u_old(nodes);
  to_physical(n, U_n, u_old);

  StepLog log;
  std::vector<Complex> current(start.empty() ? U_n.begin() : start.begin(), start.empty() ? U_n.end() : start.end());
  if (spec_.coeffs.is_linear()) {
    op_.step(U_n, fixed, boundary, U_next);
    log.iterations = 1;
    return log;
  }

  std::vector<Complex> average(nodes), nonlinear(nodes), source(nodes), next(nodes), diff(nodes);
  double previous = 0.0;
  const double threshold = reg_.threshold();
  for (int iter = 1; iter <= control_.max_iter; ++iter) {
    to_physical(n + 1, current, average);
    for (int j = 0; j < nodes; ++j) {
      average[j] = 0.5 * (average[j] + u_old[j]);
      if (std::abs(average[j]) > threshold) log.regularization_active = true;
    }
    nonlinear_apply(average, g.dx(), spec_.coeffs, reg_, nonlinear);
    for (int j = 0; j < nodes; ++j) source[j] = fixed[j] - nonlinear[j];
    op_.step(U_n, source, boundary, next);

    for (int j = 0; j < nodes; ++j) diff[j] = next[j] - current[j];
    const double distance = weighted_l2_norm(diff, g, control_.weight);
    const double size = weighted_l2_norm(next, g, control_.weight);
    log.iterations = iter;
    log.contraction = (iter > 1 && previous > 0.0) ? distance / previous : 0.0;
    log.distance = distance;
    previous = distance;
    current.swap(next);
    if (distance <= control_.tol * std::max(1.0, size)) {
      std::copy(current.begin(), current.end(), U_next.begin());
      return log;
    }
  }
  std::ostringstream msg;
  msg << "fixed point did not converge in " << control_.max_iter << " iterations at t = " << g.t(n)
      << " (last distance " << log.distance << "); reduce dt";
  fail(ErrorCode::kContractionFailure, msg.str());
}

GridFunction hnls_step(const GridFunction& u_n, const ProblemSpec& spec, const RegularizedNonlinearity& reg,
                       std::shared_ptr<const LiftingPair> lifting, double tol, int max_iter, int level,
                       StepLog* log) {
  const HalfLineGrid& grid = u_n.grid();
  StepControl control;
  control.tol = tol;
  control.max_iter = max_iter;
  const HnlsStepper stepper(spec, grid, reg, control, std::move(lifting));
  std::vector<Complex> U(grid.nodes()), next(grid.nodes());
  stepper.to_unknown(level, u_n.values(), U);
  const StepLog result = stepper.step(level, U, {}, next);
  if (log) *log = result;
  GridFunction out(grid);
  stepper.to_physical(level + 1, next, out.values());
  return out;
}

int HnlsSolution::max_iterations() const {
  int best = 0;
  for (const StepLog& l : logs) best = std::max(best, l.iterations);
  return best;
}

bool HnlsSolution::regularization_active() const {
  return std::any_of(logs.begin(), logs.end(), [](const StepLog& l) { return l.regularization_active; });
}

HnlsSolution solve_hnls(const ProblemSpec& spec, const HalfLineGrid& grid, const SolveOptions& options) {
  spec.validate();
  bool lift = false;
  switch (options.boundary) {
    case BoundaryMode::kAuto: lift = !spec.boundary.is_zero() && !spec.coeffs.is_linear(); break;
    case BoundaryMode::kLifting: lift = !spec.boundary.is_zero(); break;
    case BoundaryMode::kDirect: lift = false; break;
  }
  if (!lift && !spec.boundary.is_zero() && !spec.coeffs.is_linear()) {
    fail(ErrorCode::kConfigRejected, "nonlinear runs with boundary data must use the lifting");
  }
  std::shared_ptr<const LiftingPair> lifting;
  if (lift) lifting = std::make_shared<LiftingPair>(build_lifting(spec.boundary, grid, spec.coeffs, options.lambda0));

  const HnlsStepper stepper(spec, grid, RegularizedNonlinearity(options.h, spec.coeffs.p), options.control, lifting);
  HnlsSolution solution{FieldHistory(grid), {}, lifting};
  const int nodes = grid.nodes();

  GridFunction u0 = spec.initial_on(grid);
  if (!lift) u0[0] = spec.boundary(0.0);
  u0.require_finite();
  solution.u.push_back(u0.values());

  // Last three unknowns for the extrapolated starting guess.
  std::vector<std::vector<Complex>> recent;
  std::vector<Complex> U(nodes), next(nodes), guess(nodes), physical(nodes);
  stepper.to_unknown(0, u0.values(), U);
  recent.push_back(U);
  solution.logs.reserve(grid.steps());
  for (int n = 0; n < grid.steps(); ++n) {
    const std::size_t k = recent.size();
    for (int j = 0; j < nodes; ++j) {
      if (k >= 3) {
        guess[j] = 3.0 * recent[k - 1][j] - 3.0 * recent[k - 2][j] + recent[k - 3][j];
      } else if (k == 2) {
        guess[j] = 2.0 * recent[k - 1][j] - recent[k - 2][j];
      } else {
        guess[j] = recent[k - 1][j];
      }
    }
    solution.logs.push_back(stepper.step(n, recent.back(), guess, next));
    stepper.to_physical(n + 1, next, physical);
    for (const Complex& v : physical) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        fail(ErrorCode::kUnconvergedRun, "non-finite values at t = " + std::to_string(grid.t(n + 1)));
      }
    }
    if (options.tail_threshold > 0.0) enforce_tail_guard(physical, grid, options.tail_threshold, grid.t(n + 1));
    solution.u.push_back(physical);
    if (recent.size() == 3) recent.erase(recent.begin());
    recent.push_back(next);
  }
  return solution;
}

}  // namespace hnls

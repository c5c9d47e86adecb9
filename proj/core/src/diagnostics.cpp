#include "hnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hnls/boundary.hpp"
#include "hnls/error.hpp"
#include "hnls/fft.hpp"
#include "hnls/norms.hpp"
#include "hnls/stencils.hpp"

namespace hnls {

namespace {

double mass(std::span<const Complex> u, double dx) {
  std::vector<double> m(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) m[j] = std::norm(u[j]);
  return trapezoid(m, dx);
}

// Periodic samples: the rectangle rule is exact for the discrete Parseval sum.
double periodic_mass(std::span<const Complex> u, double dx) {
  double m = 0.0;
  for (const Complex& v : u) m += std::norm(v);
  return m * dx;
}

// Second-order derivative of a uniformly sampled series, one-sided at the ends.
std::vector<double> time_derivative(const std::vector<double>& v, double dt) {
  const std::size_t n = v.size();
  require(n >= 3, ErrorCode::kInsufficientData, "time derivative needs at least 3 levels");
  std::vector<double> d(n);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * dt);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
  return d;
}

}  // namespace

std::vector<double> l2_balance_residual(const FieldHistory& u, const ProblemSpec& spec,
                                        const RegularizedNonlinearity* reg) {
  const HalfLineGrid& g = u.grid();
  require(u.levels() >= 3, ErrorCode::kInsufficientData, "L2 balance needs at least 3 levels");
  const Coefficients& c = spec.coeffs;
  const double dx = g.dx();
  std::vector<double> masses(u.levels());
  for (int n = 0; n < u.levels(); ++n) masses[n] = mass(u.slice(n), dx);

  const auto g_value = [&](double theta) { return reg ? reg->value(theta) : std::pow(theta, c.p); };
  const auto g_star = [&](double s) {
    const double q = 0.5 * c.p + 1.0;
    return reg ? reg->primitive(s) : std::pow(s, q) / q;
  };

  std::vector<double> out;
  out.reserve(u.levels() - 2);
  std::vector<Complex> f(g.nodes());
  std::vector<double> work(g.nodes());
  for (int n = 1; n + 1 < u.levels(); ++n) {
    const auto un = u.slice(n);
    const double t = g.t(n);
    const Complex ux0 = boundary_derivative1<Complex>(un, dx);
    double flux = -std::norm(ux0);
    if (!spec.source.is_zero()) {
      spec.source.sample(t, g, f);
      for (int j = 0; j < g.nodes(); ++j) work[j] = (f[j] * std::conj(un[j])).imag();
      flux += 2.0 * trapezoid(work, dx);
    }
    if (!spec.boundary.is_zero()) {
      const Complex mu = spec.boundary(t);
      const Complex uxx0 = boundary_derivative2<Complex>(un, dx);
      flux += 2.0 * c.a * (ux0 * std::conj(mu)).imag() + c.b * std::norm(mu) + 2.0 * (uxx0 * std::conj(mu)).real();
      if (!c.is_linear()) {
        const double m2 = std::norm(mu);
        flux += 2.0 * (c.beta + c.gamma) * g_value(std::sqrt(m2)) * m2 - (c.beta + 2.0 * c.gamma) * g_star(m2);
      }
    }
    out.push_back((masses[n + 1] - masses[n - 1]) / (2.0 * g.dt()) - flux);
  }
  return out;
}

double fullline_l2_drift(const PeriodicBox& box, const Coefficients& coeffs, const ProfileFn& u0,
                         const std::vector<double>& times) {
  std::vector<Complex> initial(box.points);
  for (int j = 0; j < box.points; ++j) initial[j] = u0(box.x(j));
  const double m0 = periodic_mass(initial, box.spacing());
  require(m0 > 0.0, ErrorCode::kInvalidInput, "initial data has zero mass");
  double worst = 0.0;
  for (double t : times) {
    const auto u = fullline_solution(box, coeffs, u0, t);
    worst = std::max(worst, std::abs(periodic_mass(u, box.spacing()) - m0) / m0);
  }
  return worst;
}

EnergyFunctional::EnergyFunctional(const Coefficients& coeffs) : coeffs_(coeffs) {
  if (coeffs.beta + coeffs.gamma == 0.0) {
    fail(ErrorCode::kUndefinedFunctional, "energy functional needs beta + gamma != 0");
  }
}

Complex EnergyFunctional::evaluate(std::span<const Complex> u, double dx) const {
  const Coefficients& c = coeffs_;
  const auto ux = derivative1<Complex>(u, dx);
  const Complex mix = Complex(0.0, 1.0) / (c.beta + c.gamma) * (c.lambda - c.a * (3.0 * c.beta + 2.0 * c.gamma) / 3.0);
  const double power = 2.0 * (3.0 * c.beta + 2.0 * c.gamma) / (3.0 * (c.p + 2.0));
  std::vector<Complex> integrand(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    integrand[j] = std::norm(ux[j]) + mix * u[j] * std::conj(ux[j]) - power * std::pow(std::abs(u[j]), c.p + 2.0);
  }
  return trapezoid(std::span<const Complex>(integrand), dx);
}

double EnergyFunctional::gamma_term(std::span<const Complex> u, double dx) const {
  if (coeffs_.gamma == 0.0) return 0.0;
  std::vector<double> up(u.size()), u2(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    up[j] = std::pow(std::abs(u[j]), coeffs_.p);
    u2[j] = std::norm(u[j]);
  }
  const auto dup = derivative1<double>(up, dx);
  const auto d2u2 = derivative2<double>(u2, dx);
  for (std::size_t j = 0; j < u.size(); ++j) up[j] = dup[j] * d2u2[j];
  return coeffs_.gamma / 3.0 * trapezoid(up, dx);
}

EnergyIdentitySeries energy_identity_residual_nl(const FieldHistory& u, const Coefficients& coeffs) {
  const EnergyFunctional functional(coeffs);
  const HalfLineGrid& g = u.grid();
  require(u.levels() >= 3, ErrorCode::kInsufficientData, "energy identity needs at least 3 levels");
  EnergyIdentitySeries s;
  for (int n = 0; n < u.levels(); ++n) {
    const Complex e = functional.evaluate(u.slice(n), g.dx());
    s.t.push_back(g.t(n));
    s.energy.push_back(e.real());
    s.max_imaginary = std::max(s.max_imaginary, std::abs(e.imag()) / std::max(1.0, std::abs(e)));
    s.gamma_term.push_back(functional.gamma_term(u.slice(n), g.dx()));
  }
  s.dE_dt = time_derivative(s.energy, g.dt());
  s.residual.resize(s.dE_dt.size());
  for (std::size_t n = 0; n < s.residual.size(); ++n) s.residual[n] = s.dE_dt[n] - s.gamma_term[n];
  return s;
}

std::vector<TestFunction> default_test_family(double T, int time_modes, int space_modes) {
  require(T > 0.0 && time_modes >= 1 && space_modes >= 1, ErrorCode::kInvalidInput, "bad test family size");
  std::vector<TestFunction> family;
  for (int m = 0; m < time_modes; ++m) {
    for (int k = 0; k < space_modes; ++k) {
      const double omega = m * std::numbers::pi / T;
      const Complex c(-1.0, 0.5 * k);
      TestFunction phi;
      phi.name = "theta" + std::to_string(m) + "_kappa" + std::to_string(k);
      phi.value = [T, omega, c](double t, double x, int it, int jx) {
        // d^j/dx^j x^2 e^{cx} = e^{cx} (c^j x^2 + 2j c^{j-1} x + j(j-1) c^{j-2}).
        Complex space = std::pow(c, jx) * x * x;
        if (jx >= 1) space += 2.0 * jx * std::pow(c, jx - 1) * x;
        if (jx >= 2) space += static_cast<double>(jx * (jx - 1)) * std::pow(c, jx - 2);
        space *= std::exp(c * x);
        const double time = it == 0 ? (1.0 - t / T) * std::cos(omega * t)
                                    : -std::cos(omega * t) / T - (1.0 - t / T) * omega * std::sin(omega * t);
        return time * space;
      };
      family.push_back(std::move(phi));
    }
  }
  return family;
}

namespace {

void check_test_function(const TestFunction& phi, const HalfLineGrid& g) {
  require(static_cast<bool>(phi.value), ErrorCode::kInvalidTestFunction, "test function '" + phi.name + "' is empty");
  double scale = 0.0;
  double worst = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const double t = g.horizon() * k / 16.0;
    const double x = g.length() * k / 16.0;
    scale = std::max({scale, std::abs(phi.value(0.0, x, 0, 0)), std::abs(phi.value(t, 1.0, 0, 0))});
    worst = std::max({worst, std::abs(phi.value(g.horizon(), x, 0, 0)), std::abs(phi.value(t, 0.0, 0, 0)),
                      std::abs(phi.value(t, 0.0, 0, 1))});
  }
  if (worst > 1e-12 * std::max(1.0, scale)) {
    fail(ErrorCode::kInvalidTestFunction,
         "test function '" + phi.name + "' must vanish at t = T and with its x-derivative at x = 0");
  }
}

}  // namespace

std::vector<double> weak_form_residual(const FieldHistory& u, const ProblemSpec& spec,
                                       const std::vector<TestFunction>& family) {
  const HalfLineGrid& g = u.grid();
  require(u.complete(), ErrorCode::kInsufficientData, "weak form needs the full history");
  for (const auto& phi : family) check_test_function(phi, g);
  const Coefficients& c = spec.coeffs;
  const Complex i(0.0, 1.0);
  const int nodes = g.nodes();
  const double dx = g.dx();

  std::vector<double> out;
  std::vector<Complex> f(nodes), integrand(nodes), trace(u.levels()), level(u.levels());
  for (const auto& phi : family) {
    for (int n = 0; n < u.levels(); ++n) {
      const double t = g.t(n);
      const auto un = u.slice(n);
      const auto ux = derivative1<Complex>(un, dx);
      spec.source.sample(t, g, f);
      for (int j = 0; j < nodes; ++j) {
        const double x = g.x(j);
        const Complex p0 = phi.value(t, x, 0, 0);
        const Complex p1 = phi.value(t, x, 0, 1);
        const Complex p2 = phi.value(t, x, 0, 2);
        const Complex p3 = phi.value(t, x, 0, 3);
        const Complex pt = phi.value(t, x, 1, 0);
        Complex v = un[j] * (i * pt - c.a * p2 + i * c.b * p1 + i * p3) + f[j] * p0;
        if (!c.is_linear()) {
          const double gp = std::pow(std::abs(un[j]), c.p);
          v += -c.lambda * gp * un[j] * p0 + i * c.beta * gp * un[j] * p1 +
               i * c.gamma * gp * (ux[j] * p0 + un[j] * p1);
        }
        integrand[j] = v;
      }
      level[n] = trapezoid(std::span<const Complex>(integrand), dx);
      trace[n] = spec.boundary(t) * phi.value(t, 0.0, 0, 2);
    }
    Complex total = trapezoid(std::span<const Complex>(level), g.dt()) + i * trapezoid(std::span<const Complex>(trace), g.dt());
    const auto u0 = u.slice(0);
    for (int j = 0; j < nodes; ++j) integrand[j] = u0[j] * phi.value(0.0, g.x(j), 0, 0);
    total += i * trapezoid(std::span<const Complex>(integrand), dx);
    out.push_back(std::abs(total));
  }
  return out;
}

std::vector<ProbeFn> damped_wave_family(int count, std::uint64_t seed) {
  require(count >= 0, ErrorCode::kInvalidInput, "negative family size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amplitude(0.5, 2.0), decay(1.0, 3.0), omega(0.0, 10.0),
      phase(0.0, 2.0 * std::numbers::pi);
  std::vector<ProbeFn> family;
  for (int k = 0; k < count; ++k) {
    const double a = amplitude(rng), d = decay(rng), w = omega(rng), ph = phase(rng);
    family.push_back([a, d, w, ph](double x, int order) -> Complex {
      const double e = a * std::exp(-d * x);
      if (order == 0) return e * std::cos(w * x + ph);
      return -e * (d * std::cos(w * x + ph) + w * std::sin(w * x + ph));
    });
  }
  return family;
}

InterpolationProbe interpolation_probe(const std::vector<ProbeFn>& phi, const WeightSpec& psi1,
                                       const WeightSpec& psi2, double q, double x_max, int points) {
  require(q >= 2.0, ErrorCode::kInvalidInput, "q must lie in [2, infinity]");
  require(x_max > 0.0 && points >= 3, ErrorCode::kInvalidInput, "bad probe grid");
  const bool infinite = std::isinf(q);
  InterpolationProbe probe;
  probe.s = infinite ? 0.25 : 0.25 - 0.5 / q;
  const double s = probe.s;
  const double dx = x_max / (points - 1);
  std::vector<double> w1(points), w2(points);
  for (int k = 0; k < points; ++k) {
    w1[k] = psi1(k * dx);
    w2[k] = psi2(k * dx);
  }
  std::vector<double> lhs_terms(points), a_terms(points), b_terms(points);
  for (const auto& fn : phi) {
    double sup = 0.0;
    for (int k = 0; k < points; ++k) {
      const double x = k * dx;
      const double v = std::abs(fn(x, 0));
      const double dv = std::abs(fn(x, 1));
      const double weighted = v * std::pow(w1[k], s) * std::pow(w2[k], 0.5 - s);
      sup = std::max(sup, weighted);
      if (!infinite) lhs_terms[k] = std::pow(weighted, q);
      a_terms[k] = (dv + v) * (dv + v) * w1[k];
      b_terms[k] = v * v * w2[k];
    }
    const double lhs = infinite ? sup : std::pow(trapezoid(lhs_terms, dx), 1.0 / q);
    const double a = std::sqrt(trapezoid(a_terms, dx));
    const double b = std::sqrt(trapezoid(b_terms, dx));
    const double rhs = std::pow(a, 2.0 * s) * std::pow(b, 1.0 - 2.0 * s);
    double ratio = 0.0;
    if (lhs > 0.0) {
      if (!(rhs > 0.0)) fail(ErrorCode::kNumericalDegeneracy, "interpolation right side vanishes");
      ratio = lhs / rhs;
    }
    probe.ratios.push_back(ratio);
    probe.max_ratio = std::max(probe.max_ratio, ratio);
  }
  return probe;
}

double x_norm(const FieldHistory& u, const WeightSpec& psi) {
  const HalfLineGrid& g = u.grid();
  std::vector<double> weight(g.nodes()), terms(g.nodes()), levels(u.levels());
  for (int j = 0; j < g.nodes(); ++j) weight[j] = psi.d1(g.x(j));
  double sup = 0.0;
  for (int n = 0; n < u.levels(); ++n) {
    sup = std::max(sup, weighted_l2_norm(u.slice(n), g, psi));
    const auto ux = derivative1<Complex>(u.slice(n), g.dx());
    for (int j = 0; j < g.nodes(); ++j) terms[j] = std::norm(ux[j]) * weight[j];
    levels[n] = trapezoid(terms, g.dx());
  }
  return sup + std::sqrt(u.levels() > 1 ? trapezoid(levels, g.dt()) : 0.0);
}

double h13_norm(const BoundarySignal& mu, const HalfLineGrid& grid) {
  if (mu.is_zero()) return 0.0;
  const TimeWindow window = lifting_window(grid);
  std::vector<Complex> v(window.samples);
  for (int k = 0; k < window.samples; ++k) v[k] = window.taper(k) * mu(window.t(k));
  const Fft fft(window.samples);
  fft.forward(v, v);
  const auto lambda = window.frequencies();
  double sum = 0.0;
  for (int k = 0; k < window.samples; ++k) sum += std::cbrt(1.0 + lambda[k] * lambda[k]) * std::norm(v[k]);
  return std::sqrt(sum * window.spacing / window.samples);
}

double l1_l2_norm(const Source& f, const HalfLineGrid& grid, const WeightSpec& psi) {
  if (f.is_zero()) return 0.0;
  std::vector<Complex> slice(grid.nodes());
  std::vector<double> levels(grid.steps() + 1);
  for (int n = 0; n <= grid.steps(); ++n) {
    f.sample(grid.t(n), grid, slice);
    levels[n] = weighted_l2_norm(slice, grid, psi);
  }
  return trapezoid(levels, grid.dt());
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kInitial: return "u0";
    case PerturbationKind::kBoundary: return "mu";
    case PerturbationKind::kSource: return "f";
  }
  return "?";
}

Perturbation Perturbation::initial_shape(ProfileFn shape) {
  Perturbation p;
  p.kind = PerturbationKind::kInitial;
  p.initial = std::move(shape);
  return p;
}

Perturbation Perturbation::boundary_shape(BoundarySignal shape) {
  Perturbation p;
  p.kind = PerturbationKind::kBoundary;
  p.boundary = std::move(shape);
  return p;
}

Perturbation Perturbation::source_shape(Source shape) {
  Perturbation p;
  p.kind = PerturbationKind::kSource;
  p.source = std::move(shape);
  return p;
}

namespace {

HnlsSolution solve_or_reject(const ProblemSpec& spec, const HalfLineGrid& grid, const SolveOptions& options) {
  try {
    return solve_hnls(spec, grid, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigRejected) throw;
    fail(ErrorCode::kUnconvergedRun, std::string("perturbation run failed: ") + e.what());
  }
}

}  // namespace

PerturbationExperiment continuous_dependence_experiment(const ProblemSpec& base, const HalfLineGrid& grid,
                                                        const std::vector<Perturbation>& perturbations,
                                                        const WeightSpec& psi, const std::vector<double>& eps,
                                                        const SolveOptions& options) {
  const double p = base.coeffs.p;
  if (p < 1.0 || p > 2.0) {
    fail(ErrorCode::kConfigRejected, "continuous dependence requires p in [1, 2] (the regime where uniqueness holds)");
  }
  const auto samples = log_spaced_samples(grid.length(), 64);
  const UniquenessReport uniq = check_uniqueness_condition(psi, p, samples, 1e-12);
  if (!uniq.ok) {
    fail(ErrorCode::kConfigRejected, "weight " + psi.code() + " violates (psi')^(p+2) psi^(p-2) >= c0 > 0");
  }

  const HnlsSolution reference = solve_or_reject(base, grid, options);

  struct Job {
    std::size_t kind_index;
    double eps;
    std::future<HnlsSolution> result;
    double data_distance;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < perturbations.size(); ++k) {
    const Perturbation& pert = perturbations[k];
    for (double e : eps) {
      ProblemSpec spec = base;
      double distance = 0.0;
      switch (pert.kind) {
        case PerturbationKind::kInitial: {
          require(static_cast<bool>(pert.initial), ErrorCode::kInvalidInput, "empty initial perturbation");
          spec.initial = [u0 = base.initial, shape = pert.initial, e](double x) { return u0(x) + e * shape(x); };
          const GridFunction delta(grid, pert.initial);
          distance = e * weighted_l2_norm(delta, psi);
          break;
        }
        case PerturbationKind::kBoundary:
          spec.boundary = base.boundary.plus(pert.boundary, e);
          distance = e * h13_norm(pert.boundary, grid);
          break;
        case PerturbationKind::kSource:
          spec.source = base.source.plus(pert.source, e);
          distance = e * l1_l2_norm(pert.source, grid, psi);
          break;
      }
      spec.validate();
      jobs.push_back({k, e, std::async(std::launch::async, solve_or_reject, spec, grid, options), distance});
    }
  }

  PerturbationExperiment experiment;
  std::vector<double> lo(perturbations.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(perturbations.size(), 0.0);
  for (Job& job : jobs) {
    const HnlsSolution solution = job.result.get();
    FieldHistory diff(grid);
    std::vector<Complex> slice(grid.nodes());
    for (int n = 0; n < solution.u.levels(); ++n) {
      const auto a = solution.u.slice(n);
      const auto b = reference.u.slice(n);
      for (int j = 0; j < grid.nodes(); ++j) slice[j] = a[j] - b[j];
      diff.push_back(slice);
    }
    PerturbationRow row{perturbations[job.kind_index].kind, job.eps, job.data_distance, x_norm(diff, psi), 0.0};
    if (row.data_distance > 0.0) {
      row.ratio = row.solution_distance / row.data_distance;
      lo[job.kind_index] = std::min(lo[job.kind_index], row.ratio);
      hi[job.kind_index] = std::max(hi[job.kind_index], row.ratio);
    }
    experiment.rows.push_back(row);
  }
  for (std::size_t k = 0; k < perturbations.size(); ++k) {
    experiment.spread.push_back(hi[k] > 0.0 && lo[k] > 0.0 ? hi[k] / lo[k] : 0.0);
  }
  return experiment;
}

}  // namespace hnls

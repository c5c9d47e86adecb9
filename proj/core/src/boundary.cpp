#include "hnls/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hnls/cutoff.hpp"
#include "hnls/error.hpp"
#include "hnls/fft.hpp"

namespace hnls {

namespace {

Complex cubic(Complex r, double lambda, double a, double b) {
  return ((r - Complex(0.0, a)) * r + b) * r + Complex(0.0, lambda);
}

Complex cubic_prime(Complex r, double a, double b) { return 3.0 * r * r - Complex(0.0, 2.0 * a) * r + b; }

}  // namespace

std::array<Complex, 3> characteristic_roots(double lambda, double a, double b) {
  const Complex c2(0.0, -a);
  const Complex c1(b, 0.0);
  const Complex c0(0.0, lambda);
  const Complex p = c1 - c2 * c2 / 3.0;
  const Complex q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const Complex d = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const Complex plus = -q / 2.0 + d;
  const Complex minus = -q / 2.0 - d;
  const Complex c = std::abs(plus) >= std::abs(minus) ? plus : minus;
  const Complex s = std::abs(c) == 0.0 ? Complex{} : std::pow(c, 1.0 / 3.0);
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

  std::array<Complex, 3> roots;
  Complex rot = 1.0;
  for (int k = 0; k < 3; ++k) {
    const Complex sk = s * rot;
    const Complex y = std::abs(sk) == 0.0 ? Complex{} : sk - p / (3.0 * sk);
    Complex r = y - c2 / 3.0;
    for (int iter = 0; iter < 4; ++iter) {
      const Complex slope = cubic_prime(r, a, b);
      if (std::abs(slope) == 0.0) break;
      const Complex step = cubic(r, lambda, a, b) / slope;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
    }
    roots[k] = r;
    rot *= omega;
  }
  return roots;
}

CharacteristicRoot find_root(double lambda, double a, double b) {
  require(lambda != 0.0 && std::isfinite(lambda), ErrorCode::kInvalidInput, "find_root needs lambda != 0");
  const auto roots = characteristic_roots(lambda, a, b);
  int negatives = 0;
  Complex chosen;
  for (const Complex& r : roots) {
    const double tol = 1e-9 * std::max(1.0, std::abs(r));
    if (r.real() < -tol) {
      ++negatives;
      chosen = r;
    }
  }
  if (negatives != 1) {
    std::ostringstream msg;
    msg << "cubic has " << negatives << " roots with negative real part at lambda = " << lambda;
    fail(ErrorCode::kBelowCutoff, msg.str());
  }
  return {lambda, chosen, std::abs(cubic(chosen, lambda, a, b))};
}

Lambda0Calibration calibrate_lambda0(double a, double b) {
  constexpr int kPerDecade = 64;
  constexpr int kDecades = 8;
  const int count = kPerDecade * kDecades + 1;
  std::vector<bool> ok(count);
  std::vector<double> margin(count, 0.0);
  for (int i = 0; i < count; ++i) {
    const double mag = std::pow(10.0, static_cast<double>(i) / kPerDecade);
    bool good = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0}) {
      try {
        const CharacteristicRoot root = find_root(sign * mag, a, b);
        good = good && root.residual <= 1e-12 * std::max(1.0, mag);
        worst = std::min(worst, -root.r0.real() / (2.0 * std::cbrt(mag)));
      } catch (const Error&) {
        good = false;
      }
    }
    ok[i] = good;
    margin[i] = worst;
  }
  if (!ok.back()) fail(ErrorCode::kCalibrationFailed, "no unique decaying root even at |lambda| = 1e8");
  int first = count - 1;
  while (first > 0 && ok[first - 1]) --first;
  Lambda0Calibration cal{a, b, std::pow(10.0, static_cast<double>(first) / kPerDecade), 0.0};
  double eps = std::numeric_limits<double>::infinity();
  for (int i = first; i < count; ++i) eps = std::min(eps, margin[i]);
  require(eps > 0.0, ErrorCode::kCalibrationFailed, "non-positive decay margin");
  // Safety factor for lambda between grid points.
  cal.eps = 0.99 * eps;
  return cal;
}

double TimeWindow::taper(int k) const {
  const double u = static_cast<double>(k) / samples;
  if (u < 0.1) return eta(u / 0.1);
  if (u > 0.9) return eta((1.0 - u) / 0.1);
  return 1.0;
}

std::vector<double> TimeWindow::frequencies() const { return fft_frequencies(samples, spacing); }

TimeWindow lifting_window(const HalfLineGrid& grid) {
  const int m = grid.steps();
  TimeWindow w;
  w.spacing = 0.5 * grid.dt();
  w.origin = 3 * m;
  w.start = -w.origin * w.spacing;
  w.samples = 8 * m;
  return w;
}

namespace {

std::vector<Complex> sample_on_window(const BoundarySignal& mu, const TimeWindow& window) {
  std::vector<Complex> out(window.samples);
  for (int k = 0; k < window.samples; ++k) out[k] = window.taper(k) * mu(window.t(k));
  return out;
}

}  // namespace

FrequencySplit split_frequencies(const BoundarySignal& mu, const HalfLineGrid& grid, double lambda0) {
  require(lambda0 > 0.0, ErrorCode::kInvalidInput, "lambda0 must be positive");
  FrequencySplit split;
  split.lambda0 = lambda0;
  split.window = lifting_window(grid);
  split.lambda = split.window.frequencies();
  const int n = split.window.samples;
  const Fft fft(n);
  const auto hat = fft.forward(sample_on_window(mu, split.window));
  split.mu0_hat.assign(n, Complex{});
  split.mu1_hat.assign(n, Complex{});
  std::vector<Complex> derivative_hat(n);
  for (int k = 0; k < n; ++k) {
    if (std::abs(split.lambda[k]) < lambda0) {
      split.mu0_hat[k] = hat[k];
      derivative_hat[k] = Complex(0.0, split.lambda[k]) * hat[k];
    } else {
      split.mu1_hat[k] = hat[k];
    }
  }
  split.mu0 = fft.inverse(split.mu0_hat);
  split.mu1 = fft.inverse(split.mu1_hat);
  split.mu0_t = fft.inverse(derivative_hat);
  return split;
}

JPlusField::JPlusField(int half_steps, int support_nodes) : half_steps_(half_steps), support_nodes_(support_nodes) {
  for (auto& d : data_) d.assign(static_cast<std::size_t>(half_steps) * support_nodes, Complex{});
}

int lifting_support_nodes(const HalfLineGrid& grid) {
  require(grid.length() >= 2.0, ErrorCode::kDomainTooShort, "lifting needs L >= 2");
  int count = 0;
  while (count < grid.nodes() && grid.x(count) < 2.0 - 1e-12) ++count;
  return count;
}

JPlusField synthesize_J_plus(std::span<const Complex> mu1_hat, const TimeWindow& window, const HalfLineGrid& grid,
                             const Coefficients& coeffs, double lambda0) {
  const int n = window.samples;
  require(static_cast<int>(mu1_hat.size()) == n, ErrorCode::kInvalidInput, "spectrum/window size mismatch");
  const auto lambda = window.frequencies();
  std::vector<Complex> r0(n);
  for (int k = 0; k < n; ++k) {
    if (mu1_hat[k] == Complex{}) continue;
    if (std::abs(lambda[k]) < lambda0) {
      fail(ErrorCode::kSplittingViolation, "mu1 spectrum has a nonzero bin below lambda0");
    }
    r0[k] = find_root(lambda[k], coeffs.a, coeffs.b).r0;
  }

  const int half_steps = 2 * grid.steps() + 1;
  const int support = lifting_support_nodes(grid);
  JPlusField field(half_steps, support);
  const Fft fft(n);
  std::vector<Complex> spectrum(n);
  std::vector<Complex> time(n);
  std::vector<Complex> base(n);
  for (int j = 0; j < support; ++j) {
    const double x = grid.x(j);
    for (int k = 0; k < n; ++k) base[k] = mu1_hat[k] == Complex{} ? Complex{} : mu1_hat[k] * std::exp(r0[k] * x);
    for (int c = 0; c <= JPlusField::kT; ++c) {
      for (int k = 0; k < n; ++k) {
        if (c == JPlusField::kValue) {
          spectrum[k] = base[k];
        } else if (c == JPlusField::kT) {
          spectrum[k] = Complex(0.0, lambda[k]) * base[k];
        } else {
          spectrum[k] = r0[k] * spectrum[k];  // previous component times r0
        }
      }
      fft.inverse(spectrum, time);
      for (int m = 0; m < half_steps; ++m) field.at(m, j, static_cast<JPlusField::Component>(c)) = time[window.origin + m];
    }
  }
  return field;
}

namespace {

// Exact J+ for a finite mode list (no window, no transform).
JPlusField synthesize_modes(const std::vector<BoundarySignal::Mode>& modes, const HalfLineGrid& grid,
                            const Coefficients& coeffs) {
  const int half_steps = 2 * grid.steps() + 1;
  const int support = lifting_support_nodes(grid);
  JPlusField field(half_steps, support);
  for (const auto& mode : modes) {
    if (mode.amplitude == Complex{}) continue;
    const Complex r0 = find_root(mode.frequency, coeffs.a, coeffs.b).r0;
    for (int j = 0; j < support; ++j) {
      const Complex spatial = mode.amplitude * std::exp(r0 * grid.x(j));
      for (int m = 0; m < half_steps; ++m) {
        const Complex v = spatial * std::exp(Complex(0.0, mode.frequency * 0.5 * m * grid.dt()));
        Complex d = v;
        field.at(m, j, JPlusField::kValue) += v;
        for (int c = JPlusField::kX; c <= JPlusField::kXXX; ++c) {
          d *= r0;
          field.at(m, j, static_cast<JPlusField::Component>(c)) += d;
        }
        field.at(m, j, JPlusField::kT) += Complex(0.0, mode.frequency) * v;
      }
    }
  }
  return field;
}

}  // namespace

JPlusField build_J_plus(const BoundarySignal& mu1, const HalfLineGrid& grid, const Coefficients& coeffs,
                        double lambda0) {
  if (const auto modes = mu1.mode_decomposition()) {
    for (const auto& mode : *modes) {
      if (mode.amplitude != Complex{} && std::abs(mode.frequency) < lambda0) {
        std::ostringstream msg;
        msg << "mu1 carries frequency " << mode.frequency << " below lambda0 = " << lambda0;
        fail(ErrorCode::kSplittingViolation, msg.str());
      }
    }
    return synthesize_modes(*modes, grid, coeffs);
  }
  // General signal: window transform. The low bins are dropped; what they
  // contribute on [0, T] is the splitting error.
  const TimeWindow window = lifting_window(grid);
  const Fft fft(window.samples);
  auto hat = fft.forward(sample_on_window(mu1, window));
  const auto lambda = window.frequencies();
  std::vector<Complex> low(window.samples);
  for (int k = 0; k < window.samples; ++k) {
    if (std::abs(lambda[k]) < lambda0) {
      low[k] = hat[k];
      hat[k] = 0.0;
    }
  }
  const auto dropped = fft.inverse(low);
  double scale = 1.0;
  double leak = 0.0;
  for (int m = 0; m <= 2 * grid.steps(); ++m) {
    scale = std::max(scale, std::abs(mu1(0.5 * m * grid.dt())));
    leak = std::max(leak, std::abs(dropped[window.origin + m]));
  }
  if (leak > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "mu1 spectrum below lambda0 = " << lambda0 << " contributes " << leak << " on [0, T]";
    fail(ErrorCode::kSplittingViolation, msg.str());
  }
  return synthesize_J_plus(hat, window, grid, coeffs, lambda0);
}

LiftingPair::LiftingPair(const HalfLineGrid& grid, double lambda0)
    : grid_(grid),
      lambda0_(lambda0),
      half_steps_(2 * grid.steps() + 1),
      support_nodes_(lifting_support_nodes(grid)),
      psi_(static_cast<std::size_t>(half_steps_) * support_nodes_),
      source_(psi_.size()) {}

std::span<const Complex> LiftingPair::psi(int m) const {
  return std::span<const Complex>(psi_).subspan(static_cast<std::size_t>(m) * support_nodes_, support_nodes_);
}
std::span<const Complex> LiftingPair::source(int m) const {
  return std::span<const Complex>(source_).subspan(static_cast<std::size_t>(m) * support_nodes_, support_nodes_);
}
std::span<Complex> LiftingPair::psi(int m) {
  return std::span<Complex>(psi_).subspan(static_cast<std::size_t>(m) * support_nodes_, support_nodes_);
}
std::span<Complex> LiftingPair::source(int m) {
  return std::span<Complex>(source_).subspan(static_cast<std::size_t>(m) * support_nodes_, support_nodes_);
}

namespace {

FieldHistory expand(const HalfLineGrid& grid, int support, const std::vector<Complex>& data) {
  FieldHistory history(grid);
  std::vector<Complex> slice(grid.nodes());
  for (int n = 0; n <= grid.steps(); ++n) {
    const auto* begin = data.data() + static_cast<std::size_t>(2 * n) * support;
    std::copy(begin, begin + support, slice.begin());
    history.push_back(slice);
  }
  return history;
}

}  // namespace

FieldHistory LiftingPair::psi_history() const { return expand(grid_, support_nodes_, psi_); }
FieldHistory LiftingPair::source_history() const { return expand(grid_, support_nodes_, source_); }

LiftingPair build_lifting(const BoundarySignal& mu, const HalfLineGrid& grid, const Coefficients& coeffs,
                          std::optional<double> lambda0) {
  const double cutoff = lambda0 ? *lambda0 : calibrate_lambda0(coeffs.a, coeffs.b).lambda0;
  LiftingPair pair(grid, cutoff);
  if (mu.is_zero()) return pair;

  // Low part mu0 and its rate at half steps, plus J+ of the high part.
  const int half_steps = pair.half_steps();
  std::vector<Complex> mu0(half_steps), mu0_t(half_steps);
  std::optional<JPlusField> built;
  if (const auto modes = mu.mode_decomposition()) {
    std::vector<BoundarySignal::Mode> high;
    for (const auto& mode : *modes) {
      if (std::abs(mode.frequency) >= cutoff) {
        high.push_back(mode);
        continue;
      }
      for (int m = 0; m < half_steps; ++m) {
        const Complex v = mode.amplitude * std::exp(Complex(0.0, mode.frequency * 0.5 * m * grid.dt()));
        mu0[m] += v;
        mu0_t[m] += Complex(0.0, mode.frequency) * v;
      }
    }
    built.emplace(synthesize_modes(high, grid, coeffs));
  } else {
    const FrequencySplit split = split_frequencies(mu, grid, cutoff);
    for (int m = 0; m < half_steps; ++m) {
      mu0[m] = split.mu0[split.window.origin + m];
      mu0_t[m] = split.mu0_t[split.window.origin + m];
    }
    built.emplace(synthesize_J_plus(split.mu1_hat, split.window, grid, coeffs, cutoff));
  }
  const JPlusField& j_plus = *built;
  const int support = pair.support_nodes();

  // e(x) = eta(2 - x) and its x-derivatives.
  std::vector<std::array<double, 4>> e(support);
  for (int j = 0; j < support; ++j) {
    const double s = 2.0 - grid.x(j);
    e[j] = {eta(s), -eta_derivative(s, 1), eta_derivative(s, 2), -eta_derivative(s, 3)};
  }
  const Complex i(0.0, 1.0);
  double mu_scale = 1.0;
  double worst_trace = 0.0;
  for (int m = 0; m < pair.half_steps(); ++m) {
    auto psi = pair.psi(m);
    auto f0 = pair.source(m);
    for (int j = 0; j < support; ++j) {
      using C = JPlusField;
      const Complex g = mu0[m] + j_plus(m, j, C::kValue);
      const Complex g1 = j_plus(m, j, C::kX);
      const Complex g2 = j_plus(m, j, C::kXX);
      const Complex g3 = j_plus(m, j, C::kXXX);
      const Complex gt = mu0_t[m] + j_plus(m, j, C::kT);
      const auto& w = e[j];
      psi[j] = g * w[0];
      const Complex psi_t = gt * w[0];
      const Complex psi_x = g1 * w[0] + g * w[1];
      const Complex psi_xx = g2 * w[0] + 2.0 * g1 * w[1] + g * w[2];
      const Complex psi_xxx = g3 * w[0] + 3.0 * g2 * w[1] + 3.0 * g1 * w[2] + g * w[3];
      f0[j] = i * psi_t + coeffs.a * psi_xx + i * coeffs.b * psi_x + i * psi_xxx;
    }
    const Complex target = mu(0.5 * m * grid.dt());
    mu_scale = std::max(mu_scale, std::abs(target));
    worst_trace = std::max(worst_trace, std::abs(psi[0] - target));
  }
  if (worst_trace > 1e-8 * mu_scale) {
    std::ostringstream msg;
    msg << "lifting trace misses mu by " << worst_trace;
    fail(ErrorCode::kSplittingViolation, msg.str());
  }
  return pair;
}

}  // namespace hnls

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hnls/grid.hpp"

namespace hnls {

/// Real coefficients of
///   i u_t + a u_xx + i b u_x + i u_xxx + lambda |u|^p u
///     + i beta (|u|^p u)_x + i gamma (|u|^p)_x u = f.
struct Coefficients {
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double p = 1.0;

  bool is_linear() const { return lambda == 0.0 && beta == 0.0 && gamma == 0.0; }
};

/// Boundary data mu(t). Immutable; copies share the underlying evaluator.
class BoundarySignal {
 public:
  struct Mode {
    Complex amplitude;
    double frequency;
  };

  /// mu == 0.
  BoundarySignal();
  static BoundarySignal zero() { return {}; }
  /// mu(t) = sum_k A_k exp(i w_k t); analytic derivatives.
  static BoundarySignal modes(std::vector<Mode> modes);
  /// Arbitrary smooth function; derivatives by finite differences unless
  /// `derivative(t, order)` is supplied.
  static BoundarySignal function(std::function<Complex(double)> value,
                                 std::function<Complex(double, int)> derivative = {});
  /// Uniform samples starting at t = 0, linearly interpolated. Outside the
  /// sampled range the signal is continued by odd reflection about the end
  /// values, which keeps the extension C^1 for smooth data.
  static BoundarySignal samples(double spacing, std::vector<Complex> values);

  bool is_zero() const { return kind_ == Kind::kZero; }
  Complex operator()(double t) const;
  Complex derivative(double t, int order) const;

  BoundarySignal plus(const BoundarySignal& other, double scale = 1.0) const;
  std::string describe() const;

  /// Exact mode list when the signal is a (scaled sum of) mode signal(s).
  std::optional<std::vector<Mode>> mode_decomposition() const;

 private:
  enum class Kind { kZero, kModes, kFunction, kSamples, kSum };
  struct Impl;

  Kind kind_ = Kind::kZero;
  std::shared_ptr<const Impl> impl_;
};

/// Space-time source f(t, x). The default instance is identically zero.
class Source {
 public:
  Source() = default;
  explicit Source(FieldFn fn) : fn_(std::move(fn)) {}

  bool is_zero() const { return !fn_; }
  Complex operator()(double t, double x) const { return fn_ ? fn_(t, x) : Complex{}; }
  void sample(double t, const HalfLineGrid& grid, std::span<Complex> out) const;
  Source plus(const Source& other, double scale = 1.0) const;

 private:
  FieldFn fn_;
};

/// Complete data of one initial-boundary value problem on the half-line.
struct ProblemSpec {
  Coefficients coeffs;
  ProfileFn initial = [](double) { return Complex{}; };
  BoundarySignal boundary;
  Source source;

  GridFunction initial_on(const HalfLineGrid& grid) const { return GridFunction(grid, initial); }

  /// Throws config-rejected when the coefficients leave the supported regime:
  /// p >= 1 always, and nonzero boundary data only with p = 1, gamma = 0.
  void validate() const;
};

}  // namespace hnls

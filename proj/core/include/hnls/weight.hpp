#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hnls {

/// A smooth positive weight psi on [0, inf) with analytic derivatives up to
/// third order, used to build weighted L2 classes.
///
/// Shipped kinds and their string codes:
///   exp:ALPHA  psi = exp(2 ALPHA x)
///   pow:ALPHA  psi = (1 + x)^(2 ALPHA)
///   arctan     psi = 1 + (2/pi) atan(x)
///   one        psi = 1
/// A custom weight carries caller-supplied evaluators and declared constants.
class WeightSpec {
 public:
  enum class Kind { kExponential, kPower, kArctan, kOne, kCustom };
  using Derivatives = std::function<double(double x, int order)>;

  static WeightSpec exponential(double alpha);
  static WeightSpec power(double alpha);
  static WeightSpec arctan();
  static WeightSpec one();
  /// `derivative(x, j)` must return psi^(j)(x) for j = 0..3. `constants` holds
  /// the declared c(1), c(2), c(3).
  static WeightSpec custom(std::string name, Derivatives derivative, std::array<double, 3> constants);

  /// Parses "exp:ALPHA", "pow:ALPHA", "arctan" or "one".
  static WeightSpec parse(const std::string& code);
  std::string code() const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  double operator()(double x) const { return derivative(x, 0); }
  double derivative(double x, int order) const;
  double d1(double x) const { return derivative(x, 1); }
  double d3(double x) const { return derivative(x, 3); }

  /// Declared admissibility constant c(j), j in {1, 2, 3}.
  double constant(int order) const;

 private:
  WeightSpec(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_ = 0.0;
  std::string name_;
  Derivatives custom_;
  std::array<double, 3> custom_constants_{};
};

struct AdmissibilityReport {
  bool ok = true;
  std::vector<int> orders;
  /// Observed max |psi^(j)| / psi per requested order.
  std::vector<double> constants;
};

/// Compares max_x |psi^(j)(x)| / psi(x) against the declared c(j). Throws
/// not-a-weight if psi <= 0 at any sample.
AdmissibilityReport check_admissible(const WeightSpec& w, std::span<const int> orders,
                                     std::span<const double> x_samples);

struct UniquenessReport {
  bool ok = false;
  double inf_value = 0.0;
};

/// Evaluates (psi')^(p+2) psi^(p-2) on the samples; ok iff its infimum is at
/// least `c0`. Requires p in [1, 2].
UniquenessReport check_uniqueness_condition(const WeightSpec& w, double p, std::span<const double> x_samples,
                                            double c0);

/// Log-spaced sample set on [0, x_max] (always includes 0).
std::vector<double> log_spaced_samples(double x_max, int count);

}  // namespace hnls

#include "hnls/weight.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hnls/error.hpp"

namespace hnls {

namespace {

double parse_alpha(const std::string& text, const std::string& code) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  require(ec == std::errc() && ptr == last && std::isfinite(value), ErrorCode::kInvalidInput,
          "malformed weight code '" + code + "'");
  return value;
}

std::string format_alpha(double alpha) {
  std::ostringstream out;
  out.precision(17);
  out << alpha;
  return out.str();
}

}  // namespace

WeightSpec WeightSpec::exponential(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::kInvalidInput, "exp weight needs alpha > 0");
  return WeightSpec(Kind::kExponential, alpha);
}

WeightSpec WeightSpec::power(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::kInvalidInput, "pow weight needs alpha > 0");
  return WeightSpec(Kind::kPower, alpha);
}

WeightSpec WeightSpec::arctan() { return WeightSpec(Kind::kArctan, 0.0); }

WeightSpec WeightSpec::one() { return WeightSpec(Kind::kOne, 0.0); }

WeightSpec WeightSpec::custom(std::string name, Derivatives derivative, std::array<double, 3> constants) {
  require(static_cast<bool>(derivative), ErrorCode::kInvalidInput, "custom weight needs an evaluator");
  WeightSpec w(Kind::kCustom, 0.0);
  w.name_ = std::move(name);
  w.custom_ = std::move(derivative);
  w.custom_constants_ = constants;
  return w;
}

WeightSpec WeightSpec::parse(const std::string& code) {
  if (code == "one") return one();
  if (code == "arctan") return arctan();
  const auto colon = code.find(':');
  require(colon != std::string::npos, ErrorCode::kInvalidInput, "unknown weight code '" + code + "'");
  const std::string head = code.substr(0, colon);
  const double alpha = parse_alpha(code.substr(colon + 1), code);
  if (head == "exp") return exponential(alpha);
  if (head == "pow") return power(alpha);
  fail(ErrorCode::kInvalidInput, "unknown weight code '" + code + "'");
}

std::string WeightSpec::code() const {
  switch (kind_) {
    case Kind::kExponential: return "exp:" + format_alpha(alpha_);
    case Kind::kPower: return "pow:" + format_alpha(alpha_);
    case Kind::kArctan: return "arctan";
    case Kind::kOne: return "one";
    case Kind::kCustom: return "custom:" + name_;
  }
  return "unknown";
}

double WeightSpec::derivative(double x, int order) const {
  require(order >= 0 && order <= 3, ErrorCode::kInvalidInput, "weight derivatives are available up to order 3");
  switch (kind_) {
    case Kind::kExponential: {
      const double rate = 2.0 * alpha_;
      return std::pow(rate, order) * std::exp(rate * x);
    }
    case Kind::kPower: {
      const double m = 2.0 * alpha_;
      double falling = 1.0;
      for (int k = 0; k < order; ++k) falling *= (m - k);
      return falling * std::pow(1.0 + x, m - order);
    }
    case Kind::kArctan: {
      constexpr double c = 2.0 / std::numbers::pi;
      const double q = 1.0 + x * x;
      switch (order) {
        case 0: return 1.0 + c * std::atan(x);
        case 1: return c / q;
        case 2: return -2.0 * c * x / (q * q);
        default: return c * (6.0 * x * x - 2.0) / (q * q * q);
      }
    }
    case Kind::kOne:
      return order == 0 ? 1.0 : 0.0;
    case Kind::kCustom:
      return custom_(x, order);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double WeightSpec::constant(int order) const {
  require(order >= 1 && order <= 3, ErrorCode::kInvalidInput, "admissibility constants are declared for orders 1..3");
  switch (kind_) {
    case Kind::kExponential:
      return std::pow(std::abs(2.0 * alpha_), order);
    case Kind::kPower: {
      // |psi^(j)|/psi = |m (m-1) .. (m-j+1)| / (1+x)^j, largest at x = 0.
      const double m = 2.0 * alpha_;
      double falling = 1.0;
      for (int k = 0; k < order; ++k) falling *= (m - k);
      return std::abs(falling);
    }
    case Kind::kArctan: {
      // psi >= 1, so the ratios are bounded by sup |psi^(j)|.
      constexpr double c = 2.0 / std::numbers::pi;
      if (order == 1) return c;
      if (order == 2) return c * 3.0 * std::sqrt(3.0) / 4.0;
      return 2.0 * c;
    }
    case Kind::kOne:
      return 0.0;
    case Kind::kCustom:
      return custom_constants_[order - 1];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AdmissibilityReport check_admissible(const WeightSpec& w, std::span<const int> orders,
                                     std::span<const double> x_samples) {
  for (double x : x_samples) {
    const double value = w(x);
    require(std::isfinite(value) && value > 0.0, ErrorCode::kNotAWeight,
            "psi(" + std::to_string(x) + ") = " + std::to_string(value) + " is not positive");
  }
  AdmissibilityReport report;
  for (int order : orders) {
    double worst = 0.0;
    for (double x : x_samples) worst = std::max(worst, std::abs(w.derivative(x, order)) / w(x));
    report.orders.push_back(order);
    report.constants.push_back(worst);
    const double declared = w.constant(order);
    if (worst > declared * (1.0 + 1e-12) + 1e-300) report.ok = false;
  }
  return report;
}

UniquenessReport check_uniqueness_condition(const WeightSpec& w, double p, std::span<const double> x_samples,
                                            double c0) {
  require(p >= 1.0 && p <= 2.0, ErrorCode::kInvalidInput, "uniqueness condition is stated for p in [1, 2]");
  require(!x_samples.empty(), ErrorCode::kInvalidInput, "no sample points");
  double inf_value = std::numeric_limits<double>::infinity();
  for (double x : x_samples) {
    const double psi = w(x);
    require(std::isfinite(psi) && psi > 0.0, ErrorCode::kNotAWeight, "weight is not positive at x = " + std::to_string(x));
    const double slope = std::max(w.d1(x), 0.0);
    inf_value = std::min(inf_value, std::pow(slope, p + 2.0) * std::pow(psi, p - 2.0));
  }
  return {inf_value >= c0, inf_value};
}

std::vector<double> log_spaced_samples(double x_max, int count) {
  require(x_max > 0.0 && count >= 2, ErrorCode::kInvalidInput, "bad sample specification");
  std::vector<double> xs;
  xs.reserve(count + 1);
  xs.push_back(0.0);
  const double lo = std::log(1e-4);
  const double hi = std::log(x_max);
  for (int k = 0; k < count; ++k) xs.push_back(std::exp(lo + (hi - lo) * k / (count - 1)));
  return xs;
}

}  // namespace hnls

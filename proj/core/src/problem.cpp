#include "hnls/problem.hpp"

#include <cmath>
#include <sstream>

#include "hnls/error.hpp"
#include "hnls/stencils.hpp"

namespace hnls {

struct BoundarySignal::Impl {
  std::vector<Mode> modes;
  std::function<Complex(double)> value;
  std::function<Complex(double, int)> derivative;
  double spacing = 0.0;
  std::vector<Complex> samples;
  BoundarySignal lhs;
  BoundarySignal rhs;
  double scale = 1.0;
};

namespace {

Complex interpolate_samples(const std::vector<Complex>& values, double spacing, double t) {
  const double span = spacing * (values.size() - 1);
  // Odd reflection about the end points: mu(-s) = 2 mu(0) - mu(s).
  if (t < 0.0) return 2.0 * values.front() - interpolate_samples(values, spacing, std::min(-t, span));
  if (t > span) return 2.0 * values.back() - interpolate_samples(values, spacing, std::max(2.0 * span - t, 0.0));
  const double pos = t / spacing;
  const int k = std::min(static_cast<int>(std::floor(pos)), static_cast<int>(values.size()) - 2);
  const double frac = pos - k;
  return (1.0 - frac) * values[k] + frac * values[k + 1];
}

Complex fd_derivative(const std::function<Complex(double)>& fn, double t, int order) {
  if (order == 0) return fn(t);
  // Centered 8th-order stencil; step balanced against round-off.
  const double h = 0.02;
  std::vector<double> nodes;
  for (int k = -4; k <= 4; ++k) nodes.push_back(t + k * h);
  const auto w = fornberg_weights(t, nodes, order);
  Complex sum{};
  for (std::size_t k = 0; k < nodes.size(); ++k) sum += w[order][k] * fn(nodes[k]);
  return sum;
}

}  // namespace

BoundarySignal::BoundarySignal() = default;

BoundarySignal BoundarySignal::modes(std::vector<Mode> modes) {
  BoundarySignal s;
  if (modes.empty()) return s;
  auto impl = std::make_shared<Impl>();
  impl->modes = std::move(modes);
  s.kind_ = Kind::kModes;
  s.impl_ = std::move(impl);
  return s;
}

BoundarySignal BoundarySignal::function(std::function<Complex(double)> value,
                                        std::function<Complex(double, int)> derivative) {
  require(static_cast<bool>(value), ErrorCode::kInvalidInput, "boundary function is empty");
  BoundarySignal s;
  auto impl = std::make_shared<Impl>();
  impl->value = std::move(value);
  impl->derivative = std::move(derivative);
  s.kind_ = Kind::kFunction;
  s.impl_ = std::move(impl);
  return s;
}

BoundarySignal BoundarySignal::samples(double spacing, std::vector<Complex> values) {
  require(spacing > 0.0 && values.size() >= 2, ErrorCode::kInvalidInput, "boundary samples need >= 2 values");
  BoundarySignal s;
  auto impl = std::make_shared<Impl>();
  impl->spacing = spacing;
  impl->samples = std::move(values);
  s.kind_ = Kind::kSamples;
  s.impl_ = std::move(impl);
  return s;
}

Complex BoundarySignal::operator()(double t) const {
  switch (kind_) {
    case Kind::kZero: return {};
    case Kind::kModes: {
      Complex sum{};
      for (const Mode& m : impl_->modes) sum += m.amplitude * std::exp(Complex(0.0, m.frequency * t));
      return sum;
    }
    case Kind::kFunction: return impl_->value(t);
    case Kind::kSamples: return interpolate_samples(impl_->samples, impl_->spacing, t);
    case Kind::kSum: return impl_->lhs(t) + impl_->scale * impl_->rhs(t);
  }
  return {};
}

Complex BoundarySignal::derivative(double t, int order) const {
  require(order >= 0, ErrorCode::kInvalidInput, "negative derivative order");
  switch (kind_) {
    case Kind::kZero: return {};
    case Kind::kModes: {
      Complex sum{};
      for (const Mode& m : impl_->modes) {
        sum += m.amplitude * std::pow(Complex(0.0, m.frequency), order) * std::exp(Complex(0.0, m.frequency * t));
      }
      return sum;
    }
    case Kind::kFunction:
      if (impl_->derivative) return impl_->derivative(t, order);
      return fd_derivative(impl_->value, t, order);
    case Kind::kSamples:
      return fd_derivative([this](double s) { return (*this)(s); }, t, order);
    case Kind::kSum: return impl_->lhs.derivative(t, order) + impl_->scale * impl_->rhs.derivative(t, order);
  }
  return {};
}

BoundarySignal BoundarySignal::plus(const BoundarySignal& other, double scale) const {
  if (other.is_zero() || scale == 0.0) return *this;
  BoundarySignal s;
  auto impl = std::make_shared<Impl>();
  impl->lhs = *this;
  impl->rhs = other;
  impl->scale = scale;
  s.kind_ = Kind::kSum;
  s.impl_ = std::move(impl);
  return s;
}

std::string BoundarySignal::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kZero: out << "zero"; break;
    case Kind::kModes:
      out << "modes[";
      for (std::size_t k = 0; k < impl_->modes.size(); ++k) {
        if (k) out << ",";
        out << impl_->modes[k].amplitude << "@" << impl_->modes[k].frequency;
      }
      out << "]";
      break;
    case Kind::kFunction: out << "function"; break;
    case Kind::kSamples: out << "samples(" << impl_->samples.size() << ")"; break;
    case Kind::kSum: out << impl_->lhs.describe() << "+" << impl_->scale << "*" << impl_->rhs.describe(); break;
  }
  return out.str();
}

std::optional<std::vector<BoundarySignal::Mode>> BoundarySignal::mode_decomposition() const {
  switch (kind_) {
    case Kind::kZero: return std::vector<Mode>{};
    case Kind::kModes: return impl_->modes;
    case Kind::kSum: {
      auto lhs = impl_->lhs.mode_decomposition();
      auto rhs = impl_->rhs.mode_decomposition();
      if (!lhs || !rhs) return std::nullopt;
      for (Mode m : *rhs) lhs->push_back({impl_->scale * m.amplitude, m.frequency});
      return lhs;
    }
    default: return std::nullopt;
  }
}

void Source::sample(double t, const HalfLineGrid& grid, std::span<Complex> out) const {
  if (!fn_) {
    std::fill(out.begin(), out.end(), Complex{});
    return;
  }
  for (int j = 0; j < grid.nodes(); ++j) out[j] = fn_(t, grid.x(j));
}

Source Source::plus(const Source& other, double scale) const {
  if (other.is_zero() || scale == 0.0) return *this;
  if (is_zero()) return Source([other, scale](double t, double x) { return scale * other(t, x); });
  return Source([self = *this, other, scale](double t, double x) { return self(t, x) + scale * other(t, x); });
}

void ProblemSpec::validate() const {
  require(std::isfinite(coeffs.p) && coeffs.p >= 1.0, ErrorCode::kConfigRejected, "exponent p must satisfy p >= 1");
  if (!boundary.is_zero()) {
    require(coeffs.p == 1.0 && coeffs.gamma == 0.0, ErrorCode::kConfigRejected,
            "nonhomogeneous boundary data requires p = 1 and gamma = 0 (got p = " + std::to_string(coeffs.p) +
                ", gamma = " + std::to_string(coeffs.gamma) + ")");
  }
}

}  // namespace hnls

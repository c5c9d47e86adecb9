#include <cmath>
#include <numbers>

#include "hnls/norms.hpp"
#include "hnls/problem.hpp"
#include "hnls/weight.hpp"
#include "test_support.hpp"

namespace hnls {
namespace {

TEST(HalfLineGrid, RejectsDegenerateSizes) {
  EXPECT_HNLS_ERROR(HalfLineGrid(-1.0, 64, 1.0, 10), ErrorCode::kInvalidInput);
  EXPECT_HNLS_ERROR(HalfLineGrid(10.0, 4, 1.0, 10), ErrorCode::kInvalidInput);
  EXPECT_HNLS_ERROR(HalfLineGrid(10.0, 64, 1.0, 1), ErrorCode::kInvalidInput);
  EXPECT_HNLS_ERROR(HalfLineGrid(10.0, 64, std::nan(""), 10), ErrorCode::kInvalidInput);
}

TEST(HalfLineGrid, RefinementKeepsExtent) {
  const HalfLineGrid g(10.0, 64, 2.0, 16);
  const HalfLineGrid r = g.refined(2);
  EXPECT_EQ(r.cells(), 128);
  EXPECT_EQ(r.steps(), 32);
  EXPECT_DOUBLE_EQ(r.length(), 10.0);
  EXPECT_DOUBLE_EQ(r.dx(), g.dx() / 2);
  EXPECT_DOUBLE_EQ(r.x(r.cells()), 10.0);
}

TEST(GridFunction, SizeAndFiniteness) {
  const HalfLineGrid g(10.0, 16, 1.0, 4);
  EXPECT_HNLS_ERROR(GridFunction(g, std::vector<Complex>(3)), ErrorCode::kInvalidInput);
  GridFunction u(g);
  EXPECT_NO_THROW(u.require_finite());
  u[5] = Complex(std::nan(""), 0.0);
  EXPECT_HNLS_ERROR(u.require_finite(), ErrorCode::kInvalidInput);
}

TEST(FieldHistory, StopsAtLastLevel) {
  const HalfLineGrid g(10.0, 16, 1.0, 2);
  FieldHistory h(g);
  const std::vector<Complex> slice(g.nodes());
  for (int n = 0; n < 3; ++n) h.push_back(slice);
  EXPECT_TRUE(h.complete());
  EXPECT_HNLS_ERROR(h.push_back(slice), ErrorCode::kInvalidInput);
}

TEST(Weight, ParsesCodes) {
  EXPECT_EQ(WeightSpec::parse("exp:0.5").kind(), WeightSpec::Kind::kExponential);
  EXPECT_DOUBLE_EQ(WeightSpec::parse("pow:1.5").alpha(), 1.5);
  EXPECT_EQ(WeightSpec::parse("arctan").kind(), WeightSpec::Kind::kArctan);
  EXPECT_EQ(WeightSpec::parse("one").code(), "one");
  EXPECT_HNLS_ERROR(WeightSpec::parse("exp:"), ErrorCode::kInvalidInput);
  EXPECT_HNLS_ERROR(WeightSpec::parse("gauss:1"), ErrorCode::kInvalidInput);
}

TEST(Weight, DerivativesMatchFiniteDifferences) {
  for (const auto& w : {WeightSpec::exponential(0.3), WeightSpec::power(0.75), WeightSpec::arctan()}) {
    for (double x : {0.2, 1.0, 3.7}) {
      for (int k = 1; k <= 3; ++k) {
        const double h = 1e-3;
        const double fd = (w.derivative(x + h, k - 1) - w.derivative(x - h, k - 1)) / (2 * h);
        EXPECT_NEAR(w.derivative(x, k), fd, 1e-5 * std::max(1.0, std::abs(fd))) << w.code() << " x=" << x;
      }
    }
  }
}

TEST(WeightedNorm, ExponentialDecayAgainstExpWeight) {
  // int_0^40 e^{-2x} e^{x} dx = 1 - e^{-40}.
  const HalfLineGrid g(40.0, 8000, 1.0, 2);
  const GridFunction u(g, [](double x) { return Complex(std::exp(-x), 0.0); });
  EXPECT_NEAR(weighted_l2_norm(u, WeightSpec::exponential(0.5)), 1.0, 1e-5);
  // Unweighted: sqrt(1/2).
  EXPECT_NEAR(weighted_l2_norm(u, WeightSpec::one()), std::sqrt(0.5), 1e-5);
}

TEST(WeightedNorm, InnerProductIsConjugateLinear) {
  const HalfLineGrid g(10.0, 400, 1.0, 2);
  std::vector<Complex> u(g.nodes()), v(g.nodes());
  for (int j = 0; j < g.nodes(); ++j) {
    u[j] = std::exp(Complex(-g.x(j), g.x(j)));
    v[j] = std::exp(Complex(-0.5 * g.x(j), 0.0));
  }
  const auto w = WeightSpec::power(1.0);
  const Complex uv = weighted_inner(u, v, g, w);
  const Complex vu = weighted_inner(v, u, g, w);
  EXPECT_NEAR(std::abs(uv - std::conj(vu)), 0.0, 1e-14);
  EXPECT_NEAR(weighted_inner(u, u, g, w).real(), std::pow(weighted_l2_norm(u, g, w), 2), 1e-12);
}

TEST(SigmaPlus, ConstantFieldOverLongHorizon) {
  const HalfLineGrid g(5.0, 100, 4.0, 16);
  const auto h = FieldHistory::sample(g, [](double, double) { return Complex(1.0, 0.0); });
  EXPECT_NEAR(sigma_plus(h).value, 2.0, 1e-12);
}

TEST(SigmaPlus, DecayingFieldPeaksAtOrigin) {
  const HalfLineGrid g(6.0, 6000, 1.0, 4);
  const auto h = FieldHistory::sample(g, [](double, double x) { return Complex(std::exp(-x), 0.0); });
  const auto s = sigma_plus(h);
  EXPECT_NEAR(s.value, std::sqrt((1.0 - std::exp(-2.0)) / 2.0), 1e-6);
  EXPECT_DOUBLE_EQ(s.x0, 0.0);
}

TEST(SigmaPlus, ShortDomain) {
  const HalfLineGrid g(0.5, 16, 1.0, 4);
  const auto h = FieldHistory::sample(g, [](double, double) { return Complex(1.0, 0.0); });
  EXPECT_HNLS_ERROR(sigma_plus(h), ErrorCode::kDomainTooShort);
}

TEST(Admissibility, ExponentialRatioIsTwoAlpha) {
  const auto xs = log_spaced_samples(40.0, 64);
  const int orders[] = {1, 2, 3};
  const auto report = check_admissible(WeightSpec::exponential(1.0), orders, xs);
  EXPECT_TRUE(report.ok);
  EXPECT_NEAR(report.constants[0], 2.0, 1e-12);
  EXPECT_NEAR(report.constants[1], 4.0, 1e-12);
  EXPECT_NEAR(report.constants[2], 8.0, 1e-12);
}

TEST(Admissibility, ShippedWeightsHonourDeclaredConstants) {
  const auto xs = log_spaced_samples(100.0, 256);
  const int orders[] = {1, 2, 3};
  for (const auto& w : {WeightSpec::arctan(), WeightSpec::power(0.75), WeightSpec::power(2.0), WeightSpec::one()}) {
    EXPECT_TRUE(check_admissible(w, orders, xs).ok) << w.code();
  }
}

TEST(Admissibility, UnderdeclaredCustomWeightFails) {
  const auto w = WeightSpec::custom(
      "e^{4x}", [](double x, int k) { return std::pow(4.0, k) * std::exp(4.0 * x); }, {1.0, 1.0, 1.0});
  const auto xs = log_spaced_samples(5.0, 16);
  const int orders[] = {1};
  const auto report = check_admissible(w, orders, xs);
  EXPECT_FALSE(report.ok);
  EXPECT_NEAR(report.constants[0], 4.0, 1e-12);
}

TEST(Admissibility, VanishingWeightIsNotAWeight) {
  const auto w = WeightSpec::custom("x", [](double x, int k) { return k == 0 ? x : (k == 1 ? 1.0 : 0.0); },
                                    {1.0, 0.0, 0.0});
  const auto xs = log_spaced_samples(5.0, 16);
  const int orders[] = {1};
  EXPECT_HNLS_ERROR(check_admissible(w, orders, xs), ErrorCode::kNotAWeight);
}

TEST(Uniqueness, ExponentialAndPowerWeights) {
  const auto xs = log_spaced_samples(40.0, 64);
  // exp:0.5: (e^x)^{p+2} (e^x)^{p-2} = e^{2px} has infimum 1 at x = 0.
  const auto e = check_uniqueness_condition(WeightSpec::exponential(0.5), 1.0, xs, 1e-3);
  EXPECT_TRUE(e.ok);
  EXPECT_NEAR(e.inf_value, 1.0, 1e-12);
  // pow:0.75 with p = 1: (1.5 (1+x)^{1/2})^3 (1+x)^{-3/2} = 3.375 everywhere.
  const auto p = check_uniqueness_condition(WeightSpec::power(0.75), 1.0, xs, 1e-3);
  EXPECT_TRUE(p.ok);
  EXPECT_NEAR(p.inf_value, 3.375, 1e-12);
  // pow:0.1 decays like 0.008 (1+x)^{-2.6}.
  const auto q = check_uniqueness_condition(WeightSpec::power(0.1), 1.0, xs, 1e-3);
  EXPECT_FALSE(q.ok);
  EXPECT_NEAR(q.inf_value, 0.008 * std::pow(41.0, -2.6), 1e-15);
  EXPECT_HNLS_ERROR(check_uniqueness_condition(WeightSpec::one(), 3.0, xs, 1e-3), ErrorCode::kInvalidInput);
}

TEST(BoundarySignal, ModesHaveAnalyticDerivatives) {
  const auto mu = BoundarySignal::modes({{Complex(1.0, 2.0), 3.0}, {0.5, -1.0}});
  const double t = 0.7;
  const Complex expected1 = Complex(1.0, 2.0) * Complex(0.0, 3.0) * std::exp(Complex(0.0, 3.0 * t)) +
                            0.5 * Complex(0.0, -1.0) * std::exp(Complex(0.0, -t));
  EXPECT_NEAR(std::abs(mu.derivative(t, 1) - expected1), 0.0, 1e-14);
  EXPECT_FALSE(mu.is_zero());
  const auto decomposition = mu.plus(BoundarySignal::modes({{1.0, 2.0}}), 2.0).mode_decomposition();
  ASSERT_TRUE(decomposition.has_value());
  EXPECT_EQ(decomposition->size(), 3u);
}

TEST(BoundarySignal, SamplesInterpolateAndExtendContinuously) {
  const auto mu = BoundarySignal::samples(0.5, {0.0, 1.0, 4.0});
  EXPECT_NEAR(std::abs(mu(0.25) - Complex(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mu(0.75) - Complex(2.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mu(1.0 + 1e-9) - mu(1.0)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(mu(-1e-9) - mu(0.0)), 0.0, 1e-6);
  EXPECT_HNLS_ERROR(BoundarySignal::samples(0.5, {1.0}), ErrorCode::kInvalidInput);
}

TEST(BoundarySignal, FunctionDerivativeByDifferences) {
  const auto mu = BoundarySignal::function([](double t) { return Complex(std::sin(t), t * t); });
  EXPECT_NEAR(std::abs(mu.derivative(0.4, 1) - Complex(std::cos(0.4), 0.8)), 0.0, 1e-6);
  EXPECT_TRUE(BoundarySignal::zero().is_zero());
}

TEST(ProblemSpec, RegimeGates) {
  ProblemSpec spec;
  spec.coeffs.p = 0.5;
  EXPECT_HNLS_ERROR(spec.validate(), ErrorCode::kConfigRejected);
  spec.coeffs.p = 2.0;
  spec.boundary = BoundarySignal::modes({{1.0, 1.0}});
  EXPECT_HNLS_ERROR(spec.validate(), ErrorCode::kConfigRejected);
  spec.coeffs.p = 1.0;
  spec.coeffs.gamma = 0.5;
  EXPECT_HNLS_ERROR(spec.validate(), ErrorCode::kConfigRejected);
  spec.coeffs.gamma = 0.0;
  EXPECT_NO_THROW(spec.validate());
}

TEST(TailGuard, FlagsMassNearTheFarEnd) {
  const HalfLineGrid g(10.0, 200, 1.0, 2);
  std::vector<Complex> inside(g.nodes()), tail(g.nodes());
  for (int j = 0; j < g.nodes(); ++j) {
    inside[j] = std::exp(-(g.x(j) - 3.0) * (g.x(j) - 3.0));
    tail[j] = std::exp(-(g.x(j) - 9.5) * (g.x(j) - 9.5));
  }
  EXPECT_LT(tail_mass_fraction(inside, g), 1e-12);
  EXPECT_NO_THROW(enforce_tail_guard(inside, g, 1e-8, 0.0));
  EXPECT_HNLS_ERROR(enforce_tail_guard(tail, g, 1e-8, 0.5), ErrorCode::kTailContamination);
  EXPECT_EQ(tail_mass_fraction(std::vector<Complex>(g.nodes()), g), 0.0);
}

TEST(Trapezoid, ExactForLinearFunctions) {
  std::vector<double> f{0.0, 1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(trapezoid(f, 0.5), 2.25);
}

}  // namespace
}  // namespace hnls

#include <Eigen/Dense>
#include <cmath>

#include "hnls/galerkin.hpp"
#include "test_support.hpp"

namespace hnls {
namespace {

constexpr Complex I{0.0, 1.0};

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// One Richardson step on Simpson: sixth order.
double integrate(const std::function<double(double)>& f) {
  return (16.0 * simpson(f, 0.0, 60.0, 24000) - simpson(f, 0.0, 60.0, 12000)) / 15.0;
}

TEST(GalerkinBasis, DimensionBounds) {
  EXPECT_HNLS_ERROR(GalerkinBasis(0, GalerkinVariant::kTwoCondition), ErrorCode::kInvalidInput);
  EXPECT_HNLS_ERROR(GalerkinBasis(41, GalerkinVariant::kOneCondition), ErrorCode::kInvalidInput);
}

TEST(GalerkinBasis, BoundaryConditions) {
  const GalerkinBasis two(6, GalerkinVariant::kTwoCondition);
  const GalerkinBasis one(6, GalerkinVariant::kOneCondition);
  for (int j = 0; j < 6; ++j) {
    EXPECT_EQ(two.phi(j, 0.0), 0.0);
    EXPECT_EQ(two.phi(j, 0.0, 1), 0.0);
    EXPECT_EQ(one.phi(j, 0.0), 0.0);
    EXPECT_NE(one.phi(j, 0.0, 1), 0.0);
  }
}

TEST(GalerkinBasis, FirstFunctionClosedForm) {
  const GalerkinBasis b(1, GalerkinVariant::kTwoCondition);
  for (double x : {0.3, 1.0, 4.2}) {
    EXPECT_NEAR(b.phi(0, x), x * x * std::exp(-x), 1e-15);
    EXPECT_NEAR(b.phi(0, x, 1), (2 * x - x * x) * std::exp(-x), 1e-15);
  }
  EXPECT_NEAR(b.gram(0, 0), 0.75, 1e-13);
  EXPECT_NEAR(b.stiffness(2, 0, 0), -0.25, 1e-13);
  EXPECT_NEAR(b.stiffness(1, 0, 0), 0.0, 1e-13);
  EXPECT_NEAR(b.stiffness(3, 0, 0), 0.0, 1e-13);
}

TEST(GalerkinBasis, DerivativesAgreeWithDifferences) {
  const GalerkinBasis b(5, GalerkinVariant::kOneCondition);
  for (int j = 0; j < 5; ++j) {
    for (double x : {0.4, 2.0, 7.5}) {
      for (int d = 1; d <= 3; ++d) {
        const double h = 1e-4;
        const double fd = (b.phi(j, x + h, d - 1) - b.phi(j, x - h, d - 1)) / (2 * h);
        EXPECT_NEAR(b.phi(j, x, d), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(GalerkinBasis, GramIsDiagonalAndPositive) {
  for (auto v : {GalerkinVariant::kTwoCondition, GalerkinVariant::kOneCondition}) {
    const GalerkinBasis b(8, v);
    Eigen::MatrixXd G(8, 8);
    for (int m = 0; m < 8; ++m)
      for (int j = 0; j < 8; ++j) G(m, j) = b.gram(m, j);
    for (int m = 0; m < 8; ++m)
      for (int j = 0; j < 8; ++j)
        if (m != j) EXPECT_NEAR(G(m, j), 0.0, 1e-10 * std::sqrt(G(m, m) * G(j, j)));
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(G).info(), Eigen::Success);
    EXPECT_LT(b.condition_number(), 1e12);
  }
}

TEST(GalerkinBasis, MatricesMatchIndependentQuadrature) {
  const GalerkinBasis b(4, GalerkinVariant::kTwoCondition);
  for (int m = 0; m < 4; ++m) {
    for (int j = 0; j < 4; ++j) {
      const double g = integrate([&](double x) { return b.phi(j, x) * b.phi(m, x); });
      EXPECT_NEAR(b.gram(m, j), g, 1e-9 * std::max(1.0, std::abs(g)));
      for (int d = 1; d <= 3; ++d) {
        const double s = integrate([&](double x) { return b.phi(j, x) * b.phi(m, x, d); });
        EXPECT_NEAR(b.stiffness(d, m, j), s, 1e-9 * std::max(1.0, std::abs(s))) << m << j << d;
      }
    }
  }
}

TEST(GalerkinSolve, OneModeClosedForm) {
  // k = 1, F = e^{-x}: 0.75 c' = i(-0.25 a c - 0.25), so with kappa = -a/3,
  // c(t) = (1/(3 kappa)) (1 - e^{i kappa t}).
  const GalerkinBasis b(1, GalerkinVariant::kTwoCondition);
  const double a = 1.5;
  const double kappa = -a / 3.0;
  const auto h = galerkin_solve(b, [](double, double x) { return Complex(std::exp(-x), 0.0); }, 2.0,
                                Coefficients{a, 0.7}, 20);
  ASSERT_EQ(h.t.size(), 21u);
  for (std::size_t n = 0; n < h.t.size(); ++n) {
    const Complex expected = (1.0 / (3.0 * kappa)) * (1.0 - std::exp(I * kappa * h.t[n]));
    EXPECT_NEAR(std::abs(h.c[n][0] - expected), 0.0, 1e-10) << h.t[n];
    EXPECT_NEAR(h.norm2[n], 0.75 * std::norm(expected), 1e-10);
  }
}

TEST(GalerkinSolve, NoForcingNoMotion) {
  const GalerkinBasis b(6, GalerkinVariant::kTwoCondition);
  const auto h = galerkin_solve(b, [](double, double) { return Complex{}; }, 1.0, Coefficients{1.0, 0.5}, 10);
  for (std::size_t n = 0; n < h.t.size(); ++n) {
    EXPECT_EQ(h.norm2[n], 0.0);
    EXPECT_EQ(h.forcing_l1[n], 0.0);
  }
}

FieldFn smooth_forcing() {
  return [](double t, double x) { return std::sin(3.0 * t) * x * x * std::exp(-(x - 2.0) * (x - 2.0)) * Complex(1.0, 0.5); };
}

TEST(GalerkinSolve, EnergyIdentityAndBound) {
  const GalerkinBasis b(8, GalerkinVariant::kTwoCondition);
  const auto h = galerkin_solve(b, smooth_forcing(), 1.0, Coefficients{1.0, 0.5});
  EXPECT_LT(test::max_abs(galerkin_identity_residual(h)), 1e-8);
  for (std::size_t n = 0; n < h.t.size(); ++n) EXPECT_LE(std::sqrt(h.norm2[n]), h.forcing_l1[n] + 1e-10);
  EXPECT_GT(h.accepted_steps, 0);
}

TEST(GalerkinSolve, AdjointIdentityKeepsTraceTerm) {
  const GalerkinBasis b(8, GalerkinVariant::kOneCondition);
  const auto h = galerkin_solve(b, smooth_forcing(), 1.0, Coefficients{1.0, 0.5});
  EXPECT_LT(test::max_abs(adjoint_identity_residual(h)), 1e-8);
  double trace = 0.0;
  for (const Complex& v : h.trace_x) trace = std::max(trace, std::abs(v));
  EXPECT_GT(trace, 1e-3);
}

TEST(GalerkinSolve, AdjointResidualNeedsOneConditionVariant) {
  const GalerkinBasis b(2, GalerkinVariant::kTwoCondition);
  const auto h = galerkin_solve(b, smooth_forcing(), 0.5, Coefficients{1.0}, 5);
  EXPECT_HNLS_ERROR(adjoint_identity_residual(h), ErrorCode::kInvalidInput);
}

TEST(GalerkinSolve, UnreachableToleranceIsStiffness) {
  const GalerkinBasis b(4, GalerkinVariant::kTwoCondition);
  EXPECT_HNLS_ERROR(galerkin_solve(b, smooth_forcing(), 1.0, Coefficients{1.0}, 10, 1e-300), ErrorCode::kStiffness);
}

TEST(GalerkinEvaluate, SumsBasisFunctions) {
  const GalerkinBasis b(3, GalerkinVariant::kOneCondition);
  const std::vector<Complex> c{1.0, Complex(0.0, 2.0), -0.5};
  for (double x : {0.5, 3.0}) {
    const Complex expected = b.phi(0, x) + 2.0 * I * b.phi(1, x) - 0.5 * b.phi(2, x);
    EXPECT_NEAR(std::abs(galerkin_evaluate(b, c, x) - expected), 0.0, 1e-14);
  }
}

}  // namespace
}  // namespace hnls

#include <cmath>

#include "hnls/fourier_oracle.hpp"
#include "hnls/linear.hpp"
#include "hnls/nonlinearity.hpp"
#include "hnls/norms.hpp"
#include "test_support.hpp"

namespace hnls {
namespace {

constexpr Complex I{0.0, 1.0};

// u = e^{it} e^{-x^2} and the source that makes it exact for the linear operator.
struct LinearManufactured {
  Coefficients c;
  Complex u(double t, double x) const { return std::exp(I * t) * std::exp(-x * x); }
  Complex f(double t, double x) const {
    const Complex e = u(t, x);
    const Complex ut = I * e, ux = -2.0 * x * e, uxx = (4.0 * x * x - 2.0) * e,
                  uxxx = (-8.0 * x * x * x + 12.0 * x) * e;
    return I * ut + c.a * uxx + I * c.b * ux + I * uxxx;
  }
};

TEST(LinearStepOperator, ExactOnCubicsAwayFromFarEnd) {
  const HalfLineGrid g(4.0, 64, 1.0, 8);
  const Coefficients c{1.5, -0.7};
  const LinearStepOperator op(g, c);
  std::vector<Complex> u(g.nodes()), out(g.nodes());
  for (int j = 0; j < g.nodes(); ++j) u[j] = std::pow(g.x(j), 3);
  op.apply(u, out);
  // A = i a D2 - b D1 - D3 on x^3. The centred first difference of x^3 is
  // 3x^2 + h^2; the other stencils are exact on cubics.
  const double h = g.dx();
  for (int j = 1; j < g.cells() - 1; ++j) {
    const double x = g.x(j);
    const Complex expected = I * c.a * 6.0 * x - c.b * (3.0 * x * x + h * h) - 6.0;
    EXPECT_NEAR(std::abs(out[j] - expected), 0.0, 1e-9 * std::max(1.0, std::abs(expected))) << "row " << j;
  }
  EXPECT_EQ(out[0], Complex{});
  EXPECT_EQ(out[g.cells()], Complex{});
}

TEST(LinearStep, ZeroStaysZero) {
  const HalfLineGrid g(10.0, 128, 1.0, 10);
  const LinearStepOperator op(g, Coefficients{1.0, 0.5});
  const GridFunction zero(g);
  const GridFunction next = linear_step(op, zero, GridFunction(g), Complex{});
  for (int j = 0; j < g.nodes(); ++j) EXPECT_EQ(next[j], Complex{});
}

TEST(LinearStep, ImposesBoundaryValue) {
  const HalfLineGrid g(10.0, 128, 1.0, 10);
  const LinearStepOperator op(g, Coefficients{1.0, 0.5});
  const GridFunction next = linear_step(op, GridFunction(g), GridFunction(g), Complex(0.25, -0.5));
  EXPECT_NEAR(std::abs(next[0] - Complex(0.25, -0.5)), 0.0, 1e-15);
  EXPECT_EQ(next[g.cells()], Complex{});
}

TEST(SolveLinear, ManufacturedSolutionConvergesAtSecondOrder) {
  const LinearManufactured m{Coefficients{1.0, 0.5}};
  std::vector<double> errors;
  for (int N : {256, 512, 1024}) {
    const HalfLineGrid g(10.0, N, 1.0, N / 10);
    ProblemSpec spec;
    spec.coeffs = m.c;
    spec.initial = [&](double x) { return m.u(0.0, x); };
    spec.boundary = BoundarySignal::function([&](double t) { return m.u(t, 0.0); });
    spec.source = Source([&](double t, double x) { return m.f(t, x); });
    const auto h = solve_linear(spec, g);
    std::vector<Complex> exact(g.nodes());
    for (int j = 0; j < g.nodes(); ++j) exact[j] = m.u(1.0, g.x(j));
    errors.push_back(test::l2_distance(h.slice(g.steps()), exact, g.dx()));
  }
  EXPECT_GE(test::observed_order(errors[0], errors[1]), 1.8);
  EXPECT_GE(test::observed_order(errors[1], errors[2]), 1.8);
  EXPECT_LT(errors[2], 1e-3);
}

TEST(FourierOracle, SingleModeAcquiresDispersivePhase) {
  const PeriodicBox box{0.0, 2.0 * std::numbers::pi, 64};
  const Coefficients c{0.8, -0.3};
  const double xi = 5.0, t = 0.37;
  const auto u = fullline_solution(box, c, [&](double x) { return std::exp(I * xi * x); }, t);
  const double omega = xi * xi * xi - c.a * xi * xi - c.b * xi;
  EXPECT_DOUBLE_EQ(dispersion(xi, c), omega);
  for (int j = 0; j < box.points; ++j) {
    EXPECT_NEAR(std::abs(u[j] - std::exp(I * (xi * box.x(j) + omega * t))), 0.0, 1e-11);
  }
}

TEST(FourierOracle, ZeroDataGivesZero) {
  const PeriodicBox box{-10.0, 20.0, 128};
  const auto u = fullline_solution(box, Coefficients{1.0}, [](double) { return Complex{}; }, 1.0);
  for (const Complex& v : u) EXPECT_EQ(v, Complex{});
}

TEST(FourierOracle, UnderresolvedSpectrumIsRejected) {
  const PeriodicBox box{0.0, 10.0, 64};
  // Alternating samples put everything at the Nyquist frequency.
  EXPECT_HNLS_ERROR(fullline_solution(box, Coefficients{1.0}, [&](double x) {
                      return Complex(std::lround(x / box.spacing()) % 2 == 0 ? 1.0 : -1.0, 0.0);
                    }, 0.1),
                    ErrorCode::kResolution);
}

TEST(FourierOracle, AroundBoxAlignsWithHalfLineNodes) {
  const HalfLineGrid g(10.0, 100, 1.0, 10);
  const PeriodicBox box = PeriodicBox::around(g);
  EXPECT_NEAR(box.spacing(), g.dx(), 1e-15);
  for (int j : {0, 17, 100}) EXPECT_NEAR(box.x(box.offset() + j), g.x(j), 1e-12);
  EXPECT_HNLS_ERROR(PeriodicBox::around(HalfLineGrid(10.0, 101, 1.0, 10)), ErrorCode::kInvalidInput);
}

TEST(CompatibilityChain, FirstLinkAtOrigin) {
  // Phi_1 = (i a d^2 - b d - d^3) e^{-x}; at x = 0 with a = b = 0 this is 1.
  const HalfLineGrid g(20.0, 400, 1.0, 10);
  ProblemSpec spec;
  spec.initial = [](double x) { return Complex(std::exp(-x), 0.0); };
  spec.boundary = BoundarySignal::function([](double t) { return Complex(1.0 + t, 0.0); });
  const auto chain = compatibility_chain(spec, g, 1);
  ASSERT_EQ(chain.phi.size(), 2u);
  EXPECT_NEAR(std::abs(chain.phi[1][0] - 1.0), 0.0, 1e-6);
  // Sixth-order one-sided stencils: halving dx cuts the error by about 64.
  const auto coarse = compatibility_chain(spec, HalfLineGrid(20.0, 200, 1.0, 10), 1);
  EXPECT_GE(test::observed_order(std::abs(coarse.phi[1][0] - 1.0), std::abs(chain.phi[1][0] - 1.0)), 5.0);
  EXPECT_NEAR(chain.mismatches[0], 0.0, 1e-12);
  EXPECT_NEAR(chain.mismatches[1], 0.0, 1e-6);
}

TEST(CompatibilityChain, FirstLinkWithDispersionCoefficients) {
  const HalfLineGrid g(20.0, 400, 1.0, 10);
  ProblemSpec spec;
  spec.coeffs = {0.5, 2.0};
  spec.initial = [](double x) { return Complex(std::exp(-x), 0.0); };
  const auto chain = compatibility_chain(spec, g, 1);
  EXPECT_NEAR(std::abs(chain.phi[1][0] - Complex(3.0, 0.5)), 0.0, 1e-6);
}

TEST(CompatibilityChain, HighOrderOnCoarseGridFails) {
  const HalfLineGrid g(10.0, 32, 1.0, 10);
  ProblemSpec spec;
  spec.initial = [](double x) { return Complex(std::exp(-(x - 3.0) * (x - 3.0) * 20.0), 0.0); };
  EXPECT_HNLS_ERROR(compatibility_chain(spec, g, 3), ErrorCode::kAccuracy);
  EXPECT_HNLS_ERROR(compatibility_chain(spec, HalfLineGrid(10.0, 33, 1.0, 10), 3), ErrorCode::kAccuracy);
}

TEST(EnergyIdentity, ZeroFieldHasZeroResidual) {
  const HalfLineGrid g(10.0, 64, 1.0, 8);
  const FieldHistory zero = FieldHistory::sample(g, [](double, double) { return Complex{}; });
  const auto r = energy_identity_residual(zero, {}, WeightSpec::power(1.0), Coefficients{1.0});
  EXPECT_EQ(r.size(), 7u);
  EXPECT_EQ(test::max_abs(r), 0.0);
}

TEST(EnergyIdentity, WeightedBalanceConvergesAtSecondOrder) {
  const Coefficients c{1.0, 0.5};
  ProblemSpec spec;
  spec.coeffs = c;
  spec.initial = [](double x) { return Complex(std::exp(-(x - 8.0) * (x - 8.0) / 2.25), 0.0); };
  std::vector<double> res;
  for (int N : {512, 1024, 2048}) {
    const HalfLineGrid g(20.0, N, 1.0, N / 20);
    const auto u = solve_linear(spec, g);
    res.push_back(test::max_abs(energy_identity_residual(u, {}, WeightSpec::power(1.0), c)));
  }
  EXPECT_GE(test::observed_order(res[0], res[1]), 1.8);
  EXPECT_GE(test::observed_order(res[1], res[2]), 1.8);
}

TEST(EnergyIdentity, NeedsThreeLevels) {
  const HalfLineGrid g(10.0, 64, 1.0, 8);
  FieldHistory h(g);
  h.push_back(std::vector<Complex>(g.nodes()));
  EXPECT_HNLS_ERROR(energy_identity_residual(h, {}, WeightSpec::one(), Coefficients{}), ErrorCode::kInsufficientData);
}

TEST(BoundaryTrace, OneSidedDerivativeOfQuadratic) {
  const HalfLineGrid g(5.0, 50, 1.0, 2);
  const auto h = FieldHistory::sample(g, [](double t, double x) { return Complex(x * x + (1.0 + t) * x, 0.0); });
  const auto tr = boundary_trace(h);
  for (int n = 0; n < h.levels(); ++n) EXPECT_NEAR(tr[n].real(), 1.0 + g.t(n), 1e-12);
}

}  // namespace
}  // namespace hnls

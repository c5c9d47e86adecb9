#include "hnls/galerkin.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "hnls/error.hpp"
#include "hnls/quadrature.hpp"

namespace hnls {

namespace {

double laguerre(int n, double alpha, double y) {
  if (n < 0) return 0.0;
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - y;
  for (int m = 1; m < n; ++m) {
    const double next = ((2.0 * m + 1.0 + alpha - y) * cur - (m + alpha) * prev) / (m + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

}  // namespace

GalerkinBasis::GalerkinBasis(int k, GalerkinVariant variant)
    : k_(k),
      variant_(variant),
      power_(variant == GalerkinVariant::kTwoCondition ? 2 : 1),
      alpha_(variant == GalerkinVariant::kTwoCondition ? 4.0 : 2.0) {
  require(k >= 1 && k <= 40, ErrorCode::kInvalidInput, "Galerkin dimension must be in 1..40");
  const QuadratureRule panel = gauss_legendre(16);
  const int panels = 60 + 4 * k;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < 16; ++i) {
      nodes_.push_back(p + 0.5 * (panel.nodes[i] + 1.0));
      weights_.push_back(0.5 * panel.weights[i]);
    }
  }
  const std::size_t q = nodes_.size();
  std::vector<std::vector<double>> derivs[4];
  for (int d = 0; d < 4; ++d) {
    derivs[d].assign(k, std::vector<double>(q));
    for (int j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < q; ++i) derivs[d][j][i] = phi(j, nodes_[i], d);
    }
  }
  samples_ = derivs[0];
  gram_.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (auto& s : stiffness_) s.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int m = 0; m < k; ++m) {
    for (int j = 0; j < k; ++j) {
      double g = 0.0;
      double s[3] = {0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < q; ++i) {
        const double wj = weights_[i] * samples_[j][i];
        g += wj * samples_[m][i];
        for (int d = 1; d <= 3; ++d) s[d - 1] += wj * derivs[d][m][i];
      }
      gram_[m * k + j] = g;
      for (int d = 0; d < 3; ++d) stiffness_[d][m * k + j] = s[d];
    }
  }
  Eigen::MatrixXd gram = Eigen::Map<const Eigen::MatrixXd>(gram_.data(), k, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition_ <= 1e12)) {
    std::ostringstream msg;
    msg << "Gram condition number " << condition_ << " exceeds 1e12";
    fail(ErrorCode::kIllConditionedBasis, msg.str());
  }
}

double GalerkinBasis::phi(int j, double x, int order) const {
  require(j >= 0 && j < k_ && order >= 0 && order <= 3, ErrorCode::kInvalidInput, "basis index/order out of range");
  // Leibniz over x^s * L(2x) * e^{-x}.
  const double e = std::exp(-x);
  double sum = 0.0;
  for (int i = 0; i <= std::min(order, power_); ++i) {
    const double a = factorial(power_) / factorial(power_ - i) * std::pow(x, power_ - i);
    for (int r = 0; r <= order - i; ++r) {
      const int l = order - i - r;
      const double b = std::pow(-2.0, r) * laguerre(j - r, alpha_ + r, 2.0 * x);
      const double multinomial = factorial(order) / (factorial(i) * factorial(r) * factorial(l));
      sum += multinomial * a * b * ((l % 2) ? -e : e);
    }
  }
  return sum;
}

Complex galerkin_evaluate(const GalerkinBasis& basis, const std::vector<Complex>& c, double x, int order) {
  Complex sum{};
  for (int j = 0; j < basis.dimension(); ++j) sum += c[j] * basis.phi(j, x, order);
  return sum;
}

namespace {

struct System {
  int k;
  bool adjoint;
  CMatrix propagator;  // i G^{-1} K
  Eigen::MatrixXd gram;
  Eigen::MatrixXd gram_inverse;
  Eigen::VectorXd trace;  // phi_j'(0)
  const GalerkinBasis* basis;
  const FieldFn* F;
  mutable std::vector<Complex> f_samples;

  // Projection F_m and ||F|| at time t.
  void forcing(double t, CVector& projection, double& norm) const {
    const auto& nodes = basis->nodes();
    const auto& weights = basis->weights();
    const std::size_t q = nodes.size();
    double n2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      f_samples[i] = (*F)(t, nodes[i]);
      n2 += weights[i] * std::norm(f_samples[i]);
    }
    for (int m = 0; m < k; ++m) {
      const auto& phi = basis->samples(m);
      Complex s{};
      for (std::size_t i = 0; i < q; ++i) s += weights[i] * phi[i] * f_samples[i];
      projection(m) = s;
    }
    norm = std::sqrt(n2);
  }

  // y = (c, balance, forcing_l1).
  CVector rhs(double t, const CVector& y) const {
    CVector projection(k);
    double norm = 0.0;
    forcing(t, projection, norm);
    const CVector c = y.head(k);
    CVector out(k + 2);
    out.head(k) = propagator * c - Complex(0.0, 1.0) * (gram_inverse * projection);
    const Complex vx0 = trace.dot(c);
    double balance = 2.0 * c.dot(projection).imag();  // Eigen dot conjugates the first argument
    if (adjoint) balance -= std::norm(vx0);
    out(k) = balance;
    out(k + 1) = norm;
    return out;
  }
};

CVector rk4(const System& s, double t, const CVector& y, double h) {
  const CVector k1 = s.rhs(t, y);
  const CVector k2 = s.rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const CVector k3 = s.rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const CVector k4 = s.rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

GalerkinHistory galerkin_solve(const GalerkinBasis& basis, const FieldFn& F, double T, const Coefficients& coeffs,
                               int outputs, double tol) {
  require(T > 0.0 && outputs >= 1 && tol > 0.0, ErrorCode::kInvalidInput, "bad Galerkin run parameters");
  require(static_cast<bool>(F), ErrorCode::kInvalidInput, "Galerkin forcing is empty");
  const int k = basis.dimension();
  const bool adjoint = basis.variant() == GalerkinVariant::kOneCondition;

  System sys;
  sys.k = k;
  sys.adjoint = adjoint;
  sys.basis = &basis;
  sys.F = &F;
  sys.f_samples.resize(basis.nodes().size());
  sys.gram.resize(k, k);
  CMatrix K(k, k);
  const Complex i(0.0, 1.0);
  const double sign = adjoint ? 1.0 : -1.0;
  for (int m = 0; m < k; ++m) {
    for (int j = 0; j < k; ++j) {
      sys.gram(m, j) = basis.gram(m, j);
      K(m, j) = coeffs.a * basis.stiffness(2, m, j) + sign * i * coeffs.b * basis.stiffness(1, m, j) +
                sign * i * basis.stiffness(3, m, j);
    }
  }
  sys.gram_inverse = sys.gram.inverse();
  sys.propagator = i * (sys.gram_inverse.cast<Complex>() * K);
  sys.trace.resize(k);
  for (int j = 0; j < k; ++j) sys.trace(j) = basis.phi(j, 0.0, 1);

  GalerkinHistory history;
  history.variant = basis.variant();
  CVector y = CVector::Zero(k + 2);
  auto record = [&](double t) {
    history.t.push_back(t);
    std::vector<Complex> c(y.data(), y.data() + k);
    const CVector cv = y.head(k);
    history.norm2.push_back((cv.adjoint() * sys.gram.cast<Complex>() * cv)(0).real());
    history.balance.push_back(y(k).real());
    history.forcing_l1.push_back(y(k + 1).real());
    history.trace_x.push_back(sys.trace.cast<Complex>().dot(cv));
    history.c.push_back(std::move(c));
  };
  record(0.0);

  const double out_dt = T / outputs;
  double h = std::min(out_dt, 1e-3 * T);
  double t = 0.0;
  const double floor = 1e-12 * T;
  for (int n = 1; n <= outputs; ++n) {
    const double target = n * out_dt;
    while (t < target - 1e-14 * T) {
      const double step = std::min(h, target - t);
      const CVector full = rk4(sys, t, y, step);
      const CVector half = rk4(sys, t + 0.5 * step, rk4(sys, t, y, 0.5 * step), 0.5 * step);
      const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
      const double scale = std::max(1.0, half.cwiseAbs().maxCoeff());
      if (err <= tol * scale) {
        y = half + (half - full) / 15.0;
        t += step;
        ++history.accepted_steps;
      } else {
        ++history.rejected_steps;
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(tol * scale / err, 0.2) : 4.0;
      h = step * std::clamp(factor, 0.1, 4.0);
      if (h < floor || history.accepted_steps + history.rejected_steps > 2000000) {
        std::ostringstream msg;
        msg << "step size collapsed to " << h << " at t = " << t << "; reduce k or T";
        fail(ErrorCode::kStiffness, msg.str());
      }
    }
    t = target;
    record(t);
  }
  return history;
}

std::vector<double> galerkin_identity_residual(const GalerkinHistory& history) {
  std::vector<double> out(history.t.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = history.norm2[n] - history.balance[n];
  return out;
}

std::vector<double> adjoint_identity_residual(const GalerkinHistory& history) {
  require(history.variant == GalerkinVariant::kOneCondition, ErrorCode::kInvalidInput,
          "adjoint identity needs the one-condition variant");
  return galerkin_identity_residual(history);
}

}  // namespace hnls

#include <benchmark/benchmark.h>

#include <cmath>

#include "hnls/boundary.hpp"
#include "hnls/linear.hpp"
#include "hnls/nonlinearity.hpp"

namespace {

using hnls::Complex;

void BM_LinearStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const hnls::HalfLineGrid grid(40.0, n, 1.0, n / 40);
  const hnls::LinearStepOperator op(grid, hnls::Coefficients{1.0, 0.5});
  std::vector<Complex> u(grid.nodes()), next(grid.nodes()), g;
  for (int j = 0; j < grid.nodes(); ++j) u[j] = std::exp(-(grid.x(j) - 20.0) * (grid.x(j) - 20.0));
  for (auto _ : state) {
    op.step(u, g, Complex{}, next);
    benchmark::DoNotOptimize(next.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LinearStep)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_FindRoot(benchmark::State& state) {
  double lambda = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hnls::find_root(lambda, 1.0, 0.5));
    lambda = lambda < 1e4 ? lambda * 1.001 : 10.0;
  }
}
BENCHMARK(BM_FindRoot);

void BM_HnlsSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const hnls::HalfLineGrid grid(20.0, n, 0.25, n / 20);
  hnls::ProblemSpec spec;
  spec.coeffs = {1.0, 0.5, 1.0, 0.5, 0.0, 1.0};
  spec.initial = [](double x) { return Complex(std::exp(-(x - 10.0) * (x - 10.0))); };
  for (auto _ : state) {
    const auto sol = hnls::solve_hnls(spec, grid);
    benchmark::DoNotOptimize(sol.max_iterations());
  }
  state.counters["steps"] = grid.steps();
}
BENCHMARK(BM_HnlsSolve)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

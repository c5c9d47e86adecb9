#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>

#include "hnls/boundary.hpp"
#include "hnls/diagnostics.hpp"
#include "hnls/error.hpp"
#include "hnls/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitResidual = 2;
constexpr int kExitRejected = 3;

using nlohmann::json;

int run_verb(const std::string& path, const std::string& output) {
  hnls::ScenarioConfig config = hnls::load_config(path);
  if (!output.empty()) config.output_dir = output;
  const hnls::RunRecord record = hnls::run_scenario(config);
  std::printf("%s: %d levels, max iterations %d, solve %.2fs\n", config.name.c_str(),
              static_cast<int>(record.series.size()), record.max_iterations, record.solve_seconds);
  for (const auto& d : record.diagnostics) {
    std::printf("  %-12s %.3e  limit %.3e  %s\n", d.name.c_str(), d.max_residual, d.limit,
                d.passed ? "ok" : "EXCEEDED");
  }
  if (!config.output_dir.empty()) std::printf("  wrote %s\n", config.output_dir.string().c_str());
  return record.passed() ? kExitOk : kExitResidual;
}

int converge_verb(const std::string& path, int levels, const std::string& output) {
  hnls::ScenarioConfig config = hnls::load_config(path);
  if (!output.empty()) config.output_dir = output;
  const hnls::ConvergenceTable table = hnls::convergence_table(config, levels);
  std::printf("%s (oracle: %s)\n%12s %12s %12s %8s\n", config.name.c_str(), table.oracle.c_str(), "dx", "dt", "error",
              "order");
  for (const auto& r : table.rows) {
    std::printf("%12.4e %12.4e %12.4e ", r.dx, r.dt, r.error);
    if (r.saturated) std::printf("%8s\n", "sat");
    else if (r.order) std::printf("%8.3f\n", *r.order);
    else std::printf("%8s\n", "-");
  }
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    std::ofstream(config.output_dir / "convergence.csv") << hnls::convergence_csv(table);
    std::ofstream(config.output_dir / "convergence.json") << hnls::convergence_json(table, config);
  }
  if (table.non_monotone) {
    std::fprintf(stderr, "errors are not monotone under refinement (tail contamination suspected)\n");
    return kExitResidual;
  }
  return kExitOk;
}

int calibrate_verb(double a, double b) {
  const hnls::Lambda0Calibration cal = hnls::calibrate_lambda0(a, b);
  std::cout << json{{"a", cal.a}, {"b", cal.b}, {"lambda0", cal.lambda0}, {"eps", cal.eps}}.dump(2) << "\n";
  return kExitOk;
}

double parse_q(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

int probe_verb(const std::vector<std::string>& qs, int count, std::uint64_t seed, const std::string& psi1,
               const std::string& psi2, double x_max, int points) {
  const auto family = hnls::damped_wave_family(count, seed);
  const auto w1 = hnls::WeightSpec::parse(psi1);
  const auto w2 = hnls::WeightSpec::parse(psi2);
  json rows = json::array();
  bool stable = true;
  for (const auto& qs_item : qs) {
    const double q = parse_q(qs_item);
    const auto coarse = hnls::interpolation_probe(family, w1, w2, q, x_max, points);
    const auto fine = hnls::interpolation_probe(family, w1, w2, q, x_max, 2 * points - 1);
    const double change = std::abs(fine.max_ratio - coarse.max_ratio) / std::max(coarse.max_ratio, 1e-300);
    stable = stable && std::isfinite(coarse.max_ratio) && change < 0.1;
    rows.push_back({{"q", qs_item}, {"s", coarse.s}, {"max_ratio", coarse.max_ratio},
                    {"max_ratio_refined", fine.max_ratio}, {"relative_change", change}});
  }
  std::cout << json{{"psi1", psi1}, {"psi2", psi2}, {"count", count}, {"seed", seed}, {"probes", rows}}.dump(2)
            << "\n";
  return stable ? kExitOk : kExitResidual;
}

int depend_verb(const std::string& path, const std::string& spec, const std::vector<double>& eps) {
  const hnls::ScenarioConfig config = hnls::load_config(path);
  std::vector<hnls::Perturbation> perturbations;
  std::string item;
  std::istringstream in(spec);
  while (std::getline(in, item, ',')) {
    if (item == "u0") {
      perturbations.push_back(
          hnls::Perturbation::initial_shape([](double x) { return hnls::Complex(x * std::exp(-x), 0.0); }));
    } else if (item == "mu") {
      perturbations.push_back(hnls::Perturbation::boundary_shape(hnls::BoundarySignal::modes({{1.0, 3.0}, {-1.0, 0.0}})));
    } else if (item == "f") {
      perturbations.push_back(hnls::Perturbation::source_shape(hnls::Source(
          [](double t, double x) { return hnls::Complex(std::sin(2.0 * t) * std::exp(-(x - 3.0) * (x - 3.0)), 0.0); })));
    } else {
      hnls::fail(hnls::ErrorCode::kConfigRejected, "unknown perturbation '" + item + "' (expected u0, mu or f)");
    }
  }
  if (perturbations.empty()) hnls::fail(hnls::ErrorCode::kConfigRejected, "--perturb lists nothing");
  const auto experiment = hnls::continuous_dependence_experiment(config.problem(), config.grid(), perturbations,
                                                                 config.weight, eps, config.solve_options());
  std::printf("%-4s %8s %12s %12s %10s\n", "kind", "eps", "data", "solution", "ratio");
  for (const auto& r : experiment.rows) {
    std::printf("%-4s %8.0e %12.4e %12.4e %10.4f\n", hnls::to_string(r.kind).c_str(), r.eps, r.data_distance,
                r.solution_distance, r.ratio);
  }
  bool ok = true;
  for (std::size_t k = 0; k < experiment.spread.size(); ++k) {
    std::printf("spread %s: %.4f\n", hnls::to_string(perturbations[k].kind).c_str(), experiment.spread[k]);
    ok = ok && experiment.spread[k] < 5.0;
  }
  return ok ? kExitOk : kExitResidual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-line higher-order NLS solver and diagnostics"};
  app.require_subcommand(1);

  std::string config_path, output;
  int levels = 3;
  auto* run = app.add_subcommand("run", "solve a scenario and evaluate its diagnostics");
  run->add_option("config", config_path, "scenario file")->required();
  run->add_option("--output", output, "override output_dir");

  auto* converge = app.add_subcommand("converge", "dyadic refinement study against the scenario oracle");
  converge->add_option("config", config_path, "scenario file")->required();
  converge->add_option("--levels", levels, "number of grids")->check(CLI::Range(2, 8));
  converge->add_option("--output", output, "override output_dir");

  double a = 0.0, b = 0.0;
  auto* calibrate = app.add_subcommand("calibrate-lambda0", "cutoff frequency and decay margin for (a, b)");
  calibrate->add_option("--a", a)->required();
  calibrate->add_option("--b", b)->required();

  std::vector<std::string> qs{"4", "inf"};
  int count = 100, points = 4000;
  std::uint64_t seed = 20240601;
  std::string psi1 = "exp:0.5", psi2 = "one";
  double x_max = 40.0;
  auto* probe = app.add_subcommand("probe-interpolation", "empirical constant of the weighted interpolation inequality");
  probe->add_option("--q", qs, "exponents (number or inf)");
  probe->add_option("--count", count)->check(CLI::PositiveNumber);
  probe->add_option("--seed", seed);
  probe->add_option("--psi1", psi1);
  probe->add_option("--psi2", psi2);
  probe->add_option("--x-max", x_max);
  probe->add_option("--points", points)->check(CLI::Range(3, 1 << 22));

  std::string perturb = "u0,mu,f";
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  auto* depend = app.add_subcommand("depend", "continuous-dependence sweep");
  depend->add_option("config", config_path, "scenario file")->required();
  depend->add_option("--perturb", perturb, "comma list of u0, mu, f");
  depend->add_option("--eps", eps, "perturbation sizes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_verb(config_path, output);
    if (*converge) return converge_verb(config_path, levels, output);
    if (*calibrate) return calibrate_verb(a, b);
    if (*probe) return probe_verb(qs, count, seed, psi1, psi2, x_max, points);
    if (*depend) return depend_verb(config_path, perturb, eps);
  } catch (const hnls::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case hnls::ErrorCode::kConfigRejected: return kExitRejected;
      case hnls::ErrorCode::kTailContamination: return kExitResidual;
      default: return kExitFailure;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

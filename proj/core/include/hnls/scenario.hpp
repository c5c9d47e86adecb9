#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hnls/diagnostics.hpp"
#include "hnls/nonlinearity.hpp"
#include "hnls/problem.hpp"
#include "hnls/weight.hpp"

namespace hnls {

/// Closed-form travelling profile A e^{i omega t} P(x - x0) used to
/// manufacture source, initial and boundary data.
struct ExactProfile {
  enum class Shape { kSech, kGaussian };
  Shape shape = Shape::kSech;
  double amplitude = 1.0;
  double center = 3.0;
  double width = 1.0;
  double omega = 1.0;

  /// d^order/dx^order P at y = x - x0, order 0..3.
  double profile(double y, int order) const;
  Complex operator()(double t, double x) const;
  /// Source making this profile an exact solution of the full equation.
  Source source(const Coefficients& coeffs) const;
};

/// Parsed scenario file. Values are kept verbatim in `entries` for the audit
/// snapshot; the typed fields below are derived from them.
struct ScenarioConfig {
  std::string name = "scenario";
  Coefficients coeffs;
  WeightSpec weight = WeightSpec::one();
  double length = 20.0;
  int cells = 512;
  double horizon = 1.0;
  int steps = 0;
  double h = 1e-3;
  double tol = 1e-10;
  int max_iter = 50;
  std::optional<double> lambda0;
  double tail_threshold = 1e-8;
  double threshold = 1e-2;
  BoundaryMode boundary_mode = BoundaryMode::kAuto;
  std::string initial = "zero";
  std::string boundary = "zero";
  std::string source = "zero";
  std::optional<ExactProfile> exact;
  std::vector<std::string> diagnostics;
  std::filesystem::path output_dir;
  /// Directory of the config file; relative file references resolve here.
  std::filesystem::path base_dir;
  std::map<std::string, std::string> entries;

  HalfLineGrid grid() const;
  /// Same scenario at 2^level times the resolution in x and t.
  ScenarioConfig refined(int level) const;
  ProblemSpec problem() const;
  SolveOptions solve_options() const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys, malformed
/// values and regime violations throw config-rejected.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Regime gates: nonzero boundary data needs p = 1 and gamma = 0; the
/// dependence diagnostic needs p in [1, 2] and the uniqueness condition.
void validate_config(const ScenarioConfig& config);

/// Diagnostic names accepted in `diagnostics =`.
const std::vector<std::string>& known_diagnostics();

struct SeriesRow {
  double t = 0.0;
  double l2 = 0.0;
  double wl2 = 0.0;
  double flux = 0.0;
  std::optional<double> e_ident;
  std::optional<double> nl_energy;
  std::optional<double> gamma_term;
  int iters = 0;
};

struct DiagnosticSummary {
  std::string name;
  double max_residual = 0.0;
  double limit = 0.0;
  bool passed = true;
};

struct RunRecord {
  ScenarioConfig config;
  std::vector<SeriesRow> series;
  std::vector<DiagnosticSummary> diagnostics;
  int max_iterations = 0;
  bool regularization_active = false;
  std::optional<double> lambda0;
  double solve_seconds = 0.0;
  double diagnostics_seconds = 0.0;
  /// Final-slice field, kept for callers that compare runs.
  std::vector<Complex> final_slice;

  bool passed() const;
};

/// Solve, diagnose, and (when output_dir is set) write series.csv and
/// report.json into output_dir.
RunRecord run_scenario(const ScenarioConfig& config);

struct ConvergenceRow {
  double dx = 0.0;
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> order;
  bool saturated = false;
  int max_iterations = 0;
};

struct ConvergenceTable {
  std::string oracle;
  std::vector<ConvergenceRow> rows;
  /// Errors failed to decrease between two non-saturated levels.
  bool non_monotone = false;
};

/// `levels` dyadic refinements starting at the configured grid; the error is
/// the L2 distance at t = T to the manufactured profile or, for linear runs
/// with zero boundary data and source, to the full-line Fourier solution.
ConvergenceTable convergence_table(const ScenarioConfig& config, int levels);

std::string series_csv(const std::vector<SeriesRow>& series);
std::string report_json(const RunRecord& record);
std::string convergence_csv(const ConvergenceTable& table);
std::string convergence_json(const ConvergenceTable& table, const ScenarioConfig& config);

}  // namespace hnls

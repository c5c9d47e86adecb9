#include "hnls/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>

#include "hnls/error.hpp"
#include "hnls/fourier_oracle.hpp"
#include "hnls/linear.hpp"
#include "hnls/norms.hpp"
#include "hnls/stencils.hpp"

namespace hnls {

using nlohmann::json;

double ExactProfile::profile(double y, int order) const {
  const double z = y / width;
  const double scale = std::pow(width, -order);
  if (shape == Shape::kGaussian) {
    const double e = std::exp(-z * z);
    switch (order) {
      case 0: return e;
      case 1: return -2.0 * z * e * scale;
      case 2: return (4.0 * z * z - 2.0) * e * scale;
      default: return (-8.0 * z * z * z + 12.0 * z) * e * scale;
    }
  }
  const double s = 1.0 / std::cosh(z);
  const double th = std::tanh(z);
  switch (order) {
    case 0: return s;
    case 1: return -s * th * scale;
    case 2: return s * (1.0 - 2.0 * s * s) * scale;
    default: return -s * th * (1.0 - 6.0 * s * s) * scale;
  }
}

Complex ExactProfile::operator()(double t, double x) const {
  return amplitude * std::exp(Complex(0.0, omega * t)) * profile(x - center, 0);
}

Source ExactProfile::source(const Coefficients& c) const {
  const ExactProfile self = *this;
  return Source([self, c](double t, double x) {
    const double y = x - self.center;
    const double P = self.profile(y, 0), P1 = self.profile(y, 1), P2 = self.profile(y, 2), P3 = self.profile(y, 3);
    const double A = self.amplitude;
    const Complex i(0.0, 1.0);
    Complex value = A * (-self.omega * P + c.a * P2 + i * c.b * P1 + i * P3);
    if (!c.is_linear()) {
      // P > 0, so |u|^p = |A|^p P^p.
      const double gp = std::pow(std::abs(A) * P, c.p);
      value += A * gp * (c.lambda * P + i * (c.beta * (c.p + 1.0) + c.gamma * c.p) * P1);
    }
    return std::exp(Complex(0.0, self.omega * t)) * value;
  });
}

namespace {

[[noreturn]] void reject(const std::string& message) { fail(ErrorCode::kConfigRejected, message); }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    reject("key '" + key + "': '" + value + "' is not a number");
  }
  if (used != value.size() || !std::isfinite(v)) reject("key '" + key + "': '" + value + "' is not a number");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9) reject("key '" + key + "': '" + value + "' is not an integer");
  return static_cast<int>(v);
}

Complex to_complex(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  Complex c;
  in >> c;
  if (!in || !(in >> std::ws).eof()) reject("key '" + key + "': '" + value + "' is not a complex number");
  return c;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "name",      "a",          "b",         "lambda",         "beta",           "gamma",        "p",
      "weight",    "L",          "N",         "T",              "M",              "h",            "tol",
      "max_iter",  "lambda0",    "tail_threshold", "threshold", "boundary_mode",  "initial",      "boundary",
      "source",    "exact",      "exact_amplitude", "exact_center", "exact_width", "exact_omega", "diagnostics",
      "output_dir"};
  return keys;
}

// Whitespace-separated numeric rows; '#' lines skipped.
std::vector<std::vector<double>> read_table(const std::filesystem::path& path, std::size_t min_cols) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open data file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.size() < min_cols) fail(ErrorCode::kIo, "malformed row in " + path.string() + ": '" + line + "'");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) fail(ErrorCode::kIo, "data file " + path.string() + " needs at least two rows");
  return rows;
}

Complex row_value(const std::vector<double>& row, std::size_t col) {
  return {row[col], row.size() > col + 1 ? row[col + 1] : 0.0};
}

std::filesystem::path resolve(const ScenarioConfig& c, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() || c.base_dir.empty() ? p : c.base_dir / p;
}

ProfileFn parse_initial(const ScenarioConfig& c) {
  const std::string& v = c.initial;
  if (v == "zero") return [](double) { return Complex{}; };
  const auto colon = v.find(':');
  const std::string head = v.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : v.substr(colon + 1);
  if (head == "gaussian" || head == "sech") {
    const auto parts = split(tail, ',');
    if (parts.size() != 3) reject("initial '" + v + "': expected " + head + ":amplitude,center,width");
    ExactProfile shape;
    shape.shape = head == "gaussian" ? ExactProfile::Shape::kGaussian : ExactProfile::Shape::kSech;
    shape.amplitude = to_double("initial", parts[0]);
    shape.center = to_double("initial", parts[1]);
    shape.width = to_double("initial", parts[2]);
    if (shape.width <= 0.0) reject("initial width must be positive");
    shape.omega = 0.0;
    return [shape](double x) { return shape(0.0, x); };
  }
  if (head == "file") {
    const auto rows = read_table(resolve(c, tail), 2);
    return [rows](double x) {
      if (x < rows.front()[0] || x > rows.back()[0]) return Complex{};
      const auto it = std::lower_bound(rows.begin(), rows.end(), x,
                                       [](const std::vector<double>& r, double v) { return r[0] < v; });
      if (it == rows.begin()) return row_value(*it, 1);
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (x - lo[0]) / (hi[0] - lo[0]);
      return (1.0 - w) * row_value(lo, 1) + w * row_value(hi, 1);
    };
  }
  reject("initial '" + v + "': expected zero, gaussian:..., sech:... or file:PATH");
}

BoundarySignal parse_boundary(const ScenarioConfig& c) {
  const std::string& v = c.boundary;
  if (v == "zero") return BoundarySignal::zero();
  const auto colon = v.find(':');
  const std::string head = v.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : v.substr(colon + 1);
  if (head == "modes") {
    std::vector<BoundarySignal::Mode> modes;
    for (const auto& item : split(tail, ';')) {
      const auto at = item.find('@');
      if (at == std::string::npos) reject("boundary mode '" + item + "': expected AMPLITUDE@FREQUENCY");
      modes.push_back({to_complex("boundary", trim(item.substr(0, at))), to_double("boundary", trim(item.substr(at + 1)))});
    }
    if (modes.empty()) reject("boundary '" + v + "' lists no modes");
    return BoundarySignal::modes(std::move(modes));
  }
  if (head == "file") {
    const auto rows = read_table(resolve(c, tail), 2);
    const double spacing = rows[1][0] - rows[0][0];
    if (rows[0][0] != 0.0 || spacing <= 0.0) reject("boundary file must start at t = 0 with increasing times");
    std::vector<Complex> values;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (std::abs(rows[k][0] - k * spacing) > 1e-9 * std::max(1.0, spacing * k)) {
        reject("boundary file samples must be uniformly spaced");
      }
      values.push_back(row_value(rows[k], 1));
    }
    return BoundarySignal::samples(spacing, std::move(values));
  }
  reject("boundary '" + v + "': expected zero, modes:A@W;... or file:PATH");
}

Source parse_source(const ScenarioConfig& c) {
  const std::string& v = c.source;
  if (v == "zero") return {};
  if (v == "manufactured") return c.exact->source(c.coeffs);
  if (v.rfind("file:", 0) == 0) {
    // Columns t x re [im] on a full tensor lattice.
    const auto rows = read_table(resolve(c, v.substr(5)), 3);
    std::set<double> ts, xs;
    for (const auto& r : rows) {
      ts.insert(r[0]);
      xs.insert(r[1]);
    }
    const std::vector<double> tv(ts.begin(), ts.end()), xv(xs.begin(), xs.end());
    if (tv.size() < 2 || xv.size() < 2 || rows.size() != tv.size() * xv.size()) {
      reject("source file must hold a full (t, x) lattice");
    }
    std::vector<Complex> grid(rows.size());
    for (const auto& r : rows) {
      const auto ti = std::lower_bound(tv.begin(), tv.end(), r[0]) - tv.begin();
      const auto xi = std::lower_bound(xv.begin(), xv.end(), r[1]) - xv.begin();
      grid[ti * xv.size() + xi] = row_value(r, 2);
    }
    return Source([tv, xv, grid](double t, double x) {
      if (x < xv.front() || x > xv.back()) return Complex{};
      const auto locate = [](const std::vector<double>& axis, double s, std::size_t& k, double& w) {
        s = std::clamp(s, axis.front(), axis.back());
        k = std::min<std::size_t>(std::upper_bound(axis.begin(), axis.end(), s) - axis.begin(), axis.size() - 1) - 1;
        w = (s - axis[k]) / (axis[k + 1] - axis[k]);
      };
      std::size_t tk, xk;
      double tw, xw;
      locate(tv, t, tk, tw);
      locate(xv, x, xk, xw);
      const std::size_t n = xv.size();
      const auto at = [&](std::size_t a, std::size_t b) { return grid[a * n + b]; };
      return (1.0 - tw) * ((1.0 - xw) * at(tk, xk) + xw * at(tk, xk + 1)) +
             tw * ((1.0 - xw) * at(tk + 1, xk) + xw * at(tk + 1, xk + 1));
    });
  }
  reject("source '" + v + "': expected zero, manufactured or file:PATH");
}

}  // namespace

const std::vector<std::string>& known_diagnostics() {
  static const std::vector<std::string> names{"l2_balance", "energy", "energy_nl", "weak_form",
                                              "oracle",     "sigma_plus", "dependence"};
  return names;
}

HalfLineGrid ScenarioConfig::grid() const {
  const int m = steps > 0 ? steps : std::max(1, static_cast<int>(std::lround(horizon * cells / length)));
  return HalfLineGrid(length, cells, horizon, m);
}

ScenarioConfig ScenarioConfig::refined(int level) const {
  ScenarioConfig c = *this;
  const int m = grid().steps();
  c.cells = cells << level;
  c.steps = m << level;
  return c;
}

ProblemSpec ScenarioConfig::problem() const {
  ProblemSpec spec;
  spec.coeffs = coeffs;
  if (exact) {
    const ExactProfile e = *exact;
    spec.initial = [e](double x) { return e(0.0, x); };
    spec.boundary = BoundarySignal::modes({{e.amplitude * e.profile(-e.center, 0), e.omega}});
  } else {
    spec.initial = parse_initial(*this);
    spec.boundary = parse_boundary(*this);
  }
  spec.source = parse_source(*this);
  return spec;
}

SolveOptions ScenarioConfig::solve_options() const {
  SolveOptions o;
  o.h = h;
  o.control.tol = tol;
  o.control.max_iter = max_iter;
  o.control.weight = weight;
  o.boundary = boundary_mode;
  o.lambda0 = lambda0;
  o.tail_threshold = tail_threshold;
  return o;
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  c.base_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) reject("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) reject("line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (c.entries.count(key)) reject("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    c.entries[key] = value;
  }

  const auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = c.entries.find(key);
    if (it == c.entries.end()) return std::nullopt;
    return it->second;
  };
  const auto number_of = [&](const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? to_double(key, *v) : fallback;
  };

  if (auto v = get("name")) c.name = *v;
  c.coeffs.a = number_of("a", 0.0);
  c.coeffs.b = number_of("b", 0.0);
  c.coeffs.lambda = number_of("lambda", 0.0);
  c.coeffs.beta = number_of("beta", 0.0);
  c.coeffs.gamma = number_of("gamma", 0.0);
  c.coeffs.p = number_of("p", 1.0);
  if (auto v = get("weight")) {
    try {
      c.weight = WeightSpec::parse(*v);
    } catch (const Error& e) {
      reject(std::string("weight: ") + e.what());
    }
  }
  c.length = number_of("L", c.length);
  if (auto v = get("N")) c.cells = to_int("N", *v);
  c.horizon = number_of("T", c.horizon);
  if (auto v = get("M")) c.steps = to_int("M", *v);
  c.h = number_of("h", c.h);
  c.tol = number_of("tol", c.tol);
  if (auto v = get("max_iter")) c.max_iter = to_int("max_iter", *v);
  if (auto v = get("lambda0")) c.lambda0 = to_double("lambda0", *v);
  c.tail_threshold = number_of("tail_threshold", c.tail_threshold);
  c.threshold = number_of("threshold", c.threshold);
  if (auto v = get("boundary_mode")) {
    if (*v == "auto") c.boundary_mode = BoundaryMode::kAuto;
    else if (*v == "lifting") c.boundary_mode = BoundaryMode::kLifting;
    else if (*v == "direct") c.boundary_mode = BoundaryMode::kDirect;
    else reject("boundary_mode must be auto, lifting or direct");
  }
  if (auto v = get("initial")) c.initial = *v;
  if (auto v = get("boundary")) c.boundary = *v;
  if (auto v = get("source")) c.source = *v;
  if (auto v = get("diagnostics")) {
    c.diagnostics = split(*v, ',');
    for (const auto& d : c.diagnostics) {
      const auto& names = known_diagnostics();
      if (std::find(names.begin(), names.end(), d) == names.end()) reject("unknown diagnostic '" + d + "'");
    }
  }
  if (auto v = get("output_dir")) {
    c.output_dir = *v;
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  }

  const bool exact_keys = get("exact") || get("exact_amplitude") || get("exact_center") || get("exact_width") ||
                          get("exact_omega");
  if (c.source == "manufactured") {
    if (get("initial") || get("boundary")) {
      reject("manufactured scenarios derive initial and boundary data from the exact profile; drop those keys");
    }
    ExactProfile e;
    const std::string shape = get("exact").value_or("sech");
    if (shape == "sech") e.shape = ExactProfile::Shape::kSech;
    else if (shape == "gaussian") e.shape = ExactProfile::Shape::kGaussian;
    else reject("exact must be sech or gaussian");
    e.amplitude = number_of("exact_amplitude", e.amplitude);
    e.center = number_of("exact_center", e.center);
    e.width = number_of("exact_width", e.width);
    e.omega = number_of("exact_omega", e.omega);
    if (e.width <= 0.0) reject("exact_width must be positive");
    c.exact = e;
  } else if (exact_keys) {
    reject("exact_* keys are only meaningful with source = manufactured");
  }
  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

void validate_config(const ScenarioConfig& c) {
  if (!(c.length > 0.0 && c.horizon > 0.0 && c.cells >= 8)) reject("grid needs L > 0, T > 0 and N >= 8");
  if (c.steps < 0) reject("M must be positive");
  if (!(c.h > 0.0 && c.h <= 1.0)) reject("h must lie in (0, 1]");
  if (!(c.tol > 0.0) || c.max_iter < 1) reject("tol must be positive and max_iter >= 1");
  if (!(c.threshold > 0.0)) reject("threshold must be positive");
  if (!(c.coeffs.p >= 1.0)) reject("p must satisfy p >= 1");
  const bool has_boundary = c.exact ? c.exact->profile(-c.exact->center, 0) != 0.0 : c.boundary != "zero";
  if (has_boundary && (c.coeffs.p != 1.0 || c.coeffs.gamma != 0.0)) {
    reject("nonzero boundary data requires p = 1 and gamma = 0 (the only regime with a well-posed nonhomogeneous problem)");
  }
  const auto wants = [&](const char* name) {
    return std::find(c.diagnostics.begin(), c.diagnostics.end(), name) != c.diagnostics.end();
  };
  if (wants("energy_nl") && c.coeffs.beta + c.coeffs.gamma == 0.0) {
    reject("energy_nl needs beta + gamma != 0 (the energy functional is undefined otherwise)");
  }
  if (wants("energy") && (!c.coeffs.is_linear() || has_boundary)) {
    reject("the weighted energy identity applies to linear runs with zero boundary data");
  }
  if (wants("dependence")) {
    if (c.coeffs.p > 2.0) reject("dependence needs p in [1, 2] (the regime where uniqueness holds)");
    const auto samples = log_spaced_samples(c.length, 64);
    if (!check_uniqueness_condition(c.weight, c.coeffs.p, samples, 1e-12).ok) {
      reject("dependence needs (psi')^(p+2) psi^(p-2) >= c0 > 0 for weight " + c.weight.code());
    }
  }
}

namespace {

struct Oracle {
  std::string name;
  std::vector<Complex> values;
};

std::optional<Oracle> final_oracle(const ScenarioConfig& c, const ProblemSpec& spec, const HalfLineGrid& grid) {
  std::vector<Complex> values(grid.nodes());
  if (c.exact) {
    for (int j = 0; j < grid.nodes(); ++j) values[j] = (*c.exact)(grid.horizon(), grid.x(j));
    return Oracle{"manufactured", values};
  }
  if (c.coeffs.is_linear() && spec.boundary.is_zero() && grid.cells() % 2 == 0) {
    const PeriodicBox box = PeriodicBox::around(grid);
    const auto full = fullline_solution(box, c.coeffs, spec.initial, grid.horizon(), spec.source,
                                        spec.source.is_zero() ? 0 : grid.steps());
    for (int j = 0; j < grid.nodes(); ++j) values[j] = full[box.offset() + j];
    return Oracle{"fourier", values};
  }
  return std::nullopt;
}

double distance(std::span<const Complex> a, std::span<const Complex> b, double dx) {
  std::vector<Complex> d(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) d[j] = a[j] - b[j];
  return l2_norm(d, dx);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

bool RunRecord::passed() const {
  return std::all_of(diagnostics.begin(), diagnostics.end(), [](const DiagnosticSummary& d) { return d.passed; });
}

RunRecord run_scenario(const ScenarioConfig& config) {
  validate_config(config);
  RunRecord record;
  record.config = config;
  const HalfLineGrid grid = config.grid();
  const ProblemSpec spec = config.problem();

  auto start = std::chrono::steady_clock::now();
  const HnlsSolution solution = solve_hnls(spec, grid, config.solve_options());
  record.solve_seconds = seconds_since(start);
  record.max_iterations = solution.max_iterations();
  record.regularization_active = solution.regularization_active();
  if (solution.lifting) record.lambda0 = solution.lifting->lambda0();
  const FieldHistory& u = solution.u;
  const auto last = u.slice(u.levels() - 1);
  record.final_slice.assign(last.begin(), last.end());

  start = std::chrono::steady_clock::now();
  const RegularizedNonlinearity reg(config.h, config.coeffs.p);
  const auto balance = u.levels() >= 3 ? l2_balance_residual(u, spec, &reg) : std::vector<double>{};
  std::optional<EnergyIdentitySeries> energy;
  if (config.coeffs.beta + config.coeffs.gamma != 0.0 && u.levels() >= 3) {
    energy = energy_identity_residual_nl(u, config.coeffs);
  }
  double mass_scale = 1.0;
  double weighted_scale = 1.0;
  for (int n = 0; n < u.levels(); ++n) {
    SeriesRow row;
    const auto un = u.slice(n);
    row.t = grid.t(n);
    row.l2 = l2_norm(un, grid.dx());
    row.wl2 = weighted_l2_norm(un, grid, config.weight);
    row.flux = std::norm(boundary_derivative1<Complex>(un, grid.dx()));
    if (n >= 1 && n + 1 < u.levels()) row.e_ident = balance[n - 1];
    if (energy) {
      row.nl_energy = energy->energy[n];
      row.gamma_term = energy->gamma_term[n];
    }
    row.iters = n == 0 ? 0 : solution.logs[n - 1].iterations;
    mass_scale = std::max(mass_scale, row.l2 * row.l2);
    weighted_scale = std::max(weighted_scale, row.wl2 * row.wl2);
    record.series.push_back(row);
  }

  const double threshold = config.threshold;
  for (const auto& name : config.diagnostics) {
    DiagnosticSummary d;
    d.name = name;
    if (name == "l2_balance") {
      d.max_residual = max_abs(balance);
      d.limit = threshold * mass_scale;
    } else if (name == "energy") {
      std::optional<FieldHistory> f0;
      if (!spec.source.is_zero()) f0 = FieldHistory::sample(grid, [&spec](double t, double x) { return spec.source(t, x); });
      d.max_residual = max_abs(energy_identity_residual(u, {}, config.weight, config.coeffs, f0 ? &*f0 : nullptr));
      d.limit = threshold * weighted_scale;
    } else if (name == "energy_nl") {
      double scale = 1.0;
      for (std::size_t n = 0; n < energy->energy.size(); ++n) {
        scale = std::max({scale, std::abs(energy->energy[n]), std::abs(energy->gamma_term[n])});
      }
      d.max_residual = max_abs(energy->residual);
      d.limit = threshold * scale;
    } else if (name == "weak_form") {
      d.max_residual = max_abs(weak_form_residual(u, spec, default_test_family(grid.horizon())));
      d.limit = threshold * std::sqrt(mass_scale);
    } else if (name == "oracle") {
      const auto oracle = final_oracle(config, spec, grid);
      if (!oracle) reject("oracle diagnostic needs a manufactured source or a linear run without boundary data");
      d.max_residual = distance(last, oracle->values, grid.dx());
      d.limit = threshold * std::max(1.0, l2_norm(oracle->values, grid.dx()));
    } else if (name == "sigma_plus") {
      d.max_residual = sigma_plus(u).value;
      d.limit = std::numeric_limits<double>::infinity();
    } else if (name == "dependence") {
      const auto shape = Perturbation::initial_shape([](double x) { return Complex(x * std::exp(-x), 0.0); });
      const auto exp = continuous_dependence_experiment(spec, grid, {shape}, config.weight, {1e-1, 1e-2, 1e-3},
                                                        config.solve_options());
      d.max_residual = exp.spread.front();
      d.limit = 5.0;
    }
    d.passed = d.max_residual <= d.limit;
    record.diagnostics.push_back(d);
  }
  record.diagnostics_seconds = seconds_since(start);

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    std::ofstream(config.output_dir / "series.csv") << series_csv(record.series);
    std::ofstream(config.output_dir / "report.json") << report_json(record);
  }
  return record;
}

ConvergenceTable convergence_table(const ScenarioConfig& config, int levels) {
  validate_config(config);
  if (levels < 2) fail(ErrorCode::kInvalidInput, "convergence needs at least 2 levels");

  struct Level {
    double error;
    double scale;
    int iterations;
    std::string oracle;
  };
  std::vector<std::future<Level>> pending;
  for (int k = 0; k < levels; ++k) {
    pending.push_back(std::async(std::launch::async, [config, k]() {
      const ScenarioConfig c = config.refined(k);
      const HalfLineGrid grid = c.grid();
      const ProblemSpec spec = c.problem();
      const auto oracle = final_oracle(c, spec, grid);
      if (!oracle) fail(ErrorCode::kInvalidInput, "convergence needs a manufactured or Fourier oracle");
      const HnlsSolution sol = solve_hnls(spec, grid, c.solve_options());
      const auto last = sol.u.slice(sol.u.levels() - 1);
      return Level{distance(last, oracle->values, grid.dx()), l2_norm(oracle->values, grid.dx()),
                   sol.max_iterations(), oracle->name};
    }));
  }

  ConvergenceTable table;
  for (int k = 0; k < levels; ++k) {
    const Level level = pending[k].get();
    table.oracle = level.oracle;
    const HalfLineGrid grid = config.refined(k).grid();
    ConvergenceRow row;
    row.dx = grid.dx();
    row.dt = grid.dt();
    row.error = level.error;
    row.max_iterations = level.iterations;
    row.saturated = level.error <= 1e-12 * std::max(1.0, level.scale);
    if (k > 0) {
      const ConvergenceRow& prev = table.rows.back();
      if (!row.saturated && !prev.saturated) {
        row.order = std::log2(prev.error / row.error);
        if (row.error >= prev.error) table.non_monotone = true;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

namespace {

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string series_csv(const std::vector<SeriesRow>& series) {
  std::string out = "t,l2,wl2,flux,e_ident,nl_energy,gamma_term,iters\n";
  for (const auto& r : series) {
    out += num(r.t) + ',' + num(r.l2) + ',' + num(r.wl2) + ',' + num(r.flux) + ',' + num(r.e_ident) + ',' +
           num(r.nl_energy) + ',' + num(r.gamma_term) + ',' + std::to_string(r.iters) + '\n';
  }
  return out;
}

std::string report_json(const RunRecord& r) {
  const HalfLineGrid grid = r.config.grid();
  json doc;
  doc["scenario"] = r.config.name;
  doc["config"] = r.config.entries;
  doc["grid"] = {{"L", grid.length()}, {"N", grid.cells()}, {"T", grid.horizon()}, {"M", grid.steps()}};
  json t = json::array(), res = json::array();
  for (const auto& row : r.series) {
    t.push_back(row.t);
    res.push_back(nullable(row.e_ident));
  }
  doc["series"] = {{"t", t}, {"residuals", res}};
  double worst = 0.0;
  json checks = json::array();
  for (const auto& d : r.diagnostics) {
    if (std::isfinite(d.limit)) worst = std::max(worst, d.max_residual);
    checks.push_back({{"name", d.name},
                      {"max_residual", d.max_residual},
                      {"limit", std::isfinite(d.limit) ? json(d.limit) : json(nullptr)},
                      {"passed", d.passed}});
  }
  doc["summary"] = {{"max_residual", worst},
                    {"convergence_order", nullptr},
                    {"ratios", json::array()},
                    {"checks", checks},
                    {"passed", r.passed()}};
  doc["solver"] = {{"max_iterations", r.max_iterations},
                   {"regularization_active", r.regularization_active},
                   {"lambda0", nullable(r.lambda0)}};
  doc["timings"] = {{"solve_seconds", r.solve_seconds}, {"diagnostics_seconds", r.diagnostics_seconds}};
  return doc.dump(2) + "\n";
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::string out = "dx,dt,error,order,saturated,max_iterations\n";
  for (const auto& r : table.rows) {
    out += num(r.dx) + ',' + num(r.dt) + ',' + num(r.error) + ',' + num(r.order) + ',' +
           (r.saturated ? "1" : "0") + ',' + std::to_string(r.max_iterations) + '\n';
  }
  return out;
}

std::string convergence_json(const ConvergenceTable& table, const ScenarioConfig& config) {
  json rows = json::array();
  std::optional<double> last_order;
  for (const auto& r : table.rows) {
    rows.push_back({{"dx", r.dx},
                    {"dt", r.dt},
                    {"error", r.error},
                    {"order", nullable(r.order)},
                    {"saturated", r.saturated},
                    {"max_iterations", r.max_iterations}});
    if (r.order) last_order = r.order;
  }
  json doc;
  doc["scenario"] = config.name;
  doc["config"] = config.entries;
  doc["oracle"] = table.oracle;
  doc["rows"] = rows;
  doc["summary"] = {{"convergence_order", nullable(last_order)}, {"non_monotone", table.non_monotone}};
  return doc.dump(2) + "\n";
}

}  // namespace hnls

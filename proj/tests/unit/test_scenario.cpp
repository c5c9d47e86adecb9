#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hnls/scenario.hpp"
#include "test_support.hpp"

namespace hnls {
namespace {

const std::filesystem::path kData = HNLS_TEST_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hnls_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(ParseConfig, ReadsTypedFieldsAndComments) {
  const auto c = parse_config(
      "# header\nname = demo\na = 1.5   # trailing\nb=-2\nL = 30\nN = 600\nT = 0.5\nweight = pow:0.75\n"
      "boundary_mode = lifting\ndiagnostics = l2_balance, weak_form\n");
  EXPECT_EQ(c.name, "demo");
  EXPECT_DOUBLE_EQ(c.coeffs.a, 1.5);
  EXPECT_DOUBLE_EQ(c.coeffs.b, -2.0);
  EXPECT_EQ(c.weight.code(), WeightSpec::power(0.75).code());
  EXPECT_EQ(c.boundary_mode, BoundaryMode::kLifting);
  EXPECT_EQ(c.diagnostics, (std::vector<std::string>{"l2_balance", "weak_form"}));
  EXPECT_EQ(c.entries.at("a"), "1.5");
  // M defaults to dt = dx.
  EXPECT_EQ(c.grid().steps(), 10);
  const auto r = c.refined(2);
  EXPECT_EQ(r.grid().cells(), 2400);
  EXPECT_EQ(r.grid().steps(), 40);
}

TEST(ParseConfig, RejectsMalformedInput) {
  EXPECT_HNLS_ERROR(parse_config("colour = red\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("a = 1\na = 2\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("a 1\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("a = 1x\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("N = 100.5\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("boundary_mode = sideways\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("diagnostics = l2_balance, telepathy\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("weight = exp:-1\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("boundary = modes:1@x\n").problem(), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("initial = gaussian:1,2\n").problem(), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(load_config(kData / "does-not-exist.cfg"), ErrorCode::kIo);
}

TEST(ValidateConfig, RegimeGates) {
  // Boundary data outside p = 1, gamma = 0.
  EXPECT_HNLS_ERROR(parse_config("p = 2\nlambda = 1\nboundary = modes:0.1@2\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("gamma = 1\nboundary = modes:0.1@2\n"), ErrorCode::kConfigRejected);
  // A manufactured profile with a nonzero trace counts as boundary data.
  EXPECT_HNLS_ERROR(parse_config("p = 2\nsource = manufactured\nexact = sech\nexact_center = 1\n"),
                    ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("source = manufactured\ninitial = sech:1,3,1\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("diagnostics = energy_nl\nbeta = 1\ngamma = -1\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("diagnostics = energy\nlambda = 1\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("diagnostics = energy\nboundary = modes:1@1\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("diagnostics = dependence\np = 3\nweight = exp:0.5\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("diagnostics = dependence\nweight = one\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("h = 0\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("p = 0.5\n"), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("N = 4\n"), ErrorCode::kConfigRejected);
  EXPECT_NO_THROW(parse_config("p = 2\nlambda = 1\ngamma = 1\ninitial = gaussian:1,5,1\n"));
}

TEST(RunScenario, ZeroDataGivesZeroSeries) {
  auto c = load_config(std::filesystem::path(HNLS_TEST_DATA_DIR) / ".." / ".." / "configs" / "zero.cfg");
  const auto r = run_scenario(c);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.series.size(), static_cast<std::size_t>(c.grid().steps() + 1));
  for (const auto& row : r.series) {
    EXPECT_EQ(row.l2, 0.0);
    EXPECT_EQ(row.wl2, 0.0);
    EXPECT_EQ(row.flux, 0.0);
  }
  for (const auto& d : r.diagnostics) EXPECT_EQ(d.max_residual, 0.0) << d.name;
  for (const Complex& v : r.final_slice) EXPECT_EQ(v, Complex{});
}

TEST(RunScenario, OutputsAreDeterministicAndSnapshotTheConfig) {
  const std::string text =
      "name = det\na = 1\nlambda = 1\nbeta = 0.5\np = 1\nL = 20\nN = 256\nT = 0.25\n"
      "initial = gaussian:0.8,10,1.5\ndiagnostics = l2_balance, energy_nl\n";
  auto c = parse_config(text);
  c.output_dir = scratch("det_a");
  const auto first = run_scenario(c);
  c.output_dir = scratch("det_b");
  const auto second = run_scenario(c);
  EXPECT_EQ(series_csv(first.series), series_csv(second.series));
  const auto dir_a = std::filesystem::temp_directory_path() / "hnls_test_det_a";
  EXPECT_EQ(slurp(dir_a / "series.csv"), slurp(c.output_dir / "series.csv"));

  const auto csv = slurp(c.output_dir / "series.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,l2,wl2,flux,e_ident,nl_energy,gamma_term,iters");
  const auto report = nlohmann::json::parse(slurp(c.output_dir / "report.json"));
  EXPECT_EQ(report["scenario"], "det");
  EXPECT_EQ(report["config"]["initial"], "gaussian:0.8,10,1.5");
  EXPECT_EQ(report["config"].size(), c.entries.size());
  EXPECT_EQ(report["grid"]["N"], 256);
  EXPECT_EQ(report["grid"]["M"], c.grid().steps());
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(c.output_dir);
}

TEST(Convergence, LinearFourierOracleIsSecondOrder) {
  // Short horizon: by T = 1 the dispersive tail reaches x = 0 and the full-line oracle no longer applies.
  const auto c = parse_config("a = 1\nb = 0.5\nL = 40\nN = 1024\nT = 0.5\ninitial = gaussian:1,20,2\n");
  const auto table = convergence_table(c, 3);
  EXPECT_EQ(table.oracle, "fourier");
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_FALSE(table.non_monotone);
  for (std::size_t k = 1; k < 3; ++k) {
    ASSERT_TRUE(table.rows[k].order.has_value());
    EXPECT_NEAR(*table.rows[k].order, 2.0, 0.2);
    EXPECT_DOUBLE_EQ(table.rows[k].dx, table.rows[k - 1].dx / 2);
  }
}

TEST(Convergence, NonlinearManufacturedIsSecondOrder) {
  const auto c = parse_config(
      "a = 1\nb = 0.5\nlambda = 1\nbeta = 0.5\np = 1\nL = 16\nN = 256\nT = 0.5\n"
      "source = manufactured\nexact = sech\nexact_center = 3\n");
  const auto table = convergence_table(c, 3);
  EXPECT_EQ(table.oracle, "manufactured");
  EXPECT_FALSE(table.non_monotone);
  for (std::size_t k = 1; k < 3; ++k) {
    ASSERT_TRUE(table.rows[k].order.has_value());
    EXPECT_GE(*table.rows[k].order, 1.8);
  }
}

TEST(Convergence, ZeroDataSaturatesAndNeedsAnOracle) {
  const auto zero = parse_config("a = 1\nL = 10\nN = 64\nT = 0.5\n");
  const auto table = convergence_table(zero, 2);
  for (const auto& r : table.rows) {
    EXPECT_TRUE(r.saturated);
    EXPECT_FALSE(r.order.has_value());
  }
  EXPECT_FALSE(table.non_monotone);
  const std::string csv = convergence_csv(table);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_HNLS_ERROR(convergence_table(zero, 1), ErrorCode::kInvalidInput);
  const auto no_oracle = parse_config("a = 1\nlambda = 1\nL = 10\nN = 64\nT = 0.5\ninitial = gaussian:1,5,1\n");
  EXPECT_HNLS_ERROR(convergence_table(no_oracle, 2), ErrorCode::kInvalidInput);
}

TEST(FileInputs, InitialIsInterpolatedLinearly) {
  const auto spec = parse_config("initial = file:initial.txt\n", kData).problem();
  EXPECT_EQ(spec.initial(0.0), Complex(0.0, 0.0));
  EXPECT_EQ(spec.initial(1.0), Complex(0.5, -0.5));
  EXPECT_EQ(spec.initial(3.0), Complex(0.75, -0.5));
  EXPECT_EQ(spec.initial(5.0), Complex(0.0, 0.0));
}

TEST(FileInputs, BoundarySamplesMustBeUniform) {
  const auto spec = parse_config("boundary = file:boundary.txt\nL = 20\nN = 400\nT = 1\n", kData).problem();
  EXPECT_NEAR(std::abs(spec.boundary(0.5) - Complex(0.1 * std::sin(1.5), 0.1 * (1.0 - std::cos(1.5)))), 0.0, 1e-12);
  EXPECT_HNLS_ERROR(parse_config("boundary = file:boundary_uneven.txt\n", kData).problem(), ErrorCode::kConfigRejected);
  EXPECT_HNLS_ERROR(parse_config("boundary = file:nowhere.txt\n", kData).problem(), ErrorCode::kIo);
}

TEST(FileInputs, SourceLatticeIsBilinear) {
  const auto spec = parse_config("source = file:source.txt\n", kData).problem();
  EXPECT_EQ(spec.source(0.5, 2.0), Complex(1.0, 1.0));
  EXPECT_EQ(spec.source(1.0, 4.0), Complex(2.0, 2.0));
  EXPECT_EQ(spec.source(0.5, 5.0), Complex(0.0, 0.0));
}

}  // namespace
}  // namespace hnls

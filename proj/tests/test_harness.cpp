#include "nullwave/errors.hpp"
#include "nullwave/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nullwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nullwave_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig c;
  c.n = 32;
  c.L = 4.0;
  c.R = 1.0;
  c.T_final = 1.5;
  c.s_max = 1;
  c.eps = 0.05;
  c.output_dir = scratch_dir(name).string();
  return c;
}

std::vector<EnergyReport> series(std::function<double(double)> e, int count) {
  std::vector<EnergyReport> out(count);
  for (int i = 0; i < count; ++i) {
    out[i].t = 0.5 + 0.25 * i;
    out[i].Es = e(out[i].t);
  }
  return out;
}

} // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
  std::istringstream in(
      "# experiment\n"
      "n = 40\n"
      "L=5.5   # trailing comment\n"
      "\n"
      "profile = gauss_truncated\n"
      "tensor = john_nonnull\n"
      "eps_list = 0.05, 0.1 0.2\n"
      "ladder = 48,64,96\n"
      "seed = 18446744073709551615\n"
      "laplacian = compact\n"
      "weighting = none\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.n, 40);
  EXPECT_EQ(c.L, 5.5);
  EXPECT_EQ(c.profile, Profile::gauss_truncated);
  EXPECT_EQ(c.tensor, "john_nonnull");
  EXPECT_EQ(c.eps_list, (std::vector<double>{0.05, 0.1, 0.2}));
  EXPECT_EQ(c.ladder, (std::vector<int>{48, 64, 96}));
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.laplacian, LaplacianKind::compact);
  EXPECT_EQ(c.weighting, Weighting::none);
}

TEST(Config, RejectsBadInput) {
  for (const char* bad : {"n = forty\n", "colour = red\n", "n 40\n", "eps =\n", "profile = box\n",
                          "ladder = 48,x\n", "L = 1.5.2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_config(in), ConfigError) << bad;
  }
  EXPECT_THROW(load_config("/nonexistent/config.cfg"), ConfigError);
  ExperimentConfig c;
  c.window = 8;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.threads = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, ManifestRoundTrips) {
  ExperimentConfig c;
  c.n = 72;
  c.eps = 0.1 + 0.2;  // not representable in short decimal form
  c.eps_list = {0.05, 0.3};
  c.profile = Profile::poly_bump8;
  std::stringstream io;
  write_manifest(io, c, "simulate");
  std::string first;
  std::getline(io, first);
  EXPECT_EQ(first, "scenario = simulate");
  const auto back = parse_config(io);
  EXPECT_EQ(back.entries(), c.entries());
  EXPECT_EQ(back.eps, c.eps);
}

TEST(GrowthFit, KnownPowerLawAndFlatSeries) {
  const auto grow = series([](double t) { return 3.0 * std::pow(1.0 + t, 0.5); }, 10);
  const auto f = fit_growth(grow);
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_LE(f.residual, 1e-12);
  EXPECT_NEAR(f.max_ratio, std::pow((1 + grow.back().t) / (1 + grow.front().t), 0.5), 1e-12);
  EXPECT_EQ(f.samples, 10u);
  const auto flat = fit_growth(series([](double) { return 2.0; }, 8));
  EXPECT_NEAR(flat.slope, 0.0, 1e-14);
  EXPECT_EQ(flat.max_ratio, 1.0);
}

TEST(GrowthFit, ZeroSeriesAndTooFewSamples) {
  const auto z = fit_growth(series([](double) { return 0.0; }, 8));
  EXPECT_EQ(z.slope, 0.0);
  EXPECT_EQ(z.max_ratio, 1.0);
  EXPECT_THROW(fit_growth(series([](double) { return 1.0; }, 7)), Error);
}

TEST(ObservedOrder, RecoversPowerLaw) {
  const std::vector<double> h{0.1, 0.075, 0.05};
  std::vector<double> e;
  for (double x : h) e.push_back(7.0 * std::pow(x, 4));
  EXPECT_NEAR(observed_order(h, e), 4.0, 1e-12);
  EXPECT_THROW(observed_order(std::vector<double>{0.1, 0.1}, std::vector<double>{1.0, 2.0}), Error);
  EXPECT_THROW(observed_order(h, std::vector<double>{1.0, 0.0, 1.0}), Error);
}

TEST(FormatDefect, Examples) {
  EXPECT_EQ(format_defect(0.0), "0.0e0");
  EXPECT_EQ(format_defect(1.0), "1.0");
  EXPECT_EQ(format_defect(2.5e-15), "2.5e-15");
  EXPECT_EQ(format_defect(0.999999), "1.0");
  EXPECT_EQ(format_defect(12.0), "1.2e1");
}

TEST(CheckNull, VerdictLines) {
  std::ostringstream q, j;
  EXPECT_EQ(cmd_check_null("q0_quasilinear", q), 0);
  EXPECT_NE(q.str().find("null: yes, defect 0.0e0"), std::string::npos);
  EXPECT_EQ(cmd_check_null("john_nonnull", j), 0);
  EXPECT_NE(j.str().find("null: no, defect 1.0\n"), std::string::npos);
  const fs::path bad = scratch_dir("bad_tensor");
  fs::create_directories(bad);
  std::ofstream(bad / "t.txt") << "0 0 zero 1\n";
  std::ostringstream sink;
  EXPECT_THROW(cmd_check_null((bad / "t.txt").string(), sink), ConfigError);
}

TEST(Simulate, WritesCsvSummaryAndManifest) {
  auto c = small_config("simulate");
  std::ostringstream out;
  EXPECT_EQ(cmd_simulate(c, out), 0);
  const fs::path dir(c.output_dir);
  ASSERT_TRUE(fs::exists(dir / "energy.csv"));
  ASSERT_TRUE(fs::exists(dir / "summary.txt"));
  ASSERT_TRUE(fs::exists(dir / "manifest.txt"));
  std::ifstream csv(dir / "energy.csv");
  const auto rows = read_report_csv(csv);
  const auto direct = simulate_once(c, c.eps, dir / "again.csv");
  EXPECT_EQ(rows.size(), direct.result.reports.size());
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].t, rows[i - 1].t);
  EXPECT_EQ(slurp(dir / "energy.csv"), slurp(dir / "again.csv"));
  EXPECT_EQ(load_config(dir / "manifest.txt").entries(), c.entries());
}

TEST(Simulate, EpsListWritesOneCsvPerValue) {
  auto c = small_config("scan");
  c.T_final = 0.8;
  c.eps_list = {0.0, 0.02};
  std::ostringstream out;
  EXPECT_EQ(cmd_simulate(c, out), 0);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "energy_eps0.csv"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "energy_eps0.02.csv"));
}

TEST(Simulate, HyperbolicityLossExitsTwo) {
  auto c = small_config("loss");
  c.eps = 2.0;
  c.tensor = "john_nonnull";
  std::ostringstream out;
  EXPECT_EQ(cmd_simulate(c, out), 2);
  EXPECT_NE(slurp(fs::path(c.output_dir) / "summary.txt").find("hyperbolicity loss"),
            std::string::npos);
}

TEST(Contrast, ZeroDataGivesFlatFits) {
  auto c = small_config("contrast0");
  c.eps = 0.0;
  const auto o = contrast(c);
  ASSERT_TRUE(o.null_run.fit);
  ASSERT_TRUE(o.nonnull_run.fit);
  EXPECT_EQ(o.null_run.fit->slope, 0.0);
  EXPECT_EQ(o.nonnull_run.fit->slope, 0.0);
  EXPECT_EQ(o.null_run.fit->max_ratio, 1.0);
  EXPECT_EQ(o.nonnull_run.fit->max_ratio, 1.0);
  EXPECT_FALSE(o.null_run.result.failure);
}

TEST(Contrast, FailureIsRecordedNotFatal) {
  auto c = small_config("contrast_fail");
  c.eps = 2.0;
  std::ostringstream out;
  EXPECT_EQ(cmd_contrast(c, out), 0);
  const auto s = slurp(fs::path(c.output_dir) / "summary.txt");
  EXPECT_NE(s.find("terminated early: yes"), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "energy_null.csv"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "energy_nonnull.csv"));
}

TEST(Convergence, LadderValidation) {
  auto c = small_config("ladder");
  c.ladder = {32, 32, 40};
  EXPECT_THROW(convergence(c), ConfigError);
  c.ladder = {32, 40};
  EXPECT_THROW(convergence(c), ConfigError);
}

TEST(Convergence, ZeroDataIsExact) {
  auto c = small_config("conv0");
  c.eps = 0.0;
  c.T_final = 0.5;
  c.ladder = {24, 28, 32};
  const auto o = convergence(c);
  EXPECT_FALSE(o.error_order);
  EXPECT_FALSE(o.identity_order);
  for (const auto& lv : o.levels) EXPECT_EQ(lv.max_error, 0.0);
  std::ostringstream out;
  cmd_convergence(c, out);
  EXPECT_NE(out.str().find("observed order (max error): exact"), std::string::npos);
}

TEST(Convergence, SmallLadderShowsHighOrder) {
  auto c = small_config("conv");
  c.eps = 0.1;
  c.T_final = 1.0;
  c.profile = Profile::poly_bump8;
  c.ladder = {48, 64, 80};
  const auto o = convergence(c);
  ASSERT_TRUE(o.error_order);
  EXPECT_GE(*o.error_order, 3.0);
  ASSERT_TRUE(o.identity_order);
  for (std::size_t i = 0; i < o.levels.size(); ++i) {
    EXPECT_FALSE(o.levels[i].boundary_contact);
    EXPECT_LE(o.levels[i].energy_drift, 5e-3);
    if (i > 0) EXPECT_LT(o.levels[i].energy_drift, o.levels[i - 1].energy_drift);
  }
}

TEST(Convergence, ShortRunsReportNoIdentityOrder) {
  auto c = small_config("conv_short");
  c.eps = 0.1;
  c.L = 3.0;
  c.T_final = 0.5;
  c.ladder = {40, 48, 56};
  const auto o = convergence(c);
  EXPECT_TRUE(o.error_order);
  EXPECT_FALSE(o.identity_order);
}

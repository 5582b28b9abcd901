#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "laneemden/orchestrator.hpp"
#include "laneemden/profile_io.hpp"

using namespace laneemden;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Sweep : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    cfg.out_dir = fs::temp_directory_path() / (std::string("lelab_run_") + info->name());
    fs::remove_all(cfg.out_dir);
    cfg.ell_max = 2;
  }
  void TearDown() override { fs::remove_all(cfg.out_dir); }

  static AnalysisParts shooting_only() {
    AnalysisParts parts;
    parts.spectral = false;
    parts.identities = false;
    return parts;
  }

  RunConfig cfg;
};

std::vector<std::vector<double>> read_csv(const fs::path& path, std::string& header) {
  std::istringstream in(read_file(path));
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

json strip_status(json m) {
  for (auto& p : m["points"]) {
    p.erase("status");
    p.erase("warning");
  }
  return m;
}

}  // namespace

TEST(CachePolicy, Parsing) {
  EXPECT_EQ(cache_policy_from_string("reuse"), CachePolicy::Reuse);
  EXPECT_EQ(cache_policy_from_string("recompute"), CachePolicy::Recompute);
  EXPECT_EQ(to_string(CachePolicy::Recompute), "recompute");
  EXPECT_THROW(cache_policy_from_string("sometimes"), std::invalid_argument);
}

TEST(RunConfig, Validation) {
  RunConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto broken = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(broken([](RunConfig& c) { c.rtol = 0; }).validate(), std::invalid_argument);
  EXPECT_THROW(broken([](RunConfig& c) { c.quad_tol = -1; }).validate(), std::invalid_argument);
  EXPECT_THROW(broken([](RunConfig& c) { c.ell_max = 1; }).validate(), std::invalid_argument);
  EXPECT_THROW(broken([](RunConfig& c) { c.r_max = c.r_start; }).validate(), std::invalid_argument);
  EXPECT_THROW(broken([](RunConfig& c) { c.per_decade = 0; }).validate(), std::invalid_argument);
  EXPECT_THROW(broken([](RunConfig& c) { c.workers = 0; }).validate(), std::invalid_argument);
}

TEST(RunConfig, SpectralPanelsFollowNodeCount) {
  RunConfig c;
  c.spectral_nodes = 400;
  const SpectralOptions o = c.spectral_options();
  EXPECT_EQ((o.uniform_panels + o.geometric_panels) * o.per_panel, 400);
  EXPECT_EQ(o.uniform_panels, 10);
}

TEST_F(Sweep, BubbleNullityTable) {
  cfg.points = {{4, "3"}};
  cfg.ell_max = 4;
  const SweepManifest m = run(cfg, shooting_only());
  ASSERT_EQ(m.points.size(), 1u);
  const PointSummary& p = m.points[0];
  EXPECT_EQ(p.status, "solved");
  EXPECT_EQ(p.nullity_shooting, (std::vector<int>{1, 1, 0, 0, 0}));
  EXPECT_TRUE(p.nullity_spectral.empty());
  EXPECT_TRUE(p.passed());
  EXPECT_TRUE(fs::exists(cfg.out_dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(p.dir / "report.json"));
}

TEST_F(Sweep, SpectralAgreementAndArtifacts) {
  cfg.points = {{5, "2"}};
  AnalysisParts parts;
  parts.identities = false;
  const SweepManifest m = run(cfg, parts);
  const PointSummary& p = m.points[0];
  EXPECT_EQ(p.nullity_spectral, p.nullity_shooting);
  ASSERT_TRUE(p.verdicts.agreement.has_value());
  EXPECT_TRUE(*p.verdicts.agreement);
  for (int ell = 0; ell <= 2; ++ell) {
    const fs::path f = p.dir / ("spec_N5_p2_l" + std::to_string(ell) + ".csv");
    ASSERT_TRUE(fs::exists(f));
    EXPECT_EQ(read_file(f).substr(0, 17), "index,eigenvalue\n");
  }
}

TEST_F(Sweep, ReuseSkipsTheSolver) {
  cfg.points = {{5, "1"}, {4, "3"}};
  cfg.cache = CachePolicy::Recompute;
  const SweepManifest first = run(cfg, shooting_only());
  const std::string report = read_file(first.points[0].dir / "report.json");
  const std::string manifest = read_file(cfg.out_dir / "manifest.json");
  cfg.cache = CachePolicy::Reuse;
  const auto before = solver_invocations();
  const SweepManifest second = run(cfg, shooting_only());
  EXPECT_EQ(solver_invocations(), before);
  for (const PointSummary& p : second.points) EXPECT_EQ(p.status, "cached");
  EXPECT_EQ(read_file(second.points[0].dir / "report.json"), report);
  EXPECT_EQ(strip_status(json::parse(read_file(cfg.out_dir / "manifest.json"))), strip_status(json::parse(manifest)));
}

TEST_F(Sweep, CacheWithOtherSettingsIsRecomputed) {
  cfg.points = {{4, "3"}};
  run(cfg, shooting_only());
  cfg.per_decade = 300;
  const SweepManifest m = run(cfg, shooting_only());
  EXPECT_EQ(m.points[0].status, "solved");
  EXPECT_NE(m.points[0].warning.find("different solver settings"), std::string::npos);
}

TEST_F(Sweep, InadmissiblePointFailsAlone) {
  cfg.points = {{4, "1"}, {4, "3"}};
  const SweepManifest m = run(cfg, shooting_only());
  ASSERT_EQ(m.points.size(), 2u);
  EXPECT_EQ(m.points[0].status, "failed");
  EXPECT_FALSE(m.points[0].error.empty());
  EXPECT_TRUE(m.points[1].passed());
  EXPECT_FALSE(m.all_passed());
  const json j = json::parse(read_file(cfg.out_dir / "manifest.json"));
  EXPECT_EQ(j["points"][0]["status"], "failed");
  EXPECT_TRUE(j["points"][0].contains("error"));
  EXPECT_EQ(j["all_passed"], false);
}

TEST_F(Sweep, WorkerCountDoesNotChangeResults) {
  cfg.points = {{4, "3"}, {5, "2"}, {3, "3"}};
  cfg.cache = CachePolicy::Recompute;
  run(cfg, shooting_only());
  const std::string serial = read_file(cfg.out_dir / "manifest.json");
  const std::string report = read_file(cfg.out_dir / "N5_p2" / "report.json");
  cfg.workers = 3;
  run(cfg, shooting_only());
  EXPECT_EQ(read_file(cfg.out_dir / "manifest.json"), serial);
  EXPECT_EQ(read_file(cfg.out_dir / "N5_p2" / "report.json"), report);
}

TEST_F(Sweep, ReportIsStrictJson) {
  cfg.points = {{5, "1"}};
  AnalysisParts parts;
  parts.spectral = false;
  const SweepManifest m = run(cfg, parts);
  const std::string text = read_file(m.points[0].dir / "report.json");
  EXPECT_EQ(text.find("NaN"), std::string::npos);
  EXPECT_EQ(text.find("inf"), std::string::npos);
  const json j = json::parse(text);
  for (const char* key : {"point", "ground_state", "decay", "bootstrap", "channels", "generators", "identities",
                          "monotonicity", "sign_structure", "inequalities", "verdicts"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["verdicts"]["identities"], true);
}

TEST(PlotData, EmptyManifestWritesNothing) {
  EXPECT_TRUE(emit_plot_data(SweepManifest{}).empty());
}

TEST_F(Sweep, PlotDataForBubbleAndLogCase) {
  cfg.points = {{4, "3"}, {3, "3"}};
  AnalysisParts parts = shooting_only();
  parts.channels = false;
  const SweepManifest m = run(cfg, parts);
  const auto files = emit_plot_data(m);
  // profile and decay fit per point; no channels means no eigenvalue or identity data
  EXPECT_EQ(files.size(), 4u);

  std::string header;
  const auto fit = read_csv(cfg.out_dir / "N4_p3" / "plot_decay_fit.csv", header);
  EXPECT_EQ(header, "r,u,v,u_fit,v_fit");
  ASSERT_GE(fit.size(), 2u);
  const auto& a = fit.front();
  const auto& b = fit.back();
  EXPECT_NEAR(std::log(b[3] / a[3]) / std::log(b[0] / a[0]), -2.0, 0.02);
  EXPECT_NEAR(b[3], b[1], 1e-3 * b[1]);

  read_csv(cfg.out_dir / "N4_p3" / "plot_profile.csv", header);
  EXPECT_EQ(header, "r,u,v");
  const auto log_rows = read_csv(cfg.out_dir / "N3_p3" / "plot_profile.csv", header);
  EXPECT_EQ(header, "r,u,v,r_pow_u_over_log_r");
  EXPECT_EQ(log_rows.front().size(), 4u);
}

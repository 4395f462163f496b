#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "depthkit/cli.hpp"
#include "depthkit/io.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace depthkit {
namespace {

using testing::TempDir;

const std::filesystem::path kTables = std::filesystem::path(DEPTHKIT_DATA_DIR) / "tables";

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "depthkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(CliEval, IdenticalGridsScorePerfectly) {
  TempDir dir;
  const DepthGrid g(3, 2, {1, 2, 3, 4, 5, 6});
  write_pfm(dir / "gt.pfm", g);
  write_pfm(dir / "pred.pfm", g);
  const auto r = run({"eval", "--pred", (dir / "pred.pfm").string(), "--gt",
                      (dir / "gt.pfm").string(), "--out", (dir / "r.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("delta1=1"), std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(dir / "r.json"));
  EXPECT_EQ(j["metrics"]["delta1"].get<double>(), 1.0);
  EXPECT_EQ(j["representation"].get<std::string>(), "metric-depth");
}

TEST(CliEval, AffineDisparityRecoversDepth) {
  TempDir dir;
  const std::vector<double> t{1, 2, 4, 5};
  std::vector<double> d;
  for (const double x : t) d.push_back(3.0 / x + 0.1);
  write_grid_csv(dir / "gt.csv", DepthGrid(2, 2, t));
  write_grid_csv(dir / "pred.csv", DepthGrid(2, 2, d));
  const auto r = run({"eval", "--pred", (dir / "pred.csv").string(), "--gt",
                      (dir / "gt.csv").string(), "--repr", "affine-disparity", "--align", "lsq",
                      "--out", (dir / "r.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(read_text_file(dir / "r.json"));
  EXPECT_LE(j["metrics"]["rmse"].get<double>(), 1e-9);
  EXPECT_EQ(j["alignment"]["space"].get<std::string>(), "disparity");
}

TEST(CliEval, PointMapReportsShift) {
  TempDir dir;
  const double fx = 50.0, cx = 3.5, cy = 3.5;
  std::vector<double> z(64), xyz;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 1.0 + 0.1 * static_cast<double>(i);
  for (std::size_t v = 0; v < 8; ++v) {
    for (std::size_t u = 0; u < 8; ++u) {
      const double zz = z[v * 8 + u];
      xyz.push_back(0.5 * (static_cast<double>(u) - cx) * zz / fx);
      xyz.push_back(0.5 * (static_cast<double>(v) - cy) * zz / fx);
      xyz.push_back(0.5 * zz + 1.0);
    }
  }
  write_pfm_pointmap(dir / "pm.pfm", PointMap(8, 8, xyz));
  write_grid_csv(dir / "gt.csv", DepthGrid(8, 8, z));
  const auto r = run({"eval", "--pred", (dir / "pm.pfm").string(), "--gt",
                      (dir / "gt.csv").string(), "--repr", "pointmap", "--align", "lsq", "--fx",
                      "50", "--fy", "50", "--cx", "3.5", "--cy", "3.5", "--out",
                      (dir / "r.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(read_text_file(dir / "r.json"));
  // float32 storage limits the recovered shift to single precision.
  EXPECT_NEAR(j["pointmap_shift"].get<double>(), 1.0, 1e-4);
  EXPECT_GE(j["metrics"]["delta1"].get<double>(), 0.999);
  EXPECT_EQ(run({"eval", "--pred", (dir / "pm.pfm").string(), "--gt",
                 (dir / "gt.csv").string(), "--repr", "pointmap", "--align", "lsq"})
                .code,
            kExitInvalidInput);
}

TEST(CliEval, DimensionMismatchExitsTwo) {
  TempDir dir;
  write_pfm(dir / "a.pfm", make_grid(2, 2, 1.0));
  write_pfm(dir / "b.pfm", make_grid(3, 3, 1.0));
  const auto r = run({"eval", "--pred", (dir / "a.pfm").string(), "--gt",
                      (dir / "b.pfm").string()});
  EXPECT_EQ(r.code, kExitInvalidInput);
  EXPECT_NE(r.err.find("2x2"), std::string::npos);
  EXPECT_NE(r.err.find("3x3"), std::string::npos);
}

TEST(CliEval, ConstantPredictionExitsThree) {
  TempDir dir;
  write_grid_csv(dir / "p.csv", make_grid(2, 2, 1.0));
  write_grid_csv(dir / "g.csv", DepthGrid(2, 2, {1, 2, 3, 4}));
  const auto r = run({"eval", "--pred", (dir / "p.csv").string(), "--gt",
                      (dir / "g.csv").string(), "--repr", "affine-depth", "--align", "lsq"});
  EXPECT_EQ(r.code, kExitDegenerate);
  EXPECT_NE(r.err.find("degenerate-prediction"), std::string::npos);
}

TEST(CliExperiment, RobustnessFirstRowIsPerfect) {
  TempDir dir;
  const auto csv = (dir / "rob.csv").string();
  const auto r = run({"experiment", "--kind", "robustness", "--n", "40", "--seed", "7", "--out",
                      csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(read_text_file(csv));
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "x,delta1_depth,delta1_disparity");
  EXPECT_EQ(first, "0,1,1");
}

TEST(CliExperiment, BadStepExitsTwo) {
  TempDir dir;
  const auto r = run({"experiment", "--kind", "robustness", "--step", "-1", "--out",
                      (dir / "x.csv").string()});
  EXPECT_EQ(r.code, kExitInvalidInput);
  EXPECT_EQ(run({"experiment", "--kind", "nonsense"}).code, kExitInvalidInput);
}

TEST(CliExperiment, SensitivityWithSvg) {
  TempDir dir;
  const auto csv = (dir / "s.csv").string();
  const auto svg = (dir / "s.svg").string();
  const auto r = run({"experiment", "--kind", "sensitivity", "--n", "100", "--align", "none,lsq",
                      "--out", csv, "--svg", svg});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string text = read_text_file(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "x,delta_none,delta_lsq,absrel_none,absrel_lsq");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
  EXPECT_NE(read_text_file(svg).find("<svg"), std::string::npos);
}

TEST(CliExperiment, RepeatedRunsAreIdentical) {
  TempDir dir;
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  ASSERT_EQ(run({"experiment", "--kind", "sensitivity", "--n", "40", "--seed", "5", "--out", a})
                .code,
            kExitOk);
  ASSERT_EQ(run({"experiment", "--kind", "sensitivity", "--n", "40", "--seed", "5", "--threads",
                 "3", "--out", b})
                .code,
            kExitOk);
  EXPECT_EQ(read_text_file(a), read_text_file(b));
}

TEST(CliBench, ThreeTaskAverageRank) {
  const auto r = run({"bench", (kTables / "depth_completion.csv").string(),
                      (kTables / "stereo_matching.csv").string(),
                      (kTables / "monocular_3dgs.csv").string(), "--baseline", "w/o depth",
                      "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  // Ranks 1, 1 and 3 across the three tasks.
  EXPECT_EQ(j["average_rank"]["DAV2-Rel"].get<double>(), 1.67);
  EXPECT_EQ(j["tasks"].size(), 3u);
}

TEST(CliBench, MarkdownWithJsonTable) {
  TempDir dir;
  const auto out = (dir / "r.md").string();
  const auto r = run({"bench", (kTables / "depth_completion.csv").string(),
                      (kTables / "slam.json").string(), "--baseline", "w/o depth", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("bench: 2 tasks"), std::string::npos);
  EXPECT_NE(read_text_file(out).find("| Method | Avg. rank |"), std::string::npos);
}

TEST(CliBench, Errors) {
  EXPECT_EQ(run({"bench", "/nonexistent/table.csv", "--baseline", "x"}).code, kExitInvalidInput);
  EXPECT_EQ(run({"bench", (kTables / "depth_completion.csv").string(), "--baseline", "nobody"})
                .code,
            kExitInvalidInput);
  EXPECT_EQ(run({"bench", (kTables / "depth_completion.csv").string()}).code,
            kExitInvalidInput);
}

TEST(CliHelp, ListsDefaults) {
  const auto r = run({"experiment", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("500"), std::string::npos);
  EXPECT_NE(r.out.find("1.8"), std::string::npos);
  EXPECT_NE(r.out.find("0.05"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitInvalidInput);
  EXPECT_EQ(run({"eval"}).code, kExitInvalidInput);
}

TEST(CliBinary, ExitCodesPropagate) {
  const std::string bin = DEPTHKIT_CLI_PATH;
  const int ok = std::system((bin + " --help >/dev/null 2>&1").c_str());
  ASSERT_TRUE(WIFEXITED(ok));
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int bad = std::system((bin + " bench /nonexistent.csv --baseline x >/dev/null 2>&1").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}

}  // namespace
}  // namespace depthkit

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "oddforge/dataset_io.hpp"
#include "oddforge/odd_spec_io.hpp"
#include "support/oracles.hpp"

using namespace oddforge;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code{};
  std::string out;
  std::string err;
};

CliRun odd_forge(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("odd_forge_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    save_spec(OddSpec::generic_landing(), path("odd.json"));
    RunwayDb db = fixture::virtual_runways(10);
    std::vector<RunwayGeometry> rws = db.all();
    rws.push_back({"NOGEO", "01", 3000, 45, 300, std::nullopt});
    std::ofstream(path("runways.json")) << serialize_runway_db(RunwayDb(rws));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(odd_forge({"--help"}).code, cli::kExitPass);
  EXPECT_EQ(odd_forge({"verify", "--help"}).code, cli::kExitPass);
}

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(odd_forge({}).code, cli::kExitConfig); }

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(odd_forge({"validate", "--spec", path("odd.json")}).code, cli::kExitPass);
  auto doc = nlohmann::json::parse(slurp(path("odd.json")));
  doc["parameters"][1]["min"] = 5;
  std::ofstream(path("inverted.json")) << doc.dump(2);
  const CliRun bad = odd_forge({"validate", "--spec", path("inverted.json")});
  EXPECT_EQ(bad.code, cli::kExitFail);
  EXPECT_NE(bad.err.find("violation"), std::string::npos);
  EXPECT_EQ(odd_forge({"validate", "--spec", path("missing.json")}).code, cli::kExitConfig);
}

TEST_F(CliTest, SampleIsReproducibleAndInsideTheCone) {
  const auto args = [&](const std::string& out) {
    return std::vector<std::string>{"sample", "--spec", path("odd.json"), "--count", "100", "--seed", "7", "--out", out};
  };
  ASSERT_EQ(odd_forge(args(path("a.csv"))).code, cli::kExitPass);
  ASSERT_EQ(odd_forge(args(path("b.csv"))).code, cli::kExitPass);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  const auto rows = load_poses(path("a.csv"));
  ASSERT_EQ(rows.size(), 100u);
  for (const auto& r : rows) EXPECT_TRUE(contains(ApproachCone::generic(), r.pose));
}

TEST_F(CliTest, SampleRejectsBadCounts) {
  EXPECT_EQ(odd_forge({"sample", "--spec", path("odd.json"), "--count", "0"}).code, cli::kExitConfig);
  EXPECT_EQ(odd_forge({"sample", "--spec", path("odd.json"), "--count", "5", "--strata", "2,2"}).code,
            cli::kExitConfig);
}

TEST_F(CliTest, SampleStratifiedToStdout) {
  const CliRun r = odd_forge({"sample", "--spec", path("odd.json"), "--count", "8", "--strata", "2,2,2,1,1,1"});
  ASSERT_EQ(r.code, cli::kExitPass);
  EXPECT_EQ(parse_poses(r.out).size(), 8u);
}

TEST_F(CliTest, LabelFlagsAndDropsHiddenPoses) {
  std::vector<PoseRow> rows{{"ok", {2000, 0, -3, 0, -3, 0}}, {"behind", {100, 0, -3, 0, -3, 0}}};
  write_poses(rows, path("poses.csv"));
  const std::vector<std::string> base{"label", "--poses", path("poses.csv"), "--runway-db", path("runways.json"),
                                      "--runway", "AP00/" + fixture::virtual_runways(1).all()[0].runway};
  auto flagged = base;
  flagged.insert(flagged.end(), {"--out", path("labels.json")});
  const CliRun a = odd_forge(flagged);
  ASSERT_EQ(a.code, cli::kExitPass) << a.err;
  EXPECT_NE(a.err.find("behind"), std::string::npos);
  const auto loaded = load_records(path("labels.json"), FileFormat::Json);
  ASSERT_EQ(loaded.split.records.size(), 2u);
  EXPECT_FALSE(loaded.split.records[1].label.fully_visible);

  auto dropped = base;
  dropped.insert(dropped.end(), {"--require-visible", "--out", path("labels.csv")});
  ASSERT_EQ(odd_forge(dropped).code, cli::kExitPass);
  EXPECT_EQ(load_records(path("labels.csv"), FileFormat::Csv).split.records.size(), 1u);
}

TEST_F(CliTest, LabelUnknownRunway) {
  write_poses({{"ok", {2000, 0, -3, 0, -3, 0}}}, path("poses.csv"));
  EXPECT_EQ(odd_forge({"label", "--poses", path("poses.csv"), "--runway-db", path("runways.json"), "--runway",
                       "XXXX/99"})
                .code,
            cli::kExitConfig);
}

TEST_F(CliTest, ScenarioExitCodes) {
  const std::string runway = "AP00/" + fixture::virtual_runways(1).all()[0].runway;
  const CliRun ok = odd_forge({"scenario", "--spec", path("odd.json"), "--runway-db", path("runways.json"), "--runway",
                            runway, "--frames", "10", "--entry", "5556,0,-3,0,-4,0", "--out", path("s.json")});
  ASSERT_EQ(ok.code, cli::kExitPass) << ok.err;
  EXPECT_EQ(parse_scenario(slurp(path("s.json"))).size(), 10u);

  const CliRun crab = odd_forge({"scenario", "--spec", path("odd.json"), "--runway-db", path("runways.json"),
                              "--runway", runway, "--kind", "crab_decrab", "--crab-deg", "15"});
  EXPECT_EQ(crab.code, cli::kExitFail);
  EXPECT_NE(crab.err.find("parameter yaw"), std::string::npos) << crab.err;

  EXPECT_EQ(odd_forge({"scenario", "--spec", path("odd.json"), "--runway-db", path("runways.json"), "--runway",
                       "NOGEO/01"})
                .code,
            cli::kExitConfig);
  EXPECT_EQ(odd_forge({"scenario", "--spec", path("odd.json"), "--runway-db", path("runways.json"), "--runway",
                       runway, "--kind", "spiral"})
                .code,
            cli::kExitConfig);
}

TEST_F(CliTest, VerifyExitCodes) {
  const auto data = fixture::nominal_dataset(2000, fixture::virtual_runways(10), 33);
  write_labels(data.train.records, path("train.csv"), FileFormat::Csv);
  write_labels(data.test.records, path("test.csv"), FileFormat::Csv);
  write_labels(fixture::lateral_nonnegative(data.test).records, path("biased.csv"), FileFormat::Csv);
  write_labels({}, path("empty.csv"), FileFormat::Csv);
  const auto verify = [&](const std::string& test, const std::string& out) {
    return odd_forge({"verify", "--train", path("train.csv"), "--test", path(test), "--spec", path("odd.json"),
                      "--runway-db", path("runways.json"), "--out-dir", path(out)});
  };
  const CliRun ok = verify("test.csv", "ok");
  EXPECT_EQ(ok.code, cli::kExitPass) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("overall: pass"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("ok/report.json")));
  EXPECT_TRUE(fs::exists(path("ok/histogram_center_x.csv")));
  const auto report = nlohmann::json::parse(slurp(path("ok/report.json")));
  EXPECT_EQ(report["overall"], "pass");
  EXPECT_EQ(report["results"].size(), 4u);

  const CliRun biased = verify("biased.csv", "biased");
  EXPECT_EQ(biased.code, cli::kExitFail);
  EXPECT_NE(biased.out.find("completeness: fail"), std::string::npos);
  EXPECT_NE(biased.out.find("representativeness: fail"), std::string::npos);

  EXPECT_EQ(verify("empty.csv", "empty").code, cli::kExitConfig);
}

TEST_F(CliTest, VerifyRejectsBadThresholds) {
  const auto data = fixture::nominal_dataset(40, fixture::virtual_runways(10), 34);
  write_labels(data.train.records, path("train.csv"), FileFormat::Csv);
  write_labels(data.test.records, path("test.csv"), FileFormat::Csv);
  std::ofstream(path("t.json")) << R"({"accuracy": {"tolerance": 1}})";
  EXPECT_EQ(odd_forge({"verify", "--train", path("train.csv"), "--test", path("test.csv"), "--spec",
                       path("odd.json"), "--runway-db", path("runways.json"), "--thresholds", path("t.json"),
                       "--out-dir", path("o")})
                .code,
            cli::kExitConfig);
}

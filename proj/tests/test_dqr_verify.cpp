#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oddforge/dqr_verify.hpp"
#include "oddforge/error.hpp"
#include "oddforge/odd_spec_io.hpp"
#include "oddforge/sampling.hpp"
#include "support/oracles.hpp"

using namespace oddforge;

namespace {

const RunwayDb& runways() {
  static const RunwayDb db = fixture::virtual_runways(10);
  return db;
}

const DatasetBundle& nominal() {
  static const DatasetBundle data = fixture::nominal_dataset(2000, runways(), 21);
  return data;
}

VerifyConfig verify_config() {
  VerifyConfig cfg;
  cfg.runways = runways();
  return cfg;
}

// Pose-only records, enough for the completeness grids.
DatasetSplit pose_split(std::size_t n, std::uint64_t seed, SplitName name = SplitName::Train) {
  SamplingConfig cfg;
  cfg.count = n;
  cfg.seed = seed;
  DatasetSplit s{name, {}};
  const auto poses = sample_cone(ApproachCone::generic(), cfg);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    DatasetRecord r;
    r.image_id = "p" + std::to_string(i);
    r.airport_id = "AP" + std::to_string(i % 12);
    r.runway_id = "27";
    r.pose = poses[i];
    s.records.push_back(std::move(r));
  }
  return s;
}

DatasetRecord boxed(const std::string& id, double w, double h) {
  DatasetRecord r;
  r.image_id = id;
  r.airport_id = "X";
  r.runway_id = "1";
  r.image_size = {2448, 2048};
  const double u0 = 1000, v0 = 900;
  r.label.corners = {PixelPoint{u0 + 0.2 * w, v0 + h}, PixelPoint{u0 + 0.8 * w, v0 + h}, PixelPoint{u0 + w, v0},
                     PixelPoint{u0, v0}};
  r.label.bbox = {u0, v0, u0 + w, v0 + h};
  return r;
}

double metric(const DqrResult& r, const std::string& name) { return r.metrics.at(name); }

}  // namespace

TEST(Threshold, Bounds) {
  EXPECT_TRUE((Threshold{0.1, Bound::AtMost}.satisfied_by(0.1)));
  EXPECT_FALSE((Threshold{0.1, Bound::AtMost}.satisfied_by(0.11)));
  EXPECT_TRUE((Threshold{0.9, Bound::AtLeast}.satisfied_by(0.95)));
  EXPECT_FALSE((Threshold{0.9, Bound::AtLeast}.satisfied_by(std::nan(""))));
}

TEST(Threshold, SettleVerdict) {
  DqrResult r;
  r.metrics = {{"a", 1.0}};
  r.thresholds = {{"a", {2.0, Bound::AtMost}}, {"b", {0.0, Bound::AtLeast}}};
  settle_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_EQ(r.failed_metrics(), std::vector<std::string>{"b"});
  r.metrics["b"] = 0.0;
  settle_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  r.verdict = Verdict::Advisory;
  r.metrics["b"] = -1.0;
  settle_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::Advisory);
}

TEST(Completeness, EmptySplitHasNoCoverage) {
  const DqrResult r = check_completeness(DatasetSplit{}, ApproachCone::generic(), CompletenessConfig{});
  EXPECT_EQ(metric(r, "cone_coverage"), 0.0);
  EXPECT_EQ(metric(r, "attitude_coverage"), 0.0);
  EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(Completeness, DenseSamplingCoversEverything) {
  const DatasetSplit s = pose_split(100000, 4);
  const DqrResult r = check_completeness(s, ApproachCone::generic(), CompletenessConfig{});
  EXPECT_GE(metric(r, "cone_coverage"), 0.999);
  EXPECT_GE(metric(r, "attitude_coverage"), 0.999);
  EXPECT_EQ(metric(r, "airport_count"), 12.0);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Completeness, HalfConeGivesHalfCoverage) {
  const DatasetSplit s = fixture::lateral_nonnegative(pose_split(20000, 5));
  const DqrResult r = check_completeness(s, ApproachCone::generic(), CompletenessConfig{});
  EXPECT_NEAR(metric(r, "cone_coverage"), 0.5, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_EQ(r.failed_metrics(), std::vector<std::string>{"cone_coverage"});
}

TEST(Completeness, MinimumOverSplits) {
  const DatasetSplit full = pose_split(20000, 6);
  const DatasetSplit half = fixture::lateral_nonnegative(pose_split(20000, 7, SplitName::Test));
  const DqrResult r = check_completeness({&full, &half}, ApproachCone::generic(), CompletenessConfig{});
  EXPECT_NEAR(metric(r, "cone_coverage"), 0.5, 1e-12);
  EXPECT_EQ(r.evidence["splits"].size(), 2u);
}

TEST(Completeness, MonotoneInData) {
  const DatasetSplit all = pose_split(3000, 8);
  double last = 0.0;
  for (std::size_t n : {10u, 100u, 400u, 1500u, 3000u}) {
    DatasetSplit s{SplitName::Train, {all.records.begin(), all.records.begin() + static_cast<long>(n)}};
    const double c = metric(check_completeness(s, ApproachCone::generic(), CompletenessConfig{}), "cone_coverage");
    EXPECT_GE(c, last);
    last = c;
  }
}

TEST(Completeness, NoPosesIsNotApplicable) {
  DatasetSplit s{SplitName::Test, {boxed("a", 100, 100)}};
  EXPECT_THROW(check_completeness(s, ApproachCone::generic(), CompletenessConfig{}), NotApplicableError);
}

TEST(Features, Values) {
  const DatasetRecord r = boxed("a", 200, 150);
  EXPECT_DOUBLE_EQ(*feature_value(r, feature::aspect_ratio), 0.75);
  EXPECT_DOUBLE_EQ(*feature_value(r, feature::bbox_area_log), std::log10(30000.0));
  EXPECT_DOUBLE_EQ(*feature_value(r, feature::center_x), 1100.0 / 2448.0);
  EXPECT_DOUBLE_EQ(*feature_value(r, feature::fill_ratio), 0.8);
  EXPECT_FALSE(feature_value(r, feature::slant_distance));
  EXPECT_FALSE(feature_value(r, "yaw"));
  EXPECT_THROW(feature_value(r, "colour"), InvalidInputError);
}

TEST(Bands, AspectExamples) {
  const RepresentativenessConfig cfg;
  const DatasetSplit in{SplitName::Train, {boxed("a", 200, 150)}};
  const DatasetSplit out{SplitName::Train, {boxed("b", 100, 300)}};
  EXPECT_EQ(count_bands(in, cfg).aspect_in_band, 1u);
  EXPECT_EQ(count_bands(out, cfg).aspect_in_band, 0u);
  EXPECT_EQ(count_bands(out, cfg).area_at_least, 1u);
  const DatasetSplit tiny{SplitName::Train, {boxed("c", 20, 20)}};
  EXPECT_EQ(count_bands(tiny, cfg).area_at_least, 0u);
}

TEST(Bands, MatchIndependentRecount) {
  const RepresentativenessConfig cfg;
  for (const auto* s : {&nominal().train, &nominal().test}) {
    const BandCounts c = count_bands(*s, cfg);
    const auto o = oracle::recount_bands(*s, 0.5, 1.5, 0.2, 0.8, 625);
    EXPECT_EQ(c.labelled, o.labelled);
    EXPECT_EQ(c.aspect_in_band, o.aspect);
    EXPECT_EQ(c.fill_in_band, o.fill);
    EXPECT_EQ(c.area_at_least, o.area);
  }
}

TEST(Representativeness, IdenticalSplitsHaveZeroDivergence) {
  DatasetSplit test = nominal().train;
  test.name = SplitName::Test;
  std::vector<FeatureHistograms> hists;
  const DqrResult r = check_representativeness(nominal().train, test, ApproachCone::generic(),
                                               RepresentativenessConfig{}, &hists);
  for (const auto& [k, v] : r.metrics) {
    if (k.rfind("divergence.", 0) == 0) EXPECT_EQ(v, 0.0) << k;
  }
  EXPECT_FALSE(hists.empty());
  for (const auto& h : hists) EXPECT_EQ(h.train.counts, h.test.counts);
}

TEST(Representativeness, NominalSplitsPass) {
  const DqrResult r = check_representativeness(nominal().train, nominal().test, ApproachCone::generic(),
                                               RepresentativenessConfig{});
  EXPECT_EQ(r.verdict, Verdict::Pass) << r.evidence.dump();
  EXPECT_TRUE(r.metrics.contains("range_coverage.yaw"));
}

TEST(Representativeness, ShiftedTestSplitFails) {
  const DatasetSplit half = fixture::lateral_nonnegative(nominal().test);
  const DqrResult r =
      check_representativeness(nominal().train, half, ApproachCone::generic(), RepresentativenessConfig{});
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_GT(metric(r, "divergence.lateral_path"), 0.1);
  EXPECT_LT(metric(r, "range_coverage.lateral_path"), 0.9);
}

TEST(Representativeness, AbsentFeaturesAreSkipped) {
  const DqrResult r = check_representativeness(nominal().train, nominal().test, ApproachCone::generic(),
                                               RepresentativenessConfig{});
  EXPECT_FALSE(r.metrics.contains("divergence.time_to_landing"));
  bool flagged = false;
  for (const auto& f : r.evidence["features"]) {
    if (f["feature"] == "time_to_landing") flagged = f.contains("skipped");
  }
  EXPECT_TRUE(flagged);
}

TEST(Representativeness, EmptySplitIsNotApplicable) {
  EXPECT_THROW(check_representativeness(nominal().train, DatasetSplit{SplitName::Test, {}}, ApproachCone::generic(),
                                        RepresentativenessConfig{}),
               NotApplicableError);
}

TEST(Representativeness, PerAirportEvidence) {
  RepresentativenessConfig cfg;
  cfg.per_airport = true;
  const DqrResult r = check_representativeness(nominal().train, nominal().test, ApproachCone::generic(), cfg);
  const auto& first = r.evidence["features"][0];
  ASSERT_TRUE(first.contains("per_airport_divergence"));
  EXPECT_EQ(first["per_airport_divergence"].size(), 10u);
}

TEST(Accuracy, SelfGeneratedLabelsAreExact) {
  const DqrResult r = check_accuracy({&nominal().train, &nominal().test}, CameraModel{}, runways(), AccuracyConfig{});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_LT(metric(r, "mean_error_px"), 1e-9);
  EXPECT_EQ(metric(r, "synthetic_verified"), 2000.0);
  EXPECT_EQ(metric(r, "structural_violations"), 0.0);
}

TEST(Accuracy, PerturbedCornersFail) {
  DatasetSplit s = nominal().train;
  for (auto& rec : s.records) {
    for (auto& c : rec.label.corners) c.u += 2.0;
    rec.label.bbox.x_min += 2.0;
    rec.label.bbox.x_max += 2.0;
  }
  const DqrResult r = check_accuracy(s, CameraModel{}, runways(), AccuracyConfig{});
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_NEAR(metric(r, "mean_error_px"), 2.0, 1e-9);
  EXPECT_EQ(metric(r, "records_over_tolerance"), static_cast<double>(s.records.size()));
}

TEST(Accuracy, RealRecordsGetStructuralChecksOnly) {
  DatasetSplit s{SplitName::RealSubset, {}};
  DatasetRecord good = nominal().test.records[0];
  good.source = Source::Real;
  good.pose.reset();
  good.slant_distance_m.reset();
  good.time_to_landing_s = 10;
  s.records.push_back(good);
  DqrResult r = check_accuracy(s, CameraModel{}, runways(), AccuracyConfig{});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_FALSE(r.metrics.contains("mean_error_px"));
  EXPECT_EQ(r.note, "real records carry no pose; structural checks only");
  std::swap(s.records[0].label.corners[0], s.records[0].label.corners[3]);
  std::swap(s.records[0].label.corners[1], s.records[0].label.corners[2]);
  r = check_accuracy(s, CameraModel{}, runways(), AccuracyConfig{});
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_EQ(metric(r, "structural_violations"), 1.0);
}

TEST(Accuracy, UnknownRunwayIsUnverifiable) {
  DatasetSplit s{SplitName::Train, {nominal().train.records[0]}};
  s.records[0].airport_id = "ZZZZ";
  const DqrResult r = check_accuracy(s, CameraModel{}, runways(), AccuracyConfig{});
  EXPECT_EQ(metric(r, "unverifiable"), 1.0);
  EXPECT_EQ(metric(r, "synthetic_verified"), 0.0);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Suitability, AlwaysAdvisory) {
  DqrResult r = check_source_suitability(nominal().train);
  EXPECT_EQ(r.verdict, Verdict::Advisory);
  EXPECT_EQ(r.note, "no real-footage baseline");
  DatasetSplit real{SplitName::RealSubset, {}};
  for (std::size_t i = 0; i < 50; ++i) {
    DatasetRecord rec = nominal().test.records[i];
    rec.source = Source::Real;
    rec.pose.reset();
    real.records.push_back(rec);
  }
  r = check_source_suitability({&nominal().train, &real});
  EXPECT_EQ(r.verdict, Verdict::Advisory);
  EXPECT_TRUE(r.metrics.contains("divergence.center_x"));
  EXPECT_EQ(metric(r, "real_records"), 50.0);
}

TEST(RunAll, NominalPassesAndIsDeterministic) {
  const OddSpec spec = OddSpec::generic_landing();
  DqrReport a = run_all(nominal(), spec, verify_config());
  DqrReport b = run_all(nominal(), spec, verify_config());
  EXPECT_TRUE(a.overall) << serialize_report(a);
  ASSERT_EQ(a.results.size(), 4u);
  EXPECT_EQ(a.result(Requirement::Suitability).verdict, Verdict::Advisory);
  a.timestamp = b.timestamp = "";
  EXPECT_EQ(serialize_report(a), serialize_report(b));
  const auto json = report_to_json(a);
  EXPECT_EQ(json["odd_version"], 1);
  EXPECT_EQ(json["config"]["runway_db"].size(), 10u);
  EXPECT_EQ(json["splits"][0]["records"], 1000);
}

TEST(RunAll, EmptyTestSplitFailsWithNotes) {
  DatasetBundle data;
  data.train = nominal().train;
  data.test.name = SplitName::Test;
  const DqrReport r = run_all(data, OddSpec::generic_landing(), verify_config());
  EXPECT_FALSE(r.overall);
  EXPECT_EQ(r.result(Requirement::Completeness).verdict, Verdict::Fail);
  const DqrResult& rep = r.result(Requirement::Representativeness);
  EXPECT_EQ(rep.verdict, Verdict::Fail);
  EXPECT_EQ(rep.note, "not applicable: test split is empty");
}

TEST(RunAll, OverlappingSplitsAreRejected) {
  DatasetBundle data = nominal();
  data.test.records.push_back(data.train.records[0]);
  EXPECT_THROW(run_all(data, OddSpec::generic_landing(), verify_config()), SplitIntegrityError);
}

TEST(RunAll, HistogramFiles) {
  const DqrReport r = run_all(nominal(), OddSpec::generic_landing(), verify_config());
  const auto dir = std::filesystem::temp_directory_path() / "odd_forge_hist_test";
  std::filesystem::create_directories(dir);
  const auto paths = write_histograms(r.histograms, dir);
  ASSERT_EQ(paths.size(), r.histograms.size());
  std::ifstream in(dir / "histogram_center_x.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "feature,bin_low,bin_high,train_count,test_count");
  std::size_t rows = 0;
  for (std::string l; std::getline(in, l);) ++rows;
  EXPECT_EQ(rows, 20u);
  std::filesystem::remove_all(dir);
}

TEST(Thresholds, OverridesAndStrictness) {
  const VerifyConfig c = parse_thresholds(
      R"({"completeness": {"cone_grid": [4, 2, 2], "min_airports": 3}, "accuracy": {"reprojection_tol_px": 1.5}})");
  EXPECT_EQ(c.completeness.cone_grid, (std::array<int, 3>{4, 2, 2}));
  EXPECT_EQ(c.completeness.min_airports, 3);
  EXPECT_EQ(c.accuracy.reprojection_tol_px, 1.5);
  EXPECT_EQ(c.representativeness.divergence_max, 0.1);
  EXPECT_THROW(parse_thresholds(R"({"completness": {}})"), ConfigError);
  EXPECT_THROW(parse_thresholds(R"({"accuracy": {"tol": 1}})"), ConfigError);
  EXPECT_THROW(parse_thresholds(R"({"representativeness": {"bins": -3}})"), ConfigError);
  EXPECT_THROW(parse_thresholds(R"({"representativeness": {"divergence_max": 2}})"), ConfigError);
  EXPECT_THROW(parse_thresholds("{"), ConfigError);
  const auto round = parse_thresholds(thresholds_to_json(c).dump());
  EXPECT_EQ(thresholds_to_json(round), thresholds_to_json(c));
}

TEST(WorkerThreads, EnvironmentCap) {
  ::setenv("ODD_FORGE_THREADS", "1", 1);
  EXPECT_EQ(worker_threads(), 1u);
  ::setenv("ODD_FORGE_THREADS", "zero", 1);
  EXPECT_THROW(worker_threads(), ConfigError);
  ::unsetenv("ODD_FORGE_THREADS");
  EXPECT_GE(worker_threads(), 1u);
}

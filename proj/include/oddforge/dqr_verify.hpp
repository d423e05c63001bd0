#pragma once

// Data quality checks over labelled datasets: completeness of the approach
// cone coverage, representativeness of the test split against the train
// split, label accuracy, and an advisory synthetic-vs-real comparison.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oddforge/dataset_io.hpp"
#include "oddforge/geometry.hpp"
#include "oddforge/histogram.hpp"
#include "oddforge/odd_spec.hpp"

namespace oddforge {

enum class Requirement { Suitability, Completeness, Representativeness, Accuracy };
std::string_view to_string(Requirement requirement);

enum class Verdict { Pass, Fail, Advisory };
std::string_view to_string(Verdict verdict);

enum class Bound { AtMost, AtLeast };

struct Threshold {
  double value{};
  Bound bound{Bound::AtMost};

  /// NaN never satisfies a threshold.
  bool satisfied_by(double metric) const;
};

struct DqrResult {
  Requirement requirement{Requirement::Completeness};
  std::map<std::string, double> metrics;
  std::map<std::string, Threshold> thresholds;
  Verdict verdict{Verdict::Fail};
  nlohmann::ordered_json evidence = nlohmann::ordered_json::object();
  std::string note;

  /// Names of thresholded metrics that are missing or out of bounds.
  std::vector<std::string> failed_metrics() const;
};

/// Pass iff every threshold is met by its metric; Advisory is left untouched.
void settle_verdict(DqrResult& result);

// Feature names understood by the histogram comparison.
namespace feature {
inline constexpr const char* center_x = "center_x";  // runway center u / image width
inline constexpr const char* center_y = "center_y";  // runway center v / image height
inline constexpr const char* aspect_ratio = "aspect_ratio";
inline constexpr const char* fill_ratio = "fill_ratio";
inline constexpr const char* bbox_area_log = "bbox_area_log";  // log10 of the bbox area in px^2
inline constexpr const char* slant_distance = "slant_distance";
inline constexpr const char* time_to_landing = "time_to_landing";
}  // namespace feature

struct HistogramSpec {
  std::string feature;
  std::size_t bins{20};
  /// Taken from the pooled data of both splits when absent.
  std::optional<Interval> range;
};

/// Image features plus one feature per cone parameter, with ranges implied by the cone.
std::vector<HistogramSpec> default_histogram_specs(const ApproachCone& cone, std::size_t bins = 20);

/// Value of a feature for one record, or nullopt when the record does not carry it.
/// aspect_ratio and bbox_area_log use the stored bbox; fill_ratio uses the hull box.
std::optional<double> feature_value(const DatasetRecord& record, const std::string& name);

struct CompletenessConfig {
  std::array<int, 3> cone_grid{8, 4, 4};      // along-track, lateral, vertical
  std::array<int, 3> attitude_grid{4, 4, 4};  // yaw, pitch, roll
  int min_per_cell{1};
  double cone_coverage_min{0.95};
  double attitude_coverage_min{0.95};
  int min_airports{10};
};

struct RepresentativenessConfig {
  std::size_t bins{20};
  std::vector<HistogramSpec> specs;  // default_histogram_specs when empty
  double divergence_max{0.1};
  Interval aspect_band{0.5, 1.5};
  double aspect_floor{0.80};
  Interval fill_band{0.20, 0.80};
  double fill_floor{0.80};
  double area_min_px2{625.0};
  double area_floor{0.95};
  double range_coverage_min{0.90};
  bool per_airport{false};
};

struct AccuracyConfig {
  double reprojection_tol_px{0.5};
};

struct VerifyConfig {
  CompletenessConfig completeness;
  RepresentativenessConfig representativeness;
  AccuracyConfig accuracy;
  CameraModel camera;
  RunwayDb runways;

  /// Throws ConfigError when a value is outside its documented range.
  void validate() const;
};

/// Coverage of the position grid and the attitude grid, and airport count.
/// Over several splits each metric is the minimum across splits. An empty
/// split has zero coverage. Throws NotApplicableError when a non-empty split
/// has no record with a pose.
DqrResult check_completeness(const std::vector<const DatasetSplit*>& splits, const ApproachCone& cone,
                             const CompletenessConfig& cfg);
DqrResult check_completeness(const DatasetSplit& split, const ApproachCone& cone, const CompletenessConfig& cfg);

struct FeatureHistograms {
  std::string feature;
  Histogram train;
  Histogram test;
  double divergence{};
};

struct BandCounts {
  std::size_t labelled{};  // records with four finite corners
  std::size_t aspect_in_band{};
  std::size_t fill_in_band{};
  std::size_t area_at_least{};
};

/// Band counts over one split. A degenerate bbox is out of the aspect band and
/// a non-simple quadrilateral is out of the fill band.
BandCounts count_bands(const DatasetSplit& split, const RepresentativenessConfig& cfg);

/// Throws NotApplicableError when either split is empty.
DqrResult check_representativeness(const DatasetSplit& train, const DatasetSplit& test, const ApproachCone& cone,
                                   const RepresentativenessConfig& cfg,
                                   std::vector<FeatureHistograms>* histograms = nullptr);

/// Reprojection error of synthetic records against the runway database and
/// structural checks on every record.
DqrResult check_accuracy(const std::vector<const DatasetSplit*>& splits, const CameraModel& cam, const RunwayDb& runways,
                         const AccuracyConfig& cfg);
DqrResult check_accuracy(const DatasetSplit& split, const CameraModel& cam, const RunwayDb& runways,
                         const AccuracyConfig& cfg);

/// Always advisory.
DqrResult check_source_suitability(const std::vector<const DatasetSplit*>& splits, std::size_t bins = 20);
DqrResult check_source_suitability(const DatasetSplit& split, std::size_t bins = 20);

struct SplitSummary {
  std::string name;
  std::size_t records{};
  std::size_t synthetic{};
  std::size_t real{};
};

struct DqrReport {
  int odd_version{};
  std::vector<SplitSummary> splits;
  std::vector<DqrResult> results;  // suitability, completeness, representativeness, accuracy
  std::vector<FeatureHistograms> histograms;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string timestamp;
  bool overall{false};

  const DqrResult& result(Requirement requirement) const;
};

struct DatasetBundle {
  DatasetSplit train;
  DatasetSplit test;
  std::optional<DatasetSplit> real_subset;
};

/// Runs all four checks. A NotApplicableError in a check becomes a failed
/// result carrying the reason. Overall passes iff completeness,
/// representativeness and accuracy pass.
DqrReport run_all(const DatasetBundle& data, const OddSpec& spec, const VerifyConfig& cfg);

/// Number of worker threads: hardware concurrency, capped by ODD_FORGE_THREADS.
unsigned worker_threads();

// Report and configuration files.

nlohmann::ordered_json report_to_json(const DqrReport& report);
std::string serialize_report(const DqrReport& report);
void write_report(const DqrReport& report, const std::filesystem::path& path);

/// "feature,bin_low,bin_high,train_count,test_count" rows for one feature.
std::string serialize_histogram_csv(const FeatureHistograms& h);
/// One histogram_<feature>.csv per feature. Returns the written paths.
std::vector<std::filesystem::path> write_histograms(const std::vector<FeatureHistograms>& histograms,
                                                    const std::filesystem::path& dir);

/// Thresholds document: {"completeness": {...}, "representativeness": {...},
/// "accuracy": {...}}. Every key is optional and overrides the value in `base`;
/// unknown keys are rejected. Throws ConfigError.
VerifyConfig parse_thresholds(std::string_view text, VerifyConfig base = {});
VerifyConfig load_thresholds(const std::filesystem::path& path, VerifyConfig base = {});
nlohmann::ordered_json thresholds_to_json(const VerifyConfig& cfg);

}  // namespace oddforge

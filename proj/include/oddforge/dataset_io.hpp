#pragma once

// Dataset records, label files, scenario keyframe files and the runway /
// camera configuration documents.
//
// Label CSV layout (schema version 1). The first line is a comment
// "# odd_forge labels schema_version=1", then the header:
//
//   image_id,source,airport,runway,width,height,x1,y1,x2,y2,x3,y3,x4,y4,
//   bbox_xmin,bbox_ymin,bbox_xmax,bbox_ymax,slant_distance_m,time_to_landing_s,
//   along_track_m,lateral_deg,vertical_deg,yaw_deg,pitch_deg,roll_deg,
//   margin_px,fully_visible,nx1,ny1,nx2,ny2,nx3,ny3,nx4,ny4,concepts,<extra...>
//
// Corners are ordered near-left, near-right, far-right, far-left. Absolute
// pixels are canonical; nx/ny are the same corners divided by width/height and
// are checked against them on load. Absent optionals are empty cells. Columns
// after "concepts" are opaque metadata and are carried through unchanged.
// Only the first 26 columns are required when reading.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oddforge/geometry.hpp"
#include "oddforge/odd_spec.hpp"
#include "oddforge/sampling.hpp"

namespace oddforge {

enum class Source { Synthetic, Real };
std::string_view to_string(Source source);
std::optional<Source> parse_source(std::string_view text);

enum class SplitName { Train, Test, RealSubset };
std::string_view to_string(SplitName name);

enum class FileFormat { Csv, Json };
std::string_view to_string(FileFormat format);
std::optional<FileFormat> parse_format(std::string_view text);
/// From the extension (".json" -> Json, anything else -> Csv).
FileFormat format_from_path(const std::filesystem::path& path);

struct ImageSize {
  int width{};
  int height{};

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct DatasetRecord {
  std::string image_id;
  Source source{Source::Synthetic};
  std::string airport_id;
  std::string runway_id;
  ImageLabel label;
  std::optional<Pose> pose;                // synthetic only
  std::optional<double> slant_distance_m;  // synthetic only
  std::optional<double> time_to_landing_s; // real only
  ImageSize image_size;
  std::vector<ConceptTag> concepts;
  std::map<std::string, std::string> metadata;
};

/// Field-for-field equality; NaN corners compare equal to NaN.
bool equivalent(const DatasetRecord& a, const DatasetRecord& b);

/// Schema violations of one record, as human-readable reasons. Empty means valid.
std::vector<std::string> validate_record(const DatasetRecord& record);

struct DatasetSplit {
  SplitName name{SplitName::Train};
  std::vector<DatasetRecord> records;
};

/// Throws SplitIntegrityError if any image id appears in both splits.
void check_disjoint(const DatasetSplit& train, const DatasetSplit& test);

struct RowRejection {
  std::size_t row{};  // 1-based data row (CSV) or record index (JSON)
  std::string image_id;
  std::string reason;
};

struct LoadResult {
  DatasetSplit split;
  std::vector<RowRejection> rejections;
  std::size_t input_rows{};
};

/// Parse and schema-validate every row. Invalid rows go to `rejections`.
/// Throws IoError when unreadable and FormatError on unusable structure or
/// when more than half of the rows are rejected.
LoadResult load_records(const std::filesystem::path& path, FileFormat format, SplitName name = SplitName::Train);
LoadResult parse_records(std::string_view text, FileFormat format, SplitName name = SplitName::Train);

std::string serialize_labels(const std::vector<DatasetRecord>& records, FileFormat format);
/// Throws IoError when the path cannot be written.
void write_labels(const std::vector<DatasetRecord>& records, const std::filesystem::path& path, FileFormat format);

/// Synthetic record for one pose: projected label, slant distance, pose.
DatasetRecord label_pose(const std::string& image_id, const Pose& pose, const RunwayGeometry& rw,
                         const CameraModel& cam, double margin_px = kDefaultMarginPx);

// Scenario keyframes: JSON array with one object per line,
// {"frame", "lat", "lon", "alt_m", "yaw", "pitch", "roll"}; yaw is the true heading.

std::string serialize_scenario(const Trajectory& traj, const RunwayGeometry& rw);
/// Throws ConfigError without a runway georef and IoError on write failure.
void write_scenario(const Trajectory& traj, const RunwayGeometry& rw, const std::filesystem::path& path);
std::vector<Keyframe> parse_scenario(std::string_view text);

// Runway database (JSON):
//   {"runways": [{"airport": "LFBO", "runway": "14R", "length_m": 3500, "width_m": 45,
//                 "aiming_point_offset_m": 300,
//                 "georef": {"latitude_deg": .., "longitude_deg": .., "elevation_m": .., "heading_deg": ..}}]}
// aiming_point_offset_m defaults to 300 and georef is optional.

class RunwayDb {
 public:
  RunwayDb() = default;
  explicit RunwayDb(std::vector<RunwayGeometry> runways);

  const RunwayGeometry* find(std::string_view airport, std::string_view runway) const;
  /// Accepts "AIRPORT/RUNWAY".
  const RunwayGeometry* find(std::string_view id) const;
  const std::vector<RunwayGeometry>& all() const { return runways_; }
  bool empty() const { return runways_.empty(); }

 private:
  std::vector<RunwayGeometry> runways_;
};

RunwayDb parse_runway_db(std::string_view text);
RunwayDb load_runway_db(const std::filesystem::path& path);
std::string serialize_runway_db(const RunwayDb& db);

/// Camera JSON with optional keys focal_px, width_px, height_px, cx, cy,
/// crop_top_px, crop_bottom_px. The principal point defaults to the image center.
CameraModel parse_camera(std::string_view text);
CameraModel load_camera(const std::filesystem::path& path);

// Pose table written by the sampler:
//   pose_id,along_track_m,lateral_deg,vertical_deg,yaw_deg,pitch_deg,roll_deg,x_m,y_m,z_m,slant_distance_m

struct PoseRow {
  std::string pose_id;
  Pose pose;
};

std::string serialize_poses(const std::vector<PoseRow>& poses);
void write_poses(const std::vector<PoseRow>& poses, const std::filesystem::path& path);
/// Throws FormatError on a missing column or unparsable value.
std::vector<PoseRow> parse_poses(std::string_view text);
std::vector<PoseRow> load_poses(const std::filesystem::path& path);

}  // namespace oddforge

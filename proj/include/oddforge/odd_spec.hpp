#pragma once

// Operational Design Domain of a vision-based landing function: the generic
// landing approach cone (six closed parameter ranges), categorical
// restrictions accumulated through refinement, and non-nominal sample
// classification.
//
// Canonical units are meters and degrees. Along-track ranges declared in
// nautical miles are converted with 1 NM = 1852 m when the cone is built.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace oddforge {

/// Closed interval [min, max]; both ends inclusive.
struct Interval {
  double min{};
  double max{};

  bool contains(double x) const { return x >= min && x <= max; }
  double width() const { return max - min; }
  double center() const { return 0.5 * (min + max); }
  bool empty() const { return !(min <= max); }
  bool degenerate() const { return min == max; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Unit { NauticalMiles, Meters, Degrees, Unitless };

std::string_view to_string(Unit unit);
std::optional<Unit> parse_unit(std::string_view text);

enum class ParameterKind { Continuous, Categorical };

std::string_view to_string(ParameterKind kind);
std::optional<ParameterKind> parse_parameter_kind(std::string_view text);

/// One declared ODD parameter, kept in the unit it was declared with.
struct ParameterSpec {
  std::string name;
  ParameterKind kind{ParameterKind::Continuous};
  Unit unit{Unit::Unitless};
  Interval range{};                 // continuous only
  std::vector<std::string> values;  // categorical only

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

namespace param {
inline constexpr std::string_view kAlongTrack = "along_track";
inline constexpr std::string_view kVerticalPath = "vertical_path";
inline constexpr std::string_view kLateralPath = "lateral_path";
inline constexpr std::string_view kYaw = "yaw";
inline constexpr std::string_view kPitch = "pitch";
inline constexpr std::string_view kRoll = "roll";
}  // namespace param

/// The six cone parameter names, in the order used for grids and reports.
const std::vector<std::string>& cone_parameter_names();

/// Aircraft position and attitude expressed in cone parameters.
struct Pose {
  double along_track_m{};
  double lateral_path_deg{};
  double vertical_path_deg{};
  double yaw_deg{};
  double pitch_deg{};
  double roll_deg{};

  /// Value of a cone parameter by name; throws InvalidInputError on unknown names.
  double get(std::string_view parameter) const;
  bool finite() const;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Generic landing approach cone, canonical units (m, deg).
struct ApproachCone {
  Interval along_track_m{};
  Interval lateral_path_deg{};
  Interval vertical_path_deg{};
  Interval yaw_deg{};
  Interval pitch_deg{};
  Interval roll_deg{};

  /// Ranges: along-track [0.08, 3] NM, vertical [-3.8, -2.2] deg,
  /// lateral [-4, 4] deg, yaw [-10, 10] deg, pitch [-8, 0] deg, roll [-10, 10] deg.
  static ApproachCone generic();

  const Interval& get(std::string_view parameter) const;
  Pose center() const;

  friend bool operator==(const ApproachCone&, const ApproachCone&) = default;
};

/// True iff every pose field lies inside its interval (inclusive).
/// Throws InvalidInputError when a pose field is not finite.
bool contains(const ApproachCone& cone, const Pose& pose);

namespace restriction {
inline constexpr std::string_view kSingleRunwayInCone = "single_runway_in_cone";
inline constexpr std::string_view kPianoPresent = "piano_present";
inline constexpr std::string_view kRunwayFullyVisible = "runway_fully_visible";
inline constexpr std::string_view kClearDaylightNoAdverseWeather = "clear_daylight_no_adverse_weather";
}  // namespace restriction

/// Registry of restriction flags the toolkit recognises.
const std::set<std::string, std::less<>>& known_restrictions();

/// A versioned ODD. Immutable once built; refinements point at their parent.
class OddSpec {
 public:
  OddSpec(int version, std::vector<ParameterSpec> parameters, std::vector<std::string> restrictions,
          std::optional<int> parent_version = std::nullopt,
          std::shared_ptr<const OddSpec> parent = nullptr);

  /// Version 1: the generic approach cone with no restrictions.
  static OddSpec generic_landing();

  int version() const { return version_; }
  std::optional<int> parent_version() const { return parent_version_; }
  const std::shared_ptr<const OddSpec>& parent() const { return parent_; }
  const std::vector<ParameterSpec>& parameters() const { return parameters_; }
  const std::vector<std::string>& restrictions() const { return restrictions_; }

  bool has_restriction(std::string_view flag) const;
  const ParameterSpec* find_parameter(std::string_view name) const;

  /// Cone in canonical units. Throws InvalidInputError when a cone parameter is
  /// missing, has the wrong unit, or has an empty interval.
  ApproachCone cone() const;

 private:
  int version_;
  std::vector<ParameterSpec> parameters_;
  std::vector<std::string> restrictions_;
  std::optional<int> parent_version_;
  std::shared_ptr<const OddSpec> parent_;
};

/// Structural equality of the declared content (lineage objects not compared).
bool same_content(const OddSpec& a, const OddSpec& b);

struct SpecViolation {
  std::string kind;     // "empty interval", "restriction regression", ...
  std::string subject;  // parameter, restriction or version concerned
  std::string message;
};

/// Every invariant violation of the ODD and its lineage; empty means ok.
std::vector<SpecViolation> validate_spec(const OddSpec& spec);

struct RefineResult {
  OddSpec spec;
  std::vector<std::string> warnings;
};

/// New version with `added` restrictions merged in and the parent link set.
/// Restrictions already present are skipped with a warning.
RefineResult refine(const OddSpec& spec, const std::vector<std::string>& added);

enum class SampleStatus { InOdd, EdgeCase, Outlier };

std::string_view to_string(SampleStatus status);

struct SampleClassification {
  SampleStatus status{SampleStatus::InOdd};
  std::vector<std::string> violated_parameters;
  /// Signed distance to the nearest boundary as a fraction of the range
  /// width: 0.5 at the center, 0 on a boundary, negative outside.
  std::map<std::string, double> boundary_proximity;
};

inline constexpr double kDefaultEdgeBand = 0.05;

/// outlier if any parameter is outside its interval; edge_case if all inside
/// but one lies within edge_band * width of a boundary; in_odd otherwise.
/// Throws InvalidInputError unless 0 < edge_band < 0.5, or for a non-finite pose.
SampleClassification classify_sample(const ApproachCone& cone, const Pose& pose,
                                     double edge_band = kDefaultEdgeBand);
SampleClassification classify_sample(const OddSpec& spec, const Pose& pose,
                                     double edge_band = kDefaultEdgeBand);

// Expert concept taxonomy used to annotate images and audit detections.

enum class ConceptCategory { Primary, Secondary, Tertiary, Quaternary };

std::string_view to_string(ConceptCategory category);
std::optional<ConceptCategory> parse_concept_category(std::string_view text);

struct ConceptTag {
  std::string label;
  ConceptCategory category{ConceptCategory::Primary};

  friend bool operator==(const ConceptTag&, const ConceptTag&) = default;
};

/// Reference runway-detection concepts, grouped by category.
const std::vector<ConceptTag>& runway_concept_taxonomy();

}  // namespace oddforge

#pragma once

// Labelling geometry: pose conversion, pinhole projection of runway corners,
// bounding boxes and shape metrics.
//
// Frames
//   runway frame  origin at the Aiming Point; +X along the centerline toward
//                 the approaching aircraft, +Y to the right of the centerline
//                 as seen from the aircraft, +Z up. The runway lies in z = 0.
//   body frame    x forward, y right, z down. At zero attitude the aircraft
//                 looks along -X, right is +Y and down is -Z.
//   camera frame  Z forward (boresight = body x), X right, Y down.
//
// Attitude is applied as yaw about the vertical, then pitch about the new
// lateral axis, then roll about the boresight (Z-Y'-X'' intrinsic). Positive
// yaw turns the nose right, positive pitch raises it, positive roll lowers
// the right wing.

#include <array>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "oddforge/odd_spec.hpp"

namespace oddforge {

struct GeoRef {
  double latitude_deg{};
  double longitude_deg{};
  double elevation_m{};
  double heading_deg{};  // true heading of the landing direction

  friend bool operator==(const GeoRef&, const GeoRef&) = default;
};

struct RunwayGeometry {
  std::string airport;
  std::string runway;
  double length_m{3000.0};
  double width_m{45.0};
  double aiming_point_offset_m{300.0};  // landing threshold to Aiming Point
  std::optional<GeoRef> georef;         // position of the Aiming Point

  /// "AIRPORT/RUNWAY".
  std::string id() const { return airport + "/" + runway; }
  /// Throws InvalidInputError unless length > offset >= 0 and width > 0.
  void validate() const;
};

struct CartesianPose {
  double x_m{};  // along-track from the Aiming Point toward the approach
  double y_m{};  // cross-track, positive right of the centerline
  double z_m{};  // height above the runway plane
  double yaw_deg{};
  double pitch_deg{};
  double roll_deg{};

  Eigen::Vector3d position() const { return {x_m, y_m, z_m}; }
};

struct CameraModel {
  double focal_px{1400.0};
  int width_px{2448};
  int height_px{2048};
  double cx{1224.0};
  double cy{1024.0};
  double crop_top_px{300.0};
  double crop_bottom_px{300.0};

  /// Throws InvalidInputError on a non-positive focal, bad crop or principal point.
  void validate() const;
  double usable_top() const { return crop_top_px; }
  double usable_bottom() const { return static_cast<double>(height_px) - crop_bottom_px; }

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

struct PixelPoint {
  double u{};
  double v{};

  bool finite() const;
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct BBox {
  double x_min{};
  double y_min{};
  double x_max{};
  double y_max{};

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(const PixelPoint& p) const {
    return p.u >= x_min && p.u <= x_max && p.v >= y_min && p.v <= y_max;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Corner order used everywhere in labels.
enum class Corner { NearLeft = 0, NearRight = 1, FarRight = 2, FarLeft = 3 };

using Corners = std::array<PixelPoint, 4>;

struct ImageLabel {
  Corners corners{};  // near-left, near-right, far-right, far-left
  BBox bbox{};
  double margin_px{};
  bool fully_visible{false};
  /// False when a corner lies at or behind the camera plane; such corners
  /// and the bbox are NaN.
  bool projectable{true};

  friend bool operator==(const ImageLabel&, const ImageLabel&) = default;
};

inline constexpr double kDefaultMarginPx = 5.0;

/// x = d, y = d tan(lateral), z = d tan(-vertical); attitude copied.
/// Throws InvalidInputError for d <= 0 and DomainError for |angle| >= 90 deg.
CartesianPose to_cartesian(const Pose& pose);

/// Near-left, near-right, far-right, far-left in the runway frame.
std::array<Eigen::Vector3d, 4> runway_corners_world(const RunwayGeometry& rw);

/// Rotation from body axes to runway-frame axes for the given attitude.
Eigen::Matrix3d body_to_world_rotation(double yaw_deg, double pitch_deg, double roll_deg);

/// Rigid transform mapping runway-frame points to camera coordinates.
Eigen::Matrix4d extrinsic_matrix(const CartesianPose& cpose);

/// [[f, 0, cx], [0, f, cy], [0, 0, 1]].
Eigen::Matrix3d intrinsic_matrix(const CameraModel& cam);

/// Project one runway-frame point; nullopt when its depth is not positive.
std::optional<PixelPoint> project_point(const Eigen::Matrix4d& extrinsic, const Eigen::Matrix3d& intrinsic,
                                        const Eigen::Vector3d& world);

ImageLabel project_runway(const Pose& pose, const RunwayGeometry& rw, const CameraModel& cam,
                          double margin_px = kDefaultMarginPx);

/// Componentwise min/max expanded by margin, clamped to the cropped image region.
BBox bounding_box(const Corners& corners, double margin_px, const CameraModel& cam);

/// Tight min/max box of the corners with no margin or clamping.
BBox hull_box(const Corners& corners);

/// Shoelace area of the corner quadrilateral (absolute value).
double quad_area(const Corners& corners);

/// True when no pair of non-adjacent edges intersects and the area is positive.
bool is_simple_quad(const Corners& corners);

/// Quadrilateral area over bbox area. Throws InvalidLabelError for a
/// self-intersecting quad or a bbox that does not contain the corners.
double fill_ratio(const Corners& corners, const BBox& bbox);
/// Same, against the corners' own hull box.
double fill_ratio(const Corners& corners);

/// Height over width. Throws DegenerateBboxError for zero width.
double aspect_ratio(const BBox& bbox);

/// Distance from the camera to the Aiming Point.
double slant_distance(const CartesianPose& cpose);

/// Mean of the four corners.
PixelPoint runway_center(const Corners& corners);

}  // namespace oddforge

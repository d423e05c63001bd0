#include "oddforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "oddforge/error.hpp"
#include "oddforge/units.hpp"

namespace oddforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Columns are the body axes (forward, right, down) at zero attitude, in runway-frame coordinates.
const Eigen::Matrix3d& level_body_axes() {
  static const Eigen::Matrix3d axes = (Eigen::Matrix3d() << -1, 0, 0,  //
                                       0, 1, 0,                       //
                                       0, 0, -1)
                                          .finished();
  return axes;
}

// Camera (X right, Y down, Z forward) from body (x forward, y right, z down).
const Eigen::Matrix3d& camera_from_body() {
  static const Eigen::Matrix3d perm = (Eigen::Matrix3d() << 0, 1, 0,  //
                                       0, 0, 1,                       //
                                       1, 0, 0)
                                          .finished();
  return perm;
}

double cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

bool on_segment(const PixelPoint& p, const PixelPoint& a, const PixelPoint& b) {
  return std::min(a.u, b.u) <= p.u && p.u <= std::max(a.u, b.u) && std::min(a.v, b.v) <= p.v &&
         p.v <= std::max(a.v, b.v);
}

bool segments_intersect(const PixelPoint& p1, const PixelPoint& p2, const PixelPoint& q1, const PixelPoint& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

}  // namespace

void RunwayGeometry::validate() const {
  if (!(width_m > 0.0)) throw InvalidInputError("runway " + id() + ": width must be positive");
  if (!(aiming_point_offset_m >= 0.0)) throw InvalidInputError("runway " + id() + ": aiming point offset must be >= 0");
  if (!(length_m > aiming_point_offset_m)) {
    throw InvalidInputError("runway " + id() + ": length must exceed the aiming point offset");
  }
}

void CameraModel::validate() const {
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) throw InvalidInputError("camera focal length must be positive");
  if (width_px <= 0 || height_px <= 0) throw InvalidInputError("camera resolution must be positive");
  if (!(crop_top_px >= 0.0 && crop_bottom_px >= 0.0 && crop_top_px + crop_bottom_px < height_px)) {
    throw InvalidInputError("camera crop bands must satisfy 0 <= top + bottom < height");
  }
  if (!(cx >= 0.0 && cx < width_px && cy >= 0.0 && cy < height_px)) {
    throw InvalidInputError("camera principal point must lie inside the image");
  }
}

bool PixelPoint::finite() const { return std::isfinite(u) && std::isfinite(v); }

CartesianPose to_cartesian(const Pose& pose) {
  if (!pose.finite()) throw InvalidInputError("pose has a non-finite field");
  if (!(pose.along_track_m > 0.0)) throw InvalidInputError("along-track distance must be positive");
  if (std::fabs(pose.lateral_path_deg) >= 90.0 || std::fabs(pose.vertical_path_deg) >= 90.0) {
    throw DomainError("path angles must be strictly within (-90, 90) degrees");
  }
  const double d = pose.along_track_m;
  return CartesianPose{d,
                       d * std::tan(deg_to_rad(pose.lateral_path_deg)),
                       d * std::tan(deg_to_rad(-pose.vertical_path_deg)),
                       pose.yaw_deg,
                       pose.pitch_deg,
                       pose.roll_deg};
}

std::array<Eigen::Vector3d, 4> runway_corners_world(const RunwayGeometry& rw) {
  const double near_x = rw.aiming_point_offset_m;
  const double far_x = rw.aiming_point_offset_m - rw.length_m;
  const double half = rw.width_m / 2.0;
  return {Eigen::Vector3d{near_x, -half, 0.0}, Eigen::Vector3d{near_x, half, 0.0}, Eigen::Vector3d{far_x, half, 0.0},
          Eigen::Vector3d{far_x, -half, 0.0}};
}

Eigen::Matrix3d body_to_world_rotation(double yaw_deg, double pitch_deg, double roll_deg) {
  const Eigen::Matrix3d attitude = (Eigen::AngleAxisd(deg_to_rad(yaw_deg), Eigen::Vector3d::UnitZ()) *
                                    Eigen::AngleAxisd(deg_to_rad(pitch_deg), Eigen::Vector3d::UnitY()) *
                                    Eigen::AngleAxisd(deg_to_rad(roll_deg), Eigen::Vector3d::UnitX()))
                                       .toRotationMatrix();
  return level_body_axes() * attitude;
}

Eigen::Matrix4d extrinsic_matrix(const CartesianPose& cpose) {
  const Eigen::Matrix3d r_cw =
      camera_from_body() * body_to_world_rotation(cpose.yaw_deg, cpose.pitch_deg, cpose.roll_deg).transpose();
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topLeftCorner<3, 3>() = r_cw;
  t.topRightCorner<3, 1>() = -r_cw * cpose.position();
  return t;
}

Eigen::Matrix3d intrinsic_matrix(const CameraModel& cam) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = cam.focal_px;
  k(1, 1) = cam.focal_px;
  k(0, 2) = cam.cx;
  k(1, 2) = cam.cy;
  return k;
}

std::optional<PixelPoint> project_point(const Eigen::Matrix4d& extrinsic, const Eigen::Matrix3d& intrinsic,
                                        const Eigen::Vector3d& world) {
  const Eigen::Vector3d cam_pt = extrinsic.topLeftCorner<3, 3>() * world + extrinsic.topRightCorner<3, 1>();
  if (!(cam_pt.z() > 0.0)) return std::nullopt;
  const Eigen::Vector3d h = intrinsic * cam_pt;
  return PixelPoint{h.x() / h.z(), h.y() / h.z()};
}

ImageLabel project_runway(const Pose& pose, const RunwayGeometry& rw, const CameraModel& cam, double margin_px) {
  if (!(margin_px >= 0.0)) throw InvalidInputError("margin_px must be >= 0");
  const Eigen::Matrix4d ext = extrinsic_matrix(to_cartesian(pose));
  const Eigen::Matrix3d k = intrinsic_matrix(cam);
  const auto world = runway_corners_world(rw);

  ImageLabel label;
  label.margin_px = margin_px;
  for (std::size_t i = 0; i < world.size(); ++i) {
    auto px = project_point(ext, k, world[i]);
    if (px) {
      label.corners[i] = *px;
    } else {
      label.corners[i] = {kNaN, kNaN};
      label.projectable = false;
    }
  }
  if (!label.projectable) {
    label.bbox = {kNaN, kNaN, kNaN, kNaN};
    label.fully_visible = false;
    return label;
  }
  const double top = cam.usable_top();
  const double bottom = cam.usable_bottom();
  label.fully_visible = std::all_of(label.corners.begin(), label.corners.end(), [&](const PixelPoint& p) {
    return p.u >= 0.0 && p.u < cam.width_px && p.v >= top && p.v < bottom;
  });
  label.bbox = bounding_box(label.corners, margin_px, cam);
  return label;
}

BBox hull_box(const Corners& corners) {
  BBox box{corners[0].u, corners[0].v, corners[0].u, corners[0].v};
  for (const auto& p : corners) {
    box.x_min = std::min(box.x_min, p.u);
    box.x_max = std::max(box.x_max, p.u);
    box.y_min = std::min(box.y_min, p.v);
    box.y_max = std::max(box.y_max, p.v);
  }
  return box;
}

BBox bounding_box(const Corners& corners, double margin_px, const CameraModel& cam) {
  BBox box = hull_box(corners);
  box.x_min = std::clamp(box.x_min - margin_px, 0.0, static_cast<double>(cam.width_px));
  box.x_max = std::clamp(box.x_max + margin_px, 0.0, static_cast<double>(cam.width_px));
  box.y_min = std::clamp(box.y_min - margin_px, cam.usable_top(), cam.usable_bottom());
  box.y_max = std::clamp(box.y_max + margin_px, cam.usable_top(), cam.usable_bottom());
  return box;
}

double quad_area(const Corners& c) {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = c[i];
    const auto& b = c[(i + 1) % 4];
    twice += a.u * b.v - b.u * a.v;
  }
  return std::fabs(twice) / 2.0;
}

bool is_simple_quad(const Corners& c) {
  if (!std::all_of(c.begin(), c.end(), [](const PixelPoint& p) { return p.finite(); })) return false;
  if (segments_intersect(c[0], c[1], c[2], c[3])) return false;
  if (segments_intersect(c[1], c[2], c[3], c[0])) return false;
  return quad_area(c) > 0.0;
}

double fill_ratio(const Corners& corners, const BBox& bbox) {
  if (!is_simple_quad(corners)) throw InvalidLabelError("corner quadrilateral is not simple");
  if (!(bbox.area() > 0.0)) throw InvalidLabelError("bounding box has no area");
  constexpr double kSlack = 1e-9;
  for (const auto& p : corners) {
    if (p.u < bbox.x_min - kSlack || p.u > bbox.x_max + kSlack || p.v < bbox.y_min - kSlack ||
        p.v > bbox.y_max + kSlack) {
      throw InvalidLabelError("bounding box does not contain every corner");
    }
  }
  return quad_area(corners) / bbox.area();
}

double fill_ratio(const Corners& corners) { return fill_ratio(corners, hull_box(corners)); }

double aspect_ratio(const BBox& bbox) {
  if (!(bbox.width() > 0.0)) throw DegenerateBboxError("bounding box has zero width");
  return bbox.height() / bbox.width();
}

double slant_distance(const CartesianPose& cpose) { return cpose.position().norm(); }

PixelPoint runway_center(const Corners& corners) {
  PixelPoint c{0.0, 0.0};
  for (const auto& p : corners) {
    c.u += p.u;
    c.v += p.v;
  }
  return {c.u / 4.0, c.v / 4.0};
}

}  // namespace oddforge

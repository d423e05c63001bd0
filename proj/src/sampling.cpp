#include "oddforge/sampling.hpp"

#include <cmath>
#include <sstream>

#include "oddforge/error.hpp"
#include "oddforge/units.hpp"

namespace oddforge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kWgs84A = 6378137.0;
constexpr double kWgs84F = 1.0 / 298.257223563;
constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

struct Radii {
  double meridional;
  double normal;
};

Radii radii_at(double latitude_deg) {
  const double s = std::sin(deg_to_rad(latitude_deg));
  const double w = 1.0 - kWgs84E2 * s * s;
  return {kWgs84A * (1.0 - kWgs84E2) / (w * std::sqrt(w)), kWgs84A / std::sqrt(w)};
}

const GeoRef& require_georef(const RunwayGeometry& rw) {
  if (!rw.georef) throw ConfigError("runway " + rw.id() + " has no georeference");
  return *rw.georef;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t index, std::uint64_t stream) const {
  return splitmix64(splitmix64(seed_ ^ splitmix64(stream)) + index);
}

double CounterRng::uniform(std::uint64_t index, std::uint64_t stream) const {
  return static_cast<double>(bits(index, stream) >> 11) * 0x1.0p-53;
}

void SamplingConfig::validate() const {
  if (count < 1) throw InvalidInputError("sample count must be >= 1");
  if (const auto* s = std::get_if<StratifiedStrategy>(&strategy)) {
    for (int b : s->bins) {
      if (b < 1) throw InvalidInputError("stratified bin counts must be >= 1");
    }
  }
}

std::vector<Pose> sample_cone_range(const ApproachCone& cone, const SamplingConfig& cfg, std::size_t first,
                                    std::size_t last) {
  cfg.validate();
  const CounterRng rng(cfg.seed);
  const auto& names = cone_parameter_names();
  const auto* strat = std::get_if<StratifiedStrategy>(&cfg.strategy);
  std::size_t cells = 1;
  if (strat) {
    for (int b : strat->bins) cells *= static_cast<std::size_t>(b);
  }

  std::vector<Pose> out;
  out.reserve(last > first ? last - first : 0);
  for (std::size_t i = first; i < last; ++i) {
    std::array<double, 6> values{};
    std::size_t cell = strat ? i % cells : 0;
    for (std::size_t p = 0; p < names.size(); ++p) {
      const Interval& range = cone.get(names[p]);
      const double u = rng.uniform(i, p);
      if (strat) {
        const auto bins = static_cast<std::size_t>(strat->bins[p]);
        const std::size_t k = cell % bins;
        cell /= bins;
        const double w = range.width() / static_cast<double>(bins);
        values[p] = range.min + (static_cast<double>(k) + u) * w;
      } else {
        values[p] = range.min + u * range.width();
      }
      values[p] = std::min(values[p], range.max);
    }
    out.push_back(Pose{values[0], values[1], values[2], values[3], values[4], values[5]});
  }
  return out;
}

std::vector<Pose> sample_cone(const ApproachCone& cone, const SamplingConfig& cfg) {
  return sample_cone_range(cone, cfg, 0, cfg.count);
}

Trajectory generate_trajectory(const ApproachCone& cone, const Pose& entry, std::size_t frames,
                               const ScenarioKind& kind, double frame_interval_s) {
  if (frames < 2) throw InvalidInputError("a trajectory needs at least 2 frames");
  if (!(frame_interval_s > 0.0)) throw InvalidInputError("frame interval must be positive");
  if (!contains(cone, entry)) throw InvalidInputError("trajectory entry pose is outside the approach cone");

  const double d0 = entry.along_track_m;
  const double d1 = cone.along_track_m.min;
  if (!(d0 > d1)) throw InvalidInputError("entry along-track must exceed the cone minimum");

  const auto* crab = std::get_if<CrabDecrabScenario>(&kind);
  if (crab && !(crab->decrab_start_m > d1)) {
    throw InvalidInputError("de-crab start distance must exceed the cone minimum");
  }

  Trajectory traj;
  traj.frame_interval_s = frame_interval_s;
  traj.kind = kind;
  traj.frames.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(frames - 1);
    Pose pose = entry;
    pose.along_track_m = i + 1 == frames ? d1 : d0 + (d1 - d0) * t;
    if (crab) {
      const double d = pose.along_track_m;
      pose.yaw_deg = d >= crab->decrab_start_m ? crab->crab_deg
                                               : crab->crab_deg * (d - d1) / (crab->decrab_start_m - d1);
    }
    for (const auto& name : cone_parameter_names()) {
      if (!cone.get(name).contains(pose.get(name))) {
        std::ostringstream msg;
        msg << "frame " << i << ": " << name << " = " << pose.get(name) << " leaves the approach cone ["
            << cone.get(name).min << ", " << cone.get(name).max << "]";
        throw GenerationError(i, name, msg.str());
      }
    }
    traj.frames.push_back(pose);
  }
  return traj;
}

GeodeticPosition to_geodetic(const CartesianPose& cpose, const RunwayGeometry& rw) {
  const GeoRef& ref = require_georef(rw);
  const double h = deg_to_rad(ref.heading_deg);
  // +X points against the landing direction, +Y to its right.
  const double east = -cpose.x_m * std::sin(h) + cpose.y_m * std::cos(h);
  const double north = -cpose.x_m * std::cos(h) - cpose.y_m * std::sin(h);
  const Radii r = radii_at(ref.latitude_deg);
  return {ref.latitude_deg + rad_to_deg(north / r.meridional),
          ref.longitude_deg + rad_to_deg(east / (r.normal * std::cos(deg_to_rad(ref.latitude_deg)))),
          ref.elevation_m + cpose.z_m};
}

CartesianPose from_geodetic(const GeodeticPosition& pos, const RunwayGeometry& rw) {
  const GeoRef& ref = require_georef(rw);
  const double h = deg_to_rad(ref.heading_deg);
  const Radii r = radii_at(ref.latitude_deg);
  const double north = deg_to_rad(pos.latitude_deg - ref.latitude_deg) * r.meridional;
  const double east =
      deg_to_rad(pos.longitude_deg - ref.longitude_deg) * r.normal * std::cos(deg_to_rad(ref.latitude_deg));
  CartesianPose c;
  c.x_m = -east * std::sin(h) - north * std::cos(h);
  c.y_m = east * std::cos(h) - north * std::sin(h);
  c.z_m = pos.altitude_m - ref.elevation_m;
  return c;
}

std::vector<Keyframe> make_keyframes(const Trajectory& traj, const RunwayGeometry& rw) {
  const GeoRef& ref = require_georef(rw);
  std::vector<Keyframe> out;
  out.reserve(traj.frames.size());
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const Pose& pose = traj.frames[i];
    const GeodeticPosition g = to_geodetic(to_cartesian(pose), rw);
    double heading = std::fmod(ref.heading_deg + pose.yaw_deg, 360.0);
    if (heading < 0.0) heading += 360.0;
    out.push_back({i, g.latitude_deg, g.longitude_deg, g.altitude_m, heading, pose.pitch_deg, pose.roll_deg});
  }
  return out;
}

}  // namespace oddforge

#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "oddforge/geometry.hpp"
#include "oddforge/odd_spec.hpp"

namespace oddforge {

/// Counter-based generator: draw(i, j) depends only on (seed, i, j), so any
/// index range can be produced independently and in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t index, std::uint64_t stream) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t index, std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
};

struct UniformStrategy {};

/// Bin counts per cone parameter, in cone_parameter_names() order.
struct StratifiedStrategy {
  std::array<int, 6> bins{1, 1, 1, 1, 1, 1};
};

struct SamplingConfig {
  std::size_t count{1};
  std::uint64_t seed{0};
  std::variant<UniformStrategy, StratifiedStrategy> strategy{UniformStrategy{}};

  /// Throws InvalidInputError when count is 0 or a bin count is < 1.
  void validate() const;
};

/// Exactly cfg.count poses inside the cone. Uniform: independent per-parameter
/// draws. Stratified: pose i falls in cell (i mod cells), uniformly jittered
/// inside the cell. Deterministic given the seed.
std::vector<Pose> sample_cone(const ApproachCone& cone, const SamplingConfig& cfg);

/// Poses [first, last) of the same sequence sample_cone would produce.
std::vector<Pose> sample_cone_range(const ApproachCone& cone, const SamplingConfig& cfg, std::size_t first,
                                    std::size_t last);

struct NominalScenario {};

struct CrabDecrabScenario {
  double crab_deg{};
  double decrab_start_m{};
};

using ScenarioKind = std::variant<NominalScenario, CrabDecrabScenario>;

inline constexpr double kDefaultFrameIntervalS = 1.0;

struct Trajectory {
  std::vector<Pose> frames;
  double frame_interval_s{kDefaultFrameIntervalS};
  ScenarioKind kind{NominalScenario{}};
};

/// Along-track interpolated linearly from the entry value down to the cone
/// minimum; lateral, vertical, pitch and roll held. Nominal keeps the entry
/// yaw; crab/de-crab holds the crab yaw beyond the de-crab start distance and
/// tapers it linearly to 0 at the cone minimum. Every frame is checked against
/// the cone and the first offending frame raises GenerationError.
Trajectory generate_trajectory(const ApproachCone& cone, const Pose& entry, std::size_t frames,
                               const ScenarioKind& kind, double frame_interval_s = kDefaultFrameIntervalS);

struct GeodeticPosition {
  double latitude_deg{};
  double longitude_deg{};
  double altitude_m{};
};

/// Flat-earth conversion about the Aiming Point, using WGS-84 radii of
/// curvature at the reference latitude. Throws ConfigError without a georef.
GeodeticPosition to_geodetic(const CartesianPose& cpose, const RunwayGeometry& rw);

/// Inverse of to_geodetic; attitude fields of the result are zero.
CartesianPose from_geodetic(const GeodeticPosition& pos, const RunwayGeometry& rw);

struct Keyframe {
  std::size_t frame{};
  double latitude_deg{};
  double longitude_deg{};
  double altitude_m{};
  double yaw_deg{};  // true heading, [0, 360)
  double pitch_deg{};
  double roll_deg{};
};

/// Renderer keyframes for every trajectory frame. Throws ConfigError without a georef.
std::vector<Keyframe> make_keyframes(const Trajectory& traj, const RunwayGeometry& rw);

}  // namespace oddforge

#pragma once

#include <cmath>
#include <numbers>

namespace oddforge {

inline constexpr double kMetersPerNauticalMile = 1852.0;

constexpr double nm_to_m(double nm) { return nm * kMetersPerNauticalMile; }
constexpr double m_to_nm(double m) { return m / kMetersPerNauticalMile; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace oddforge

// SPDX-License-Identifier: Apache-2.0
//
// mmwgen - generative millimeter wave channel models
// Copyright (C) 2026 The mmwgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWGEN_PROPAGATION_HPP
#define MMWGEN_PROPAGATION_HPP

// Free-space geometry of the direct path.
//
// Angle convention: azimuth counterclockwise from +x in degrees, in [-180, 180);
// elevation from the horizontal plane in [-90, 90], positive up. For a
// displacement d the departure direction is d/|d| and the arrival direction
// is -d/|d|.

#include <array>
#include <cmath>
#include <numbers>

#include "mmwgen/error.hpp"

namespace mmwgen {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kDefaultCarrierHz = 28e9;

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline double wrap_azimuth(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  r -= 180.0;
  if (r >= 180.0) r -= 360.0;
  return r;
}

inline double clamp_elevation(double deg) { return std::fmin(90.0, std::fmax(-90.0, deg)); }

struct Direction {
  double azimuth = 0.0;    // deg
  double elevation = 0.0;  // deg
};

inline Direction direction_of(const Vec3& v) {
  const double horiz = std::hypot(v[0], v[1]);
  Direction d;
  d.azimuth = horiz > 0.0 ? wrap_azimuth(rad2deg(std::atan2(v[1], v[0]))) : 0.0;
  d.elevation = rad2deg(std::atan2(v[2], horiz));
  return d;
}

inline Vec3 unit_vector(const Direction& d) {
  const double az = deg2rad(d.azimuth);
  const double el = deg2rad(d.elevation);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

struct LosGeometry {
  double delay_s = 0.0;
  Direction departure;
  Direction arrival;
};

inline LosGeometry los_geometry(const Vec3& d) {
  const double dist = norm(d);
  require(dist > 0.0 && std::isfinite(dist), ErrorKind::domain, "los_geometry: zero-length displacement");
  return LosGeometry{dist / kSpeedOfLight, direction_of(d), direction_of({-d[0], -d[1], -d[2]})};
}

inline double friis_path_loss(double distance_m, double frequency_hz) {
  require(distance_m > 0.0, ErrorKind::domain, "friis_path_loss: distance must be positive");
  require(frequency_hz > 0.0, ErrorKind::domain, "friis_path_loss: frequency must be positive");
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

}  // namespace mmwgen

#endif

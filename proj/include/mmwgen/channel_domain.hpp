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

#ifndef MMWGEN_CHANNEL_DOMAIN_HPP
#define MMWGEN_CHANNEL_DOMAIN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mmwgen/error.hpp"
#include "mmwgen/propagation.hpp"

namespace mmwgen {

inline constexpr int kMaxPaths = 20;             // K_max
inline constexpr double kMaxLossDb = 200.0;      // L_max, padding value
inline constexpr int kPathFields = 6;
inline constexpr int kPathVectorDim = kMaxPaths * kPathFields;  // 120
inline constexpr int kConditionDim = 5;
inline constexpr double kDefaultAbsentThresholdDb = 195.0;

enum class CellType { terrestrial, aerial };
enum class LinkState { los = 0, nlos = 1, no_link = 2 };

inline constexpr std::array<LinkState, 3> kAllStates{LinkState::los, LinkState::nlos, LinkState::no_link};

inline std::string to_string(CellType c) { return c == CellType::aerial ? "aerial" : "terrestrial"; }

inline CellType cell_type_from_string(const std::string& s) {
  if (s == "terrestrial") return CellType::terrestrial;
  if (s == "aerial") return CellType::aerial;
  throw Error(ErrorKind::parse, "unknown cell_type '" + s + "'");
}

inline std::string to_string(LinkState s) {
  switch (s) {
    case LinkState::los: return "los";
    case LinkState::nlos: return "nlos";
    case LinkState::no_link: return "nolink";
  }
  return "nolink";
}

struct Path {
  double loss_db = kMaxLossDb;
  double aoa_az = 0.0;
  double aoa_el = 0.0;
  double aod_az = 0.0;
  double aod_el = 0.0;
  double delay_s = 0.0;

  bool operator==(const Path&) const = default;
};

// d is the UAV position relative to the gNB, in meters.
struct LinkCondition {
  Vec3 d{0.0, 0.0, 0.0};
  CellType cell_type = CellType::terrestrial;

  double horizontal_distance() const { return std::hypot(d[0], d[1]); }
  double distance() const { return norm(d); }
  bool operator==(const LinkCondition&) const = default;
};

struct Link {
  LinkCondition condition;
  LinkState state = LinkState::no_link;
  std::vector<Path> paths;  // ascending by loss_db, at most kMaxPaths

  bool operator==(const Link&) const = default;
};

inline void sort_by_loss(std::vector<Path>& paths) {
  std::stable_sort(paths.begin(), paths.end(),
                   [](const Path& a, const Path& b) { return a.loss_db < b.loss_db; });
}

// ---- condition features ---------------------------------------------------

struct ForLinkState {};
struct ForVae {
  LinkState state = LinkState::nlos;
};
using FeatureMode = std::variant<ForLinkState, ForVae>;

using ConditionFeatures = std::array<double, kConditionDim>;

// (d_h, d_z, d_3d, is_aerial, is_terrestrial) for the link-state network,
// (d_h, d_z, d_3d, is_aerial, is_los) for the path VAE.
inline ConditionFeatures condition_features(const LinkCondition& u, const FeatureMode& mode) {
  const double d3 = u.distance();
  require(d3 > 0.0 && std::isfinite(d3), ErrorKind::domain, "condition_features: zero-length displacement");
  const double is_aerial = u.cell_type == CellType::aerial ? 1.0 : 0.0;
  ConditionFeatures f{u.horizontal_distance(), u.d[2], d3, is_aerial, 0.0};
  if (std::holds_alternative<ForLinkState>(mode)) {
    f[4] = 1.0 - is_aerial;
  } else {
    const LinkState s = std::get<ForVae>(mode).state;
    require(s != LinkState::no_link, ErrorKind::domain, "condition_features: VAE features need LOS or NLOS state");
    f[4] = s == LinkState::los ? 1.0 : 0.0;
  }
  return f;
}

// ---- standard scaler --------------------------------------------------------

struct StandardScaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dim() const { return mean.size(); }
  bool empty() const { return mean.empty(); }
};

// Population mean and standard deviation; zero-variance dimensions get std 1.
inline StandardScaler scaler_fit(std::span<const std::vector<double>> samples) {
  require(samples.size() >= 2, ErrorKind::domain, "scaler_fit: need at least two samples");
  const std::size_t dim = samples.front().size();
  require(dim > 0, ErrorKind::dimension, "scaler_fit: zero-dimensional samples");
  StandardScaler s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);
  for (const auto& v : samples) {
    if (v.size() != dim) throw Error(ErrorKind::dimension, dimension_message("scaler_fit sample", dim, v.size()));
    for (std::size_t i = 0; i < dim; ++i) s.mean[i] += v[i];
  }
  const double n = static_cast<double>(samples.size());
  for (auto& m : s.mean) m /= n;
  for (const auto& v : samples)
    for (std::size_t i = 0; i < dim; ++i) s.stddev[i] += (v[i] - s.mean[i]) * (v[i] - s.mean[i]);
  for (auto& sd : s.stddev) {
    sd = std::sqrt(sd / n);
    if (!(sd > 1e-12)) sd = 1.0;
  }
  return s;
}

inline std::vector<double> scaler_apply(const StandardScaler& s, std::span<const double> v) {
  if (v.size() != s.dim()) throw Error(ErrorKind::dimension, dimension_message("scaler_apply", s.dim(), v.size()));
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - s.mean[i]) / s.stddev[i];
  return out;
}

inline std::vector<double> scaler_invert(const StandardScaler& s, std::span<const double> v) {
  if (v.size() != s.dim()) throw Error(ErrorKind::dimension, dimension_message("scaler_invert", s.dim(), v.size()));
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * s.stddev[i] + s.mean[i];
  return out;
}

inline nlohmann::json to_json(const StandardScaler& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

inline StandardScaler scaler_from_json(const nlohmann::json& j) {
  StandardScaler s;
  try {
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("std").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("scaler: ") + e.what());
  }
  require(s.mean.size() == s.stddev.size(), ErrorKind::parse, "scaler: mean/std length mismatch");
  for (double sd : s.stddev) require(sd > 0.0, ErrorKind::parse, "scaler: non-positive std");
  return s;
}

// ---- path vector encoding ---------------------------------------------------

using PathVector = std::vector<double>;  // kPathVectorDim entries

// NLOS paths of a link, LOS-relative, as 20 blocks of
// (loss, d_aoa_az, d_aoa_el, d_aod_az, d_aod_el, excess_delay), padded with
// (200, 0, 0, 0, 0, 0).
inline PathVector encode_paths(const Link& link) {
  require(link.state != LinkState::no_link, ErrorKind::domain, "encode_paths: link has no paths to encode");
  const LosGeometry los = los_geometry(link.condition.d);

  std::vector<Path> nlos(link.paths.begin(), link.paths.end());
  sort_by_loss(nlos);
  if (link.state == LinkState::los && !nlos.empty()) nlos.erase(nlos.begin());
  require(nlos.size() <= static_cast<std::size_t>(kMaxPaths), ErrorKind::domain,
          "encode_paths: more than " + std::to_string(kMaxPaths) + " NLOS paths");

  PathVector v(kPathVectorDim, 0.0);
  for (int k = 0; k < kMaxPaths; ++k) v[static_cast<std::size_t>(k * kPathFields)] = kMaxLossDb;
  for (std::size_t k = 0; k < nlos.size(); ++k) {
    const Path& p = nlos[k];
    double* b = v.data() + k * kPathFields;
    b[0] = p.loss_db;
    b[1] = wrap_azimuth(p.aoa_az - los.arrival.azimuth);
    b[2] = p.aoa_el - los.arrival.elevation;
    b[3] = wrap_azimuth(p.aod_az - los.departure.azimuth);
    b[4] = p.aod_el - los.departure.elevation;
    b[5] = std::max(0.0, p.delay_s - los.delay_s);
  }
  return v;
}

inline std::vector<Path> decode_paths(std::span<const double> v, const LinkCondition& u,
                                      double absent_threshold_db = kDefaultAbsentThresholdDb) {
  if (v.size() != static_cast<std::size_t>(kPathVectorDim))
    throw Error(ErrorKind::dimension, dimension_message("decode_paths", kPathVectorDim, v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw Error(ErrorKind::non_finite, "decode_paths: non-finite entry at index " + std::to_string(i));
  const LosGeometry los = los_geometry(u.d);

  std::vector<Path> out;
  for (int k = 0; k < kMaxPaths; ++k) {
    const double* b = v.data() + k * kPathFields;
    if (b[0] >= absent_threshold_db) continue;
    Path p;
    p.loss_db = std::clamp(b[0], 1e-9, kMaxLossDb);
    p.aoa_az = wrap_azimuth(los.arrival.azimuth + b[1]);
    p.aoa_el = clamp_elevation(los.arrival.elevation + b[2]);
    p.aod_az = wrap_azimuth(los.departure.azimuth + b[3]);
    p.aod_el = clamp_elevation(los.departure.elevation + b[4]);
    p.delay_s = los.delay_s + std::max(0.0, b[5]);
    out.push_back(p);
  }
  sort_by_loss(out);
  return out;
}

// ---- invariants -------------------------------------------------------------

struct InvariantOptions {
  double los_delay_tol_s = 1e-12;
  double los_angle_tol_deg = 1e-6;
  bool require_causal_delays = false;  // every delay >= |d|/c - los_delay_tol_s
};

// Empty result means the link satisfies every Link and Path invariant.
inline std::vector<std::string> check_link(const Link& link, const InvariantOptions& opt = {}) {
  std::vector<std::string> bad;
  const double dist = link.condition.distance();
  if (!(dist > 0.0) || !std::isfinite(dist)) {
    bad.push_back("zero or non-finite displacement");
    return bad;
  }
  if (link.paths.size() > static_cast<std::size_t>(kMaxPaths)) bad.push_back("more than K_max paths");
  if ((link.state == LinkState::no_link) != link.paths.empty())
    bad.push_back("state NoLink must coincide with an empty path list");
  for (std::size_t k = 0; k < link.paths.size(); ++k) {
    const Path& p = link.paths[k];
    const std::string at = "path " + std::to_string(k) + ": ";
    if (!(p.loss_db > 0.0 && p.loss_db <= kMaxLossDb)) bad.push_back(at + "loss outside (0, 200]");
    for (double az : {p.aoa_az, p.aod_az})
      if (!(az >= -180.0 && az < 180.0)) bad.push_back(at + "azimuth outside [-180, 180)");
    for (double el : {p.aoa_el, p.aod_el})
      if (!(el >= -90.0 && el <= 90.0)) bad.push_back(at + "elevation outside [-90, 90]");
    if (!(p.delay_s >= 0.0) || !std::isfinite(p.delay_s)) bad.push_back(at + "negative or non-finite delay");
    if (opt.require_causal_delays && p.delay_s < dist / kSpeedOfLight - opt.los_delay_tol_s)
      bad.push_back(at + "delay earlier than the direct path");
    if (k > 0 && link.paths[k - 1].loss_db > p.loss_db) bad.push_back(at + "paths not sorted by loss");
  }
  if (link.state == LinkState::los && !link.paths.empty()) {
    const LosGeometry g = los_geometry(link.condition.d);
    const Path& p = link.paths.front();
    if (std::abs(p.delay_s - g.delay_s) > opt.los_delay_tol_s) bad.push_back("LOS path delay does not match |d|/c");
    auto az_close = [&](double a, double b) { return std::abs(wrap_azimuth(a - b)) <= opt.los_angle_tol_deg; };
    if (!az_close(p.aod_az, g.departure.azimuth) || !az_close(p.aoa_az, g.arrival.azimuth) ||
        std::abs(p.aod_el - g.departure.elevation) > opt.los_angle_tol_deg ||
        std::abs(p.aoa_el - g.arrival.elevation) > opt.los_angle_tol_deg)
      bad.push_back("LOS path direction does not match geometry");
  }
  return bad;
}

}  // namespace mmwgen

#endif

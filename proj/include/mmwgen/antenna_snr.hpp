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

#ifndef MMWGEN_ANTENNA_SNR_HPP
#define MMWGEN_ANTENNA_SNR_HPP

// Uplink link budget over generated paths with idealized per-path beam
// steering: each path sees the full array gain 10log10(N) on both ends,
// tapered by the element pattern at that path's direction.
//
// Frame: the condition vector points from the gNB to the UAV, so a path's
// departure angles are seen at the gNB and its arrival angles at the UAV.
// Reciprocity makes the uplink budget use the same directions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/channel_generator.hpp"
#include "mmwgen/propagation.hpp"

namespace mmwgen {

struct ElementPattern {
  double hpbw_az_deg = 90.0;
  double hpbw_el_deg = 90.0;
  double front_to_back_db = 30.0;
};

struct ArraySpec {
  int element_count = 1;
  Direction boresight;  // az/el of the array normal
  ElementPattern pattern;
};

inline ArraySpec down_facing(int n, ElementPattern p = {}) { return {n, {0.0, -90.0}, p}; }
inline ArraySpec up_facing(int n, ElementPattern p = {}) { return {n, {0.0, 90.0}, p}; }
inline ArraySpec sector_downtilt(int n, double tilt_deg, double sector_az_deg, ElementPattern p = {}) {
  return {n, {wrap_azimuth(sector_az_deg), -tilt_deg}, p};
}

struct LinkBudget {
  double tx_power_dbm = 23.0;
  double bandwidth_hz = 400e6;
  double misc_losses_db = 6.0;
  double noise_density_dbm_hz = -174.0;

  double noise_power_dbm() const {
    require(bandwidth_hz > 0.0, ErrorKind::domain, "link budget: bandwidth must be positive");
    return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
  }
};

// Direction expressed in the array's local frame (boresight at az = el = 0).
inline Direction relative_to_boresight(const Direction& dir, const Direction& boresight) {
  const Vec3 v = unit_vector({wrap_azimuth(dir.azimuth - boresight.azimuth), dir.elevation});
  const double ce = std::cos(deg2rad(boresight.elevation));
  const double se = std::sin(deg2rad(boresight.elevation));
  const Vec3 local{v[0] * ce + v[2] * se, v[1], -v[0] * se + v[2] * ce};
  return direction_of(local);
}

// Parabolic-in-dB pattern floored at the front-to-back ratio.
inline double element_gain(const ElementPattern& p, double d_az_deg, double d_el_deg) {
  const double a = d_az_deg / p.hpbw_az_deg;
  const double e = d_el_deg / p.hpbw_el_deg;
  return -std::min(12.0 * a * a + 12.0 * e * e, p.front_to_back_db);
}

inline double element_gain(const ElementPattern& p, const Direction& rel) {
  return element_gain(p, rel.azimuth, rel.elevation);
}

inline double array_gain(int element_count) {
  require(element_count >= 1, ErrorKind::domain, "array_gain: element count must be >= 1");
  return 10.0 * std::log10(static_cast<double>(element_count));
}

inline double directional_gain(const ArraySpec& a, const Direction& dir) {
  return array_gain(a.element_count) + element_gain(a.pattern, relative_to_boresight(dir, a.boresight));
}

// Best-sector SNR in dB; nullopt for an empty link.
inline std::optional<double> link_snr(const Link& link, const ArraySpec& uav, std::span<const ArraySpec> gnb_sectors,
                                      const LinkBudget& budget) {
  require(!gnb_sectors.empty(), ErrorKind::domain, "link_snr: need at least one gNB sector");
  if (link.paths.empty()) return std::nullopt;
  double best = -std::numeric_limits<double>::infinity();
  for (const ArraySpec& sector : gnb_sectors) {
    double lin = 0.0;
    for (const Path& p : link.paths) {
      const double g = directional_gain(uav, {p.aoa_az, p.aoa_el}) + directional_gain(sector, {p.aod_az, p.aod_el});
      lin += std::pow(10.0, (g - p.loss_db) / 10.0);
    }
    best = std::max(best, 10.0 * std::log10(lin));
  }
  const double rx_dbm = budget.tx_power_dbm - budget.misc_losses_db + best;
  return rx_dbm - budget.noise_power_dbm();
}

// Median with nullopt ordered below every value; nullopt if the median lands
// on (or averages with) an absent entry.
inline std::optional<double> median_snr(std::vector<std::optional<double>> v) {
  if (v.empty()) return std::nullopt;
  std::vector<double> x;
  x.reserve(v.size());
  for (const auto& e : v) x.push_back(e ? *e : -std::numeric_limits<double>::infinity());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const double m = n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
  if (!std::isfinite(m)) return std::nullopt;
  return m;
}

struct GnbSpec {
  CellType type = CellType::terrestrial;
  double height_m = 2.0;

  static GnbSpec terrestrial() { return {CellType::terrestrial, 2.0}; }
  static GnbSpec aerial() { return {CellType::aerial, 30.0}; }
};

struct SnrArrays {
  ArraySpec uav = down_facing(16);
  std::vector<ArraySpec> terrestrial_sectors = {sector_downtilt(64, 10.0, 0.0), sector_downtilt(64, 10.0, 120.0),
                                                sector_downtilt(64, 10.0, 240.0)};
  std::vector<ArraySpec> aerial_sectors = {up_facing(64)};

  const std::vector<ArraySpec>& sectors(CellType c) const {
    return c == CellType::aerial ? aerial_sectors : terrestrial_sectors;
  }
};

struct SnrGrid {
  std::vector<double> x_m = linear_values(0.0, 500.0, 51);
  std::vector<double> z_m = linear_values(0.0, 130.0, 14);

  static std::vector<double> linear_values(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
  }
};

struct SnrMap {
  std::vector<double> x_m;
  std::vector<double> z_m;
  std::vector<std::optional<double>> median_db;  // x-major

  const std::optional<double>& at(std::size_t ix, std::size_t iz) const { return median_db[ix * z_m.size() + iz]; }
};

// UAV at (x, 0, z), gNB at (0, 0, h): condition u = (x, 0, z - h). Grid points
// that coincide with the gNB have no defined direction and stay absent.
inline SnrMap snr_map(const ChannelModel& model, const GnbSpec& gnb, const SnrGrid& grid, int n_real,
                      std::uint64_t seed, const SnrArrays& arrays = {}, const LinkBudget& budget = {}) {
  require(n_real >= 1, ErrorKind::domain, "snr_map: need at least one realization");
  SnrMap out{grid.x_m, grid.z_m, {}};
  const auto& sectors = arrays.sectors(gnb.type);
  for (double x : grid.x_m) {
    for (double z : grid.z_m) {
      const LinkCondition u{{x, 0.0, z - gnb.height_m}, gnb.type};
      if (u.distance() < 1e-9) {
        out.median_db.push_back(std::nullopt);
        continue;
      }
      const std::vector<Link> links = generate_batch(model, std::span<const LinkCondition>(&u, 1), n_real, seed);
      std::vector<std::optional<double>> snrs;
      snrs.reserve(links.size());
      for (const Link& l : links) snrs.push_back(link_snr(l, arrays.uav, sectors, budget));
      out.median_db.push_back(median_snr(std::move(snrs)));
    }
  }
  return out;
}

inline void write_snr_csv(const std::string& path, const SnrMap& m) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  f << std::setprecision(17) << "x_m,z_m,median_snr_db\n";
  for (std::size_t ix = 0; ix < m.x_m.size(); ++ix)
    for (std::size_t iz = 0; iz < m.z_m.size(); ++iz) {
      f << m.x_m[ix] << ',' << m.z_m[iz] << ',';
      if (const auto& v = m.at(ix, iz)) f << *v;
      f << '\n';
    }
}

inline nlohmann::json to_json(const ArraySpec& a) {
  return {{"element_count", a.element_count},
          {"boresight_az_deg", a.boresight.azimuth},
          {"boresight_el_deg", a.boresight.elevation},
          {"hpbw_az_deg", a.pattern.hpbw_az_deg},
          {"hpbw_el_deg", a.pattern.hpbw_el_deg},
          {"front_to_back_db", a.pattern.front_to_back_db}};
}

inline nlohmann::json snr_params_json(const GnbSpec& gnb, const SnrGrid& grid, int n_real, std::uint64_t seed,
                                      const SnrArrays& arrays, const LinkBudget& budget) {
  nlohmann::json sectors = nlohmann::json::array();
  for (const auto& s : arrays.sectors(gnb.type)) sectors.push_back(to_json(s));
  return {{"gnb", {{"type", to_string(gnb.type)}, {"height_m", gnb.height_m}}},
          {"grid", {{"x_m", grid.x_m}, {"z_m", grid.z_m}}},
          {"n_real", n_real},
          {"seed", seed},
          {"uav_array", to_json(arrays.uav)},
          {"gnb_sectors", sectors},
          {"budget",
           {{"tx_power_dbm", budget.tx_power_dbm},
            {"bandwidth_hz", budget.bandwidth_hz},
            {"misc_losses_db", budget.misc_losses_db},
            {"noise_density_dbm_hz", budget.noise_density_dbm_hz}}}};
}

}  // namespace mmwgen

#endif

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

#ifndef MMWGEN_DATASET_IO_HPP
#define MMWGEN_DATASET_IO_HPP

// Link datasets: JSON-lines files, train/test splitting and a synthetic
// ground-truth sampler with closed-form state probabilities.
//
// One JSON object per line:
//   {"d":[dx,dy,dz], "cell_type":"terrestrial|aerial",
//    "paths":[{"loss_db":..,"aoa_az":..,"aoa_el":..,"aod_az":..,"aod_el":..,"delay_s":..}, ...]}
// Angles in degrees. Absent paths are omitted; padding is not allowed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/propagation.hpp"
#include "mmwgen/random.hpp"

namespace mmwgen {

enum class SplitTag { train, test };

struct OracleParams {
  double carrier_hz = 28e9;
  double los_scale_m = 50.0;
  double los_alt_gain = 2.0;
  double outage_ref_m = 500.0;
  double nlos_extra_count_p = 0.3;
  double first_excess_mean_db = 15.0;
  double increment_mean_db = 8.0;
  double ang_scale_base_deg = 10.0;
  double ang_scale_amp_deg = 60.0;
  double ang_scale_decay_m = 150.0;
  double delay_excess_mean_s = 2e-7;
};

struct FileSource {
  std::string path;
};
struct OracleSource {
  OracleParams params;
  std::uint64_t seed = 0;
};
using DatasetSource = std::variant<std::monostate, FileSource, OracleSource>;

struct Dataset {
  std::vector<Link> links;
  DatasetSource source;
  std::vector<SplitTag> tags;  // empty until split
  std::optional<std::uint64_t> split_seed;

  std::vector<Link> subset(SplitTag tag) const {
    std::vector<Link> out;
    for (std::size_t i = 0; i < links.size() && i < tags.size(); ++i)
      if (tags[i] == tag) out.push_back(links[i]);
    return out;
  }
};

// ---- JSONL --------------------------------------------------------------------

struct LoadOptions {
  double los_angle_tol_deg = 0.5;
  double los_delay_tol_s = 1e-9;
};

inline nlohmann::json path_to_json(const Path& p) {
  return {{"loss_db", p.loss_db}, {"aoa_az", p.aoa_az}, {"aoa_el", p.aoa_el},
          {"aod_az", p.aod_az},   {"aod_el", p.aod_el}, {"delay_s", p.delay_s}};
}

inline nlohmann::json link_to_json(const Link& l) {
  nlohmann::json paths = nlohmann::json::array();
  for (const Path& p : l.paths) paths.push_back(path_to_json(p));
  return {{"d", l.condition.d}, {"cell_type", to_string(l.condition.cell_type)}, {"paths", paths}};
}

// Sorts, wraps and classifies. The strongest path is taken as the direct path
// when its delay and all four angles match the geometry within tolerance, in
// which case it is snapped onto the exact geometry.
inline Link canonicalize_link(const LinkCondition& u, std::vector<Path> paths, const LoadOptions& opt = {}) {
  Link link;
  link.condition = u;
  for (Path& p : paths) {
    p.aoa_az = wrap_azimuth(p.aoa_az);
    p.aod_az = wrap_azimuth(p.aod_az);
  }
  sort_by_loss(paths);
  if (paths.size() > static_cast<std::size_t>(kMaxPaths)) paths.resize(static_cast<std::size_t>(kMaxPaths));
  if (paths.empty()) {
    link.state = LinkState::no_link;
    return link;
  }
  const LosGeometry g = los_geometry(u.d);
  Path& first = paths.front();
  const auto az_ok = [&](double a, double b) { return std::abs(wrap_azimuth(a - b)) <= opt.los_angle_tol_deg; };
  const bool vertical = std::abs(std::abs(g.departure.elevation) - 90.0) <= opt.los_angle_tol_deg;
  const bool dir_ok = std::abs(first.aod_el - g.departure.elevation) <= opt.los_angle_tol_deg &&
                      std::abs(first.aoa_el - g.arrival.elevation) <= opt.los_angle_tol_deg &&
                      (vertical || (az_ok(first.aod_az, g.departure.azimuth) && az_ok(first.aoa_az, g.arrival.azimuth)));
  const bool delay_ok = std::abs(first.delay_s - g.delay_s) <= opt.los_delay_tol_s;
  if (dir_ok && delay_ok) {
    link.state = LinkState::los;
    first.aod_az = g.departure.azimuth;
    first.aod_el = g.departure.elevation;
    first.aoa_az = g.arrival.azimuth;
    first.aoa_el = g.arrival.elevation;
    first.delay_s = g.delay_s;
  } else {
    link.state = LinkState::nlos;
  }
  link.paths = std::move(paths);
  return link;
}

namespace detail {

inline double field(const nlohmann::json& obj, const char* name, std::size_t line, const std::string& ctx) {
  if (!obj.contains(name)) throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + ctx + "missing field '" + name + "'");
  const auto& v = obj[name];
  if (!v.is_number()) throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + ctx + "field '" + name + "' is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + ctx + "field '" + name + "' is not finite");
  return x;
}

}  // namespace detail

// Parses one record. When `with_paths` is false only the condition is read.
inline Link parse_link_line(const std::string& text, std::size_t line, const LoadOptions& opt = {}, bool with_paths = true) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
  const std::string where = "line " + std::to_string(line) + ": ";
  if (!j.is_object()) throw Error(ErrorKind::parse, where + "record is not an object");
  if (!j.contains("d") || !j["d"].is_array() || j["d"].size() != 3)
    throw Error(ErrorKind::parse, where + "field 'd' must be an array of 3 numbers");
  LinkCondition u;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j["d"][i].is_number()) throw Error(ErrorKind::parse, where + "field 'd' must be an array of 3 numbers");
    u.d[i] = j["d"][i].get<double>();
    if (!std::isfinite(u.d[i])) throw Error(ErrorKind::parse, where + "field 'd' has a non-finite entry");
  }
  if (!(u.distance() > 0.0)) throw Error(ErrorKind::domain, where + "field 'd' has zero length");
  if (!j.contains("cell_type") || !j["cell_type"].is_string())
    throw Error(ErrorKind::parse, where + "missing field 'cell_type'");
  try {
    u.cell_type = cell_type_from_string(j["cell_type"].get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, where + "field 'cell_type': " + e.what());
  }
  if (!with_paths) return Link{u, LinkState::no_link, {}};

  if (!j.contains("paths") || !j["paths"].is_array()) throw Error(ErrorKind::parse, where + "field 'paths' must be an array");
  std::vector<Path> paths;
  std::size_t k = 0;
  for (const auto& pj : j["paths"]) {
    const std::string ctx = "path " + std::to_string(k++) + ": ";
    if (!pj.is_object()) throw Error(ErrorKind::parse, where + ctx + "not an object");
    Path p;
    p.loss_db = detail::field(pj, "loss_db", line, ctx);
    p.aoa_az = detail::field(pj, "aoa_az", line, ctx);
    p.aoa_el = detail::field(pj, "aoa_el", line, ctx);
    p.aod_az = detail::field(pj, "aod_az", line, ctx);
    p.aod_el = detail::field(pj, "aod_el", line, ctx);
    p.delay_s = detail::field(pj, "delay_s", line, ctx);
    if (!(p.loss_db > 0.0 && p.loss_db < kMaxLossDb))
      throw Error(ErrorKind::domain, where + ctx + "field 'loss_db' outside (0, 200) (padding is not allowed in files)");
    if (std::abs(p.aoa_el) > 90.0) throw Error(ErrorKind::domain, where + ctx + "field 'aoa_el' outside [-90, 90]");
    if (std::abs(p.aod_el) > 90.0) throw Error(ErrorKind::domain, where + ctx + "field 'aod_el' outside [-90, 90]");
    if (p.delay_s < 0.0) throw Error(ErrorKind::domain, where + ctx + "field 'delay_s' is negative");
    paths.push_back(p);
  }
  return canonicalize_link(u, std::move(paths), opt);
}

inline std::vector<Link> read_links(std::istream& in, const LoadOptions& opt = {}, bool with_paths = true) {
  std::vector<Link> links;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    links.push_back(parse_link_line(text, line, opt, with_paths));
  }
  return links;
}

inline Dataset load_dataset(const std::string& path, const LoadOptions& opt = {}) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot open dataset '" + path + "'");
  Dataset ds;
  try {
    ds.links = read_links(f, opt);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
  ds.source = FileSource{path};
  return ds;
}

inline std::vector<LinkCondition> load_conditions(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot open conditions file '" + path + "'");
  std::vector<LinkCondition> out;
  try {
    for (const Link& l : read_links(f, {}, false)) out.push_back(l.condition);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
  return out;
}

inline void write_links(std::ostream& out, std::span<const Link> links) {
  for (const Link& l : links) out << link_to_json(l).dump() << '\n';
}

inline void save_links(const std::string& path, std::span<const Link> links) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  write_links(f, links);
}

// CSV export, one row per path (NoLink links get a row with empty path fields).
inline void export_csv(std::ostream& out, std::span<const Link> links) {
  out << "link,dx,dy,dz,cell_type,state,path,loss_db,aoa_az,aoa_el,aod_az,aod_el,delay_s\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    const auto prefix = [&] {
      out << i << ',' << l.condition.d[0] << ',' << l.condition.d[1] << ',' << l.condition.d[2] << ','
          << to_string(l.condition.cell_type) << ',' << to_string(l.state) << ',';
    };
    if (l.paths.empty()) {
      prefix();
      out << ",,,,,,\n";
    }
    for (std::size_t k = 0; k < l.paths.size(); ++k) {
      const Path& p = l.paths[k];
      prefix();
      out << k << ',' << p.loss_db << ',' << p.aoa_az << ',' << p.aoa_el << ',' << p.aod_az << ',' << p.aod_el << ','
          << p.delay_s << '\n';
    }
  }
}

// ---- split --------------------------------------------------------------------

inline void split_train_test(Dataset& ds, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::domain, "split_train_test: fraction must lie in (0, 1)");
  require(!ds.links.empty(), ErrorKind::domain, "split_train_test: empty dataset");
  const std::size_t n = ds.links.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = derive_stream(seed, {stream_tag::split});
  std::shuffle(order.begin(), order.end(), rng);
  ds.tags.assign(n, SplitTag::test);
  for (std::size_t i = 0; i < n_train; ++i) ds.tags[order[i]] = SplitTag::train;
  ds.split_seed = seed;
}

// ---- synthetic ground truth ---------------------------------------------------

struct OracleStateProbs {
  double los = 0.0;
  double nlos = 0.0;
  double no_link = 0.0;
};

inline OracleStateProbs oracle_state_probs(const OracleParams& p, const LinkCondition& u) {
  const double dh = u.horizontal_distance();
  const double dz = u.d[2];
  const double d3 = u.distance();
  OracleStateProbs s;
  s.los = std::exp(-dh / (p.los_scale_m + p.los_alt_gain * std::max(dz, 0.0)));
  const double r = d3 / p.outage_ref_m;
  s.no_link = (1.0 - s.los) * std::min(1.0, r * r);
  s.nlos = std::max(0.0, 1.0 - s.los - s.no_link);
  return s;
}

inline double oracle_angular_scale_deg(const OracleParams& p, double d3) {
  return p.ang_scale_base_deg + p.ang_scale_amp_deg * std::exp(-d3 / p.ang_scale_decay_m);
}

namespace detail {

inline double laplacian(Rng& rng, double scale) {
  // inverse CDF on u in (-1/2, 1/2)
  double u = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
  if (u == -0.5) u = 0.0;
  return -scale * (u < 0.0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
}

}  // namespace detail

// One ground-truth link; all draws consume `rng` in a fixed order.
inline Link oracle_link(const OracleParams& p, const LinkCondition& u, Rng& rng) {
  const OracleStateProbs probs = oracle_state_probs(p, u);
  Link link;
  link.condition = u;
  const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  link.state = r < probs.los ? LinkState::los : (r < probs.los + probs.nlos ? LinkState::nlos : LinkState::no_link);
  if (link.state == LinkState::no_link) return link;

  const double d3 = u.distance();
  const LosGeometry g = los_geometry(u.d);
  const double friis = friis_path_loss(d3, p.carrier_hz);
  const int count = 1 + std::binomial_distribution<int>(kMaxPaths - 1, p.nlos_extra_count_p)(rng);
  const int n_nlos = link.state == LinkState::los ? count - 1 : count;

  std::exponential_distribution<double> first_excess(1.0 / p.first_excess_mean_db);
  std::exponential_distribution<double> increment(1.0 / p.increment_mean_db);
  std::exponential_distribution<double> delay_excess(1.0 / p.delay_excess_mean_s);
  const double ang = oracle_angular_scale_deg(p, d3);

  std::vector<double> losses;
  double loss = friis + first_excess(rng);
  for (int k = 0; k < n_nlos; ++k) {
    if (k > 0) loss += increment(rng);
    losses.push_back(loss);
  }
  std::vector<double> excess(static_cast<std::size_t>(n_nlos));
  for (auto& e : excess) e = delay_excess(rng);
  std::sort(excess.begin(), excess.end());

  if (link.state == LinkState::los) {
    Path direct;
    direct.loss_db = friis;
    direct.aod_az = g.departure.azimuth;
    direct.aod_el = g.departure.elevation;
    direct.aoa_az = g.arrival.azimuth;
    direct.aoa_el = g.arrival.elevation;
    direct.delay_s = g.delay_s;
    link.paths.push_back(direct);
  }
  for (int k = 0; k < n_nlos; ++k) {
    Path q;
    q.loss_db = losses[static_cast<std::size_t>(k)];
    q.aoa_az = wrap_azimuth(g.arrival.azimuth + detail::laplacian(rng, ang));
    q.aoa_el = clamp_elevation(g.arrival.elevation + detail::laplacian(rng, ang));
    q.aod_az = wrap_azimuth(g.departure.azimuth + detail::laplacian(rng, ang));
    q.aod_el = clamp_elevation(g.departure.elevation + detail::laplacian(rng, ang));
    q.delay_s = g.delay_s + excess[static_cast<std::size_t>(k)];
    if (q.loss_db >= kMaxLossDb) continue;  // clipped at L_max: dropped
    link.paths.push_back(q);
  }
  if (link.paths.empty()) link.state = LinkState::no_link;
  return link;
}

inline Dataset oracle_generate(const OracleParams& p, std::span<const LinkCondition> conditions, std::uint64_t seed) {
  Dataset ds;
  ds.links.reserve(conditions.size());
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    Rng rng = derive_stream(seed, {stream_tag::oracle, static_cast<std::uint64_t>(i)});
    ds.links.push_back(oracle_link(p, conditions[i], rng));
  }
  ds.source = OracleSource{p, seed};
  return ds;
}

struct ConditionRegion {
  double dh_max = 500.0;
  double dz_min = 0.0;
  double dz_max = 130.0;
  double min_distance = 1.0;
};

// Uniform over d_h in [0, dh_max], d_z in [dz_min, dz_max], uniform azimuth,
// cell types alternating (even index terrestrial).
inline std::vector<LinkCondition> sample_conditions(std::size_t n, std::uint64_t seed, const ConditionRegion& region = {}) {
  std::vector<LinkCondition> out;
  out.reserve(n);
  Rng rng = derive_stream(seed, {stream_tag::conditions});
  std::uniform_real_distribution<double> dh(0.0, region.dh_max);
  std::uniform_real_distribution<double> dz(region.dz_min, region.dz_max);
  std::uniform_real_distribution<double> az(-180.0, 180.0);
  while (out.size() < n) {
    const double h = dh(rng);
    const double z = dz(rng);
    const double a = deg2rad(az(rng));
    LinkCondition u{{h * std::cos(a), h * std::sin(a), z},
                    out.size() % 2 == 0 ? CellType::terrestrial : CellType::aerial};
    if (u.distance() < region.min_distance) continue;
    out.push_back(u);
  }
  return out;
}

}  // namespace mmwgen

#endif

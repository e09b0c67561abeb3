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

#ifndef MMWGEN_CHANNEL_GENERATOR_HPP
#define MMWGEN_CHANNEL_GENERATOR_HPP

// Two-stage generator: link state, then VAE paths, plus the deterministic
// direct path when the state is LOS.

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/link_state_model.hpp"
#include "mmwgen/path_vae.hpp"
#include "mmwgen/propagation.hpp"
#include "mmwgen/random.hpp"

namespace mmwgen {

inline constexpr const char* kModelVersion = "mmwgen-model-1";

struct ChannelModel {
  LinkStateNet link_state;
  PathVae path_vae;
  double carrier_frequency_hz = kDefaultCarrierHz;
  std::string version = kModelVersion;
  int k_max = kMaxPaths;
  double l_max_db = kMaxLossDb;
  std::uint64_t split_seed = 0;
};

inline Path los_path(const LinkCondition& u, double carrier_hz) {
  const LosGeometry g = los_geometry(u.d);
  Path p;
  p.loss_db = friis_path_loss(u.distance(), carrier_hz);
  p.aod_az = g.departure.azimuth;
  p.aod_el = g.departure.elevation;
  p.aoa_az = g.arrival.azimuth;
  p.aoa_el = g.arrival.elevation;
  p.delay_s = g.delay_s;
  return p;
}

struct GenerateOptions {
  std::optional<LinkState> forced_state;
  GenerationMode mode = GenerationMode::sample;
};

inline Link generate_link(const ChannelModel& model, const LinkCondition& u, Rng& rng,
                          const GenerateOptions& opt = {}) {
  Link link;
  link.condition = u;
  link.state = opt.forced_state ? *opt.forced_state : sample_state(model.link_state, u, rng);
  if (link.state == LinkState::no_link) return link;

  std::vector<Path> nlos = generate_nlos(model.path_vae, u, link.state, rng, opt.mode);
  if (link.state == LinkState::los) {
    const Path direct = los_path(u, model.carrier_frequency_hz);
    // A reflected path cannot be stronger than the direct one; flooring keeps
    // the direct path first after sorting.
    for (Path& p : nlos) p.loss_db = std::max(p.loss_db, direct.loss_db);
    nlos.insert(nlos.begin(), direct);
    sort_by_loss(nlos);
  }
  if (nlos.size() > static_cast<std::size_t>(model.k_max)) nlos.resize(static_cast<std::size_t>(model.k_max));
  // An NLOS draw where every block fell above the absent threshold still has
  // paths by definition of the state; promote it to an outage.
  if (nlos.empty()) link.state = LinkState::no_link;
  link.paths = std::move(nlos);
  return link;
}

inline std::uint64_t condition_key(const LinkCondition& u) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(u.cell_type) + 1);
  for (double c : u.d) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(c + 0.0));
  return h;
}

// Realization r of condition i uses a stream keyed by the condition's content
// and its occurrence count among identical earlier conditions, so permuting
// the condition list only permutes the output blocks.
inline std::vector<Link> generate_batch(const ChannelModel& model, std::span<const LinkCondition> conditions,
                                        int n_per_condition, std::uint64_t master_seed,
                                        const GenerateOptions& opt = {}) {
  require(n_per_condition >= 0, ErrorKind::domain, "generate_batch: negative realization count");
  std::vector<Link> out;
  out.reserve(conditions.size() * static_cast<std::size_t>(n_per_condition));
  std::map<std::uint64_t, std::uint64_t> seen;
  for (const LinkCondition& u : conditions) {
    const std::uint64_t key = condition_key(u);
    const std::uint64_t occurrence = seen[key]++;
    for (int r = 0; r < n_per_condition; ++r) {
      Rng rng = derive_stream(master_seed, {stream_tag::generate, key, occurrence, static_cast<std::uint64_t>(r)});
      out.push_back(generate_link(model, u, rng, opt));
    }
  }
  return out;
}

// ---- model file -------------------------------------------------------------

inline nlohmann::json to_json(const ChannelModel& m) {
  return {{"version", m.version},
          {"carrier_frequency_hz", m.carrier_frequency_hz},
          {"link_state", to_json(m.link_state)},
          {"path_vae", to_json(m.path_vae)},
          {"k_max", m.k_max},
          {"l_max_db", m.l_max_db},
          {"absent_threshold_db", m.path_vae.absent_threshold_db},
          {"split_seed", m.split_seed}};
}

inline ChannelModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j["version"].is_string())
    throw Error(ErrorKind::version, "model file has no version string");
  const std::string version = j["version"].get<std::string>();
  if (version != kModelVersion)
    throw Error(ErrorKind::version, "model version '" + version + "' is not supported (expected '" +
                                        std::string(kModelVersion) + "')");
  try {
    ChannelModel m;
    m.version = version;
    m.carrier_frequency_hz = j.at("carrier_frequency_hz").get<double>();
    m.link_state = link_state_from_json(j.at("link_state"));
    m.path_vae = path_vae_from_json(j.at("path_vae"));
    m.k_max = j.at("k_max").get<int>();
    m.l_max_db = j.at("l_max_db").get<double>();
    m.path_vae.absent_threshold_db = j.at("absent_threshold_db").get<double>();
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    require(m.carrier_frequency_hz > 0.0 && m.k_max >= 1, ErrorKind::parse, "model: invalid carrier or k_max");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("model: ") + e.what());
  }
}

inline void save_model(const ChannelModel& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot write model file '" + path + "'");
  f << to_json(m).dump(1) << '\n';
}

inline ChannelModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace mmwgen

#endif

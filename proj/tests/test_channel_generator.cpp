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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "mmwgen/channel_generator.hpp"
#include "support/random_links.hpp"
#include "support/tiny_model.hpp"

namespace mmwgen {
namespace {

using testing::tiny_model;

TEST(LosGeometry, AxisExamples) {
  const LosGeometry a = los_geometry({100, 0, 0});
  EXPECT_NEAR(a.delay_s * 1e9, 333.564, 1e-3);
  EXPECT_EQ(a.departure.azimuth, 0.0);
  EXPECT_EQ(a.departure.elevation, 0.0);
  EXPECT_EQ(a.arrival.azimuth, -180.0);
  EXPECT_EQ(a.arrival.elevation, 0.0);

  const LosGeometry b = los_geometry({0, 0, 50});
  EXPECT_EQ(b.departure.elevation, 90.0);
  EXPECT_EQ(b.arrival.elevation, -90.0);
  EXPECT_NEAR(b.delay_s * 1e9, 166.782, 1e-3);

  const LosGeometry c = los_geometry({100, 100, 0});
  EXPECT_NEAR(c.departure.azimuth, 45.0, 1e-12);
  EXPECT_NEAR(c.arrival.azimuth, -135.0, 1e-12);
  EXPECT_NEAR(c.delay_s, std::sqrt(2.0) * 100.0 / 299792458.0, 1e-18);
  EXPECT_NEAR(c.delay_s * 1e9, 471.731, 1e-3);

  EXPECT_THROW(los_geometry({0, 0, 0}), Error);
}

TEST(LosGeometry, DirectionsAreAntipodalUnitVectors) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const LinkCondition u = testing::random_condition(rng);
    const LosGeometry g = los_geometry(u.d);
    const Vec3 dep = unit_vector(g.departure), arr = unit_vector(g.arrival);
    const double n = u.distance();
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(dep[k], u.d[k] / n, 1e-12);
      EXPECT_NEAR(arr[k], -u.d[k] / n, 1e-12);
    }
    EXPECT_NEAR(g.delay_s, n / kSpeedOfLight, 1e-18);
  }
}

TEST(Friis, Examples) {
  EXPECT_NEAR(friis_path_loss(100.0, 28e9), 101.39, 0.01);
  EXPECT_NEAR(friis_path_loss(1.0, 28e9), 61.39, 0.01);
  for (double f : {2.4e9, 28e9, 60e9})
    for (double d : {3.0, 17.0, 250.0})
      EXPECT_NEAR(friis_path_loss(2 * d, f) - friis_path_loss(d, f), 6.0206, 1e-4);
  EXPECT_THROW(friis_path_loss(0.0, 28e9), Error);
  EXPECT_THROW(friis_path_loss(10.0, -1.0), Error);
}

TEST(GenerateLink, ForcedStates) {
  const ChannelModel& m = tiny_model();
  const LinkCondition u{{100, 0, 0}, CellType::terrestrial};
  Rng rng(2);
  GenerateOptions none;
  none.forced_state = LinkState::no_link;
  const Link empty = generate_link(m, u, rng, none);
  EXPECT_EQ(empty.state, LinkState::no_link);
  EXPECT_TRUE(empty.paths.empty());

  GenerateOptions los;
  los.forced_state = LinkState::los;
  for (int i = 0; i < 200; ++i) {
    const Link l = generate_link(m, u, rng, los);
    ASSERT_EQ(l.state, LinkState::los);
    ASSERT_FALSE(l.paths.empty());
    const Path& p = l.paths.front();
    EXPECT_EQ(p.loss_db, friis_path_loss(100.0, 28e9));
    EXPECT_NEAR(p.loss_db, 101.39, 0.01);
    EXPECT_NEAR(p.delay_s * 1e9, 333.564, 1e-3);
    EXPECT_EQ(p.aod_az, 0.0);
    EXPECT_EQ(p.aoa_az, -180.0);
    EXPECT_LE(l.paths.size(), 20u);
  }
}

TEST(GenerateLink, InvariantSweepOverTwentyOneThousandConditions) {
  const ChannelModel& m = tiny_model();
  const auto conds = sample_conditions(21600, 77);
  InvariantOptions opt;
  opt.require_causal_delays = true;
  std::size_t bad_links = 0;
  Rng rng(3);
  for (const auto& u : conds) {
    const Link l = generate_link(m, u, rng);
    const auto bad = check_link(l, opt);
    if (!bad.empty()) {
      if (bad_links == 0) ADD_FAILURE() << bad.front();
      ++bad_links;
    }
    if (l.state == LinkState::los) {
      EXPECT_EQ(l.paths.front().loss_db, friis_path_loss(u.distance(), 28e9));
    }
  }
  EXPECT_EQ(bad_links, 0u);
}

TEST(GenerateLink, KMaxCountsTheLosPath) {
  ChannelModel m = tiny_model();
  m.k_max = 3;
  GenerateOptions los;
  los.forced_state = LinkState::los;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Link l = generate_link(m, {{30, 20, 40}, CellType::aerial}, rng, los);
    EXPECT_LE(l.paths.size(), 3u);
    EXPECT_EQ(l.paths.front().loss_db, friis_path_loss(norm({30, 20, 40}), 28e9));
  }
}

TEST(GenerateLink, StateMarginalMatchesPredictedProbabilities) {
  const ChannelModel& m = tiny_model();
  const LinkCondition u{{150, -60, 40}, CellType::terrestrial};
  const StateProbs p = predict_state_probs(m.link_state, u);
  std::array<int, 3> counts{0, 0, 0};
  const int n = 100000;
  const auto links = generate_batch(m, std::vector<LinkCondition>{u}, n, 5);
  for (const Link& l : links) counts[static_cast<std::size_t>(state_index(l.state))]++;
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(counts[k] / double(n), p[k], 0.01) << "state " << k;
}

TEST(GenerateBatch, CountAndDeterminism) {
  const ChannelModel& m = tiny_model();
  const std::vector<LinkCondition> one{{{50, 50, 30}, CellType::aerial}};
  EXPECT_EQ(generate_batch(m, one, 100, 1).size(), 100u);
  const auto conds = sample_conditions(50, 8);
  const auto a = generate_batch(m, conds, 3, 9);
  const auto b = generate_batch(m, conds, 3, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_batch(m, conds, 3, 10));
  EXPECT_THROW(generate_batch(m, conds, -1, 9), Error);
}

TEST(GenerateBatch, PermutationPermutesBlocks) {
  const ChannelModel& m = tiny_model();
  auto conds = sample_conditions(30, 12);
  conds.push_back(conds[4]);  // a repeated condition keeps distinct streams
  const int n = 4;
  const auto ref = generate_batch(m, conds, n, 13);
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::size_t> perm(conds.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    // keep the relative order of the two identical conditions
    auto i4 = std::find(perm.begin(), perm.end(), std::size_t{4});
    auto i30 = std::find(perm.begin(), perm.end(), conds.size() - 1);
    if (i30 < i4) std::iter_swap(i4, i30);
    std::vector<LinkCondition> shuffled;
    for (auto i : perm) shuffled.push_back(conds[i]);
    const auto out = generate_batch(m, shuffled, n, 13);
    for (std::size_t j = 0; j < perm.size(); ++j)
      for (int r = 0; r < n; ++r) EXPECT_EQ(out[j * n + r], ref[perm[j] * n + r]);
  }
  for (int r = 0; r < n; ++r) EXPECT_NE(ref[4 * n + r], ref[30 * n + r]);
}

TEST(ModelFile, RoundTripAndVersionCheck) {
  const ChannelModel& m = tiny_model();
  const auto dir = std::filesystem::temp_directory_path() / "mmwgen_model_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.json").string();
  save_model(m, path);
  const ChannelModel r = load_model(path);
  const auto conds = sample_conditions(40, 3);
  EXPECT_EQ(generate_batch(m, conds, 2, 4), generate_batch(r, conds, 2, 4));
  EXPECT_EQ(r.split_seed, 41u);

  nlohmann::json j = to_json(m);
  for (const char* key : {"version", "carrier_frequency_hz", "link_state", "path_vae", "k_max", "l_max_db",
                          "absent_threshold_db", "split_seed"})
    EXPECT_TRUE(j.contains(key)) << key;
  j["version"] = "mmwgen-model-0";
  try {
    model_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::version);
  }
  j.erase("version");
  EXPECT_THROW(model_from_json(j), Error);
  EXPECT_THROW(load_model((dir / "missing.json").string()), Error);
  std::ofstream(dir / "garbage.json") << "{not json";
  try {
    load_model((dir / "garbage.json").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mmwgen

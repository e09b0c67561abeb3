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
#include <set>
#include <sstream>

#include "mmwgen/dataset_io.hpp"
#include "support/random_links.hpp"

namespace mmwgen {
namespace {

std::string line_of(const Link& l) { return link_to_json(l).dump(); }

TEST(ParseLink, StateRules) {
  const Link none = parse_link_line(R"({"d":[10,0,5],"cell_type":"aerial","paths":[]})", 1);
  EXPECT_EQ(none.state, LinkState::no_link);
  EXPECT_TRUE(none.paths.empty());

  Rng rng(1);
  const Link los = testing::random_link(rng, LinkState::los, 3);
  EXPECT_EQ(parse_link_line(line_of(los), 1).state, LinkState::los);

  Link nlos = los;
  nlos.paths.erase(nlos.paths.begin());
  nlos.state = LinkState::nlos;
  EXPECT_EQ(parse_link_line(line_of(nlos), 1).state, LinkState::nlos);

  Link near = los;  // within 0.5 deg and 1 ns: still LOS, snapped onto the geometry
  near.paths[0].aod_az = wrap_azimuth(near.paths[0].aod_az + 0.3);
  near.paths[0].delay_s += 0.5e-9;
  const Link snapped = parse_link_line(line_of(near), 1);
  EXPECT_EQ(snapped.state, LinkState::los);
  EXPECT_TRUE(check_link(snapped).empty());

  Link off = los;
  off.paths[0].delay_s += 2e-9;
  EXPECT_EQ(parse_link_line(line_of(off), 1).state, LinkState::nlos);
}

TEST(ParseLink, CanonicalizesOrderAndAzimuth) {
  const std::string text =
      R"({"d":[50,0,0],"cell_type":"terrestrial","paths":[)"
      R"({"loss_db":150,"aoa_az":190,"aoa_el":0,"aod_az":-190,"aod_el":0,"delay_s":1e-6},)"
      R"({"loss_db":120,"aoa_az":10,"aoa_el":5,"aod_az":20,"aod_el":-5,"delay_s":2e-6}]})";
  const Link l = parse_link_line(text, 3);
  ASSERT_EQ(l.paths.size(), 2u);
  EXPECT_EQ(l.paths[0].loss_db, 120.0);
  EXPECT_DOUBLE_EQ(l.paths[1].aoa_az, -170.0);
  EXPECT_DOUBLE_EQ(l.paths[1].aod_az, 170.0);
  EXPECT_EQ(l.state, LinkState::nlos);
}

void expect_error(const std::string& text, ErrorKind kind, const std::string& needle) {
  try {
    parse_link_line(text, 7);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ParseLink, ErrorsNameLineAndField) {
  expect_error("{oops", ErrorKind::parse, "invalid JSON");
  expect_error(R"({"cell_type":"aerial","paths":[]})", ErrorKind::parse, "'d'");
  expect_error(R"({"d":[1,2],"cell_type":"aerial","paths":[]})", ErrorKind::parse, "'d'");
  expect_error(R"({"d":[0,0,0],"cell_type":"aerial","paths":[]})", ErrorKind::domain, "zero length");
  expect_error(R"({"d":[1,2,3],"cell_type":"space","paths":[]})", ErrorKind::parse, "cell_type");
  expect_error(R"({"d":[1,2,3],"cell_type":"aerial"})", ErrorKind::parse, "'paths'");
  const std::string head = R"({"d":[1,2,3],"cell_type":"aerial","paths":[)";
  expect_error(head + R"({"loss_db":100,"aoa_az":0,"aoa_el":0,"aod_az":0,"aod_el":0}]})", ErrorKind::parse, "'delay_s'");
  expect_error(head + R"({"loss_db":"x","aoa_az":0,"aoa_el":0,"aod_az":0,"aod_el":0,"delay_s":0}]})", ErrorKind::parse,
               "'loss_db'");
  expect_error(head + R"({"loss_db":200,"aoa_az":0,"aoa_el":0,"aod_az":0,"aod_el":0,"delay_s":0}]})", ErrorKind::domain,
               "'loss_db'");
  expect_error(head + R"({"loss_db":-1,"aoa_az":0,"aoa_el":0,"aod_az":0,"aod_el":0,"delay_s":0}]})", ErrorKind::domain,
               "'loss_db'");
  expect_error(head + R"({"loss_db":100,"aoa_az":0,"aoa_el":91,"aod_az":0,"aod_el":0,"delay_s":0}]})", ErrorKind::domain,
               "'aoa_el'");
  expect_error(head + R"({"loss_db":100,"aoa_az":0,"aoa_el":0,"aod_az":0,"aod_el":0,"delay_s":-1}]})", ErrorKind::domain,
               "'delay_s'");
}

TEST(Dataset, SaveLoadRoundTrip) {
  Rng rng(2);
  std::vector<Link> links;
  for (int i = 0; i < 300; ++i) {
    const LinkState s = kAllStates[static_cast<std::size_t>(i % 3)];
    links.push_back(testing::random_link(rng, s, s == LinkState::no_link ? 0 : 1 + i % 19));
  }
  const auto dir = std::filesystem::temp_directory_path() / "mmwgen_ds_test";
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "a.jsonl").string(), b = (dir / "b.jsonl").string();
  save_links(a, links);
  const Dataset first = load_dataset(a);
  ASSERT_EQ(first.links.size(), links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    EXPECT_EQ(first.links[i].state, links[i].state) << i;
    EXPECT_EQ(first.links[i], links[i]) << i;
  }
  save_links(b, first.links);
  EXPECT_EQ(load_dataset(b).links, first.links);
  EXPECT_TRUE(std::holds_alternative<FileSource>(first.source));
  EXPECT_EQ(load_conditions(a).size(), links.size());

  std::ostringstream csv;
  export_csv(csv, links);
  EXPECT_EQ(csv.str().substr(0, 10), "link,dx,dy");

  std::ofstream(dir / "bad.jsonl") << line_of(links[0]) << "\n\n{\"d\":[1,2,3]}\n";
  try {
    load_dataset((dir / "bad.jsonl").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    load_dataset((dir / "missing.jsonl").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  std::filesystem::remove_all(dir);
}

TEST(Dataset, FuzzedRecordsNeverYieldInvalidLinks) {
  Rng rng(3);
  const std::string alphabet = "{}[]\",:0123456789.-e ";
  std::size_t accepted = 0, rejected = 0;
  for (int t = 0; t < 20000; ++t) {
    const Link l = testing::random_link(rng, t % 2 ? LinkState::los : LinkState::nlos, 1 + t % 5);
    std::string text = line_of(l);
    const int edits = 1 + t % 4;
    for (int e = 0; e < edits; ++e) {
      const auto pos = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: text[pos] = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]; break;
        case 1: text.erase(pos, 1); break;
        default: text.insert(pos, 1, alphabet[pos % alphabet.size()]); break;
      }
    }
    try {
      const Link parsed = parse_link_line(text, 1);
      const auto bad = check_link(parsed);
      EXPECT_TRUE(bad.empty()) << text << " -> " << bad.front();
      ++accepted;
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_GT(accepted, 0u);
  EXPECT_GT(rejected, 0u);
}

TEST(Split, SizesPartitionDeterminism) {
  Dataset ds;
  ds.links.resize(21600);
  split_train_test(ds, 0.7, 5);
  const auto train = std::count(ds.tags.begin(), ds.tags.end(), SplitTag::train);
  EXPECT_EQ(train, 15120);
  EXPECT_EQ(static_cast<long>(ds.tags.size()) - train, 6480);
  EXPECT_EQ(*ds.split_seed, 5u);
  Dataset again;
  again.links.resize(21600);
  split_train_test(again, 0.7, 5);
  EXPECT_EQ(again.tags, ds.tags);
  split_train_test(again, 0.7, 6);
  EXPECT_NE(again.tags, ds.tags);
  EXPECT_THROW(split_train_test(again, 1.0, 1), Error);
  EXPECT_THROW(split_train_test(again, 0.0, 1), Error);
  Dataset empty;
  EXPECT_THROW(split_train_test(empty, 0.5, 1), Error);
}

TEST(Split, SubsetsPartitionTheLinks) {
  Dataset ds = oracle_generate(OracleParams{}, sample_conditions(1001, 2), 3);
  split_train_test(ds, 0.3, 9);
  const auto tr = ds.subset(SplitTag::train), te = ds.subset(SplitTag::test);
  EXPECT_EQ(tr.size(), 300u);
  EXPECT_EQ(tr.size() + te.size(), ds.links.size());
  std::set<std::string> a, b;
  for (const auto& l : tr) a.insert(line_of(l));
  for (const auto& l : te) b.insert(line_of(l));
  for (const auto& s : a) EXPECT_EQ(b.count(s), 0u);
}

TEST(Oracle, StateProbabilityFormulas) {
  const OracleParams p;
  const auto overhead = oracle_state_probs(p, {{0, 0, 40}, CellType::terrestrial});
  EXPECT_EQ(overhead.los, 1.0);
  EXPECT_EQ(overhead.no_link, 0.0);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(oracle_link(p, {{0, 0, 40}, CellType::aerial}, rng).state, LinkState::los);

  const auto far = oracle_state_probs(p, {{600, 0, 0}, CellType::terrestrial});
  EXPECT_LT(far.los, 1e-5);
  EXPECT_NEAR(far.no_link, 1.0, 1e-5);

  // hand evaluation at d = (300, 0, 40)
  const auto mid = oracle_state_probs(p, {{300, 0, 40}, CellType::aerial});
  const double los = std::exp(-300.0 / 130.0);
  EXPECT_NEAR(mid.los, los, 1e-12);
  EXPECT_NEAR(mid.no_link, (1 - los) * (300.0 * 300.0 + 1600.0) / 250000.0, 1e-12);
  EXPECT_NEAR(mid.los + mid.nlos + mid.no_link, 1.0, 1e-12);
}

TEST(Oracle, EmpiricalStateFrequencies) {
  const OracleParams p;
  const LinkCondition u{{150, 80, 30}, CellType::terrestrial};
  const auto probs = oracle_state_probs(p, u);
  const std::vector<LinkCondition> conds(100000, u);
  const Dataset ds = oracle_generate(p, conds, 5);
  std::array<int, 3> n{0, 0, 0};
  for (const Link& l : ds.links) n[static_cast<std::size_t>(l.state)]++;
  EXPECT_NEAR(n[0] / 1e5, probs.los, 0.01);
  EXPECT_NEAR(n[1] / 1e5, probs.nlos, 0.01);
  EXPECT_NEAR(n[2] / 1e5, probs.no_link, 0.01);
}

TEST(Oracle, LinksSatisfyInvariants) {
  const OracleParams p;
  const auto conds = sample_conditions(20000, 6);
  const Dataset ds = oracle_generate(p, conds, 7);
  InvariantOptions opt;
  opt.require_causal_delays = true;
  std::size_t counted = 0;
  for (const Link& l : ds.links) {
    const auto bad = check_link(l, opt);
    ASSERT_TRUE(bad.empty()) << bad.front();
    const double friis = friis_path_loss(l.condition.distance(), p.carrier_hz);
    for (const Path& q : l.paths) EXPECT_GE(q.loss_db, friis - 1e-9);
    if (l.state == LinkState::los) {
      EXPECT_EQ(l.paths.front().loss_db, friis);
    }
    // excess delays co-sort with losses
    for (std::size_t k = 1 + (l.state == LinkState::los); k < l.paths.size(); ++k)
      EXPECT_GE(l.paths[k].delay_s, l.paths[k - 1].delay_s);
    counted += l.paths.size();
  }
  EXPECT_GT(counted, 20000u);
  EXPECT_EQ(oracle_generate(p, conds, 7).links, ds.links);
  EXPECT_NE(oracle_generate(p, conds, 8).links, ds.links);
}

TEST(Oracle, AngularScaleDecreasesWithDistance) {
  const OracleParams p;
  EXPECT_DOUBLE_EQ(oracle_angular_scale_deg(p, 0.0), 70.0);
  for (double d = 1.0; d < 2000.0; d *= 1.3)
    EXPECT_LT(oracle_angular_scale_deg(p, d * 1.3), oracle_angular_scale_deg(p, d));
}

TEST(Oracle, LaplacianMoments) {
  Rng rng(8);
  double abs_sum = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = detail::laplacian(rng, 10.0);
    sum += x;
    abs_sum += std::abs(x);
  }
  EXPECT_NEAR(sum / n, 0.0, 0.1);
  EXPECT_NEAR(abs_sum / n, 10.0, 0.1);  // E|X| = scale
}

TEST(Oracle, EveryStateOccursOnTheGrid) {
  const OracleParams p;
  std::array<double, 3> best{0, 0, 0};
  for (double dh = 0; dh <= 500; dh += 25)
    for (double dz = 0; dz <= 130; dz += 10) {
      const auto s = oracle_state_probs(p, {{dh, 0, dz}, CellType::terrestrial});
      best[0] = std::max(best[0], s.los);
      best[1] = std::max(best[1], s.nlos);
      best[2] = std::max(best[2], s.no_link);
    }
  for (double b : best) EXPECT_GE(b, 0.05);
}

TEST(SampleConditions, RegionAndAlternation) {
  const auto c = sample_conditions(5000, 9);
  ASSERT_EQ(c.size(), 5000u);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c[i].cell_type, i % 2 ? CellType::aerial : CellType::terrestrial);
    EXPECT_LE(c[i].horizontal_distance(), 500.0 + 1e-9);
    EXPECT_GE(c[i].d[2], 0.0);
    EXPECT_LE(c[i].d[2], 130.0);
    EXPECT_GE(c[i].distance(), 1.0);
  }
  EXPECT_EQ(sample_conditions(100, 9), std::vector<LinkCondition>(c.begin(), c.begin() + 100));
}

}  // namespace
}  // namespace mmwgen

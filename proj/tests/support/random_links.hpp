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

#ifndef MMWGEN_TESTS_RANDOM_LINKS_HPP
#define MMWGEN_TESTS_RANDOM_LINKS_HPP

// Hand-rolled generators for property tests.

#include <random>
#include <vector>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/propagation.hpp"
#include "mmwgen/random.hpp"

namespace mmwgen::testing {

inline LinkCondition random_condition(Rng& rng) {
  std::uniform_real_distribution<double> xy(-400.0, 400.0);
  std::uniform_real_distribution<double> z(-30.0, 130.0);
  LinkCondition u;
  do {
    u.d = {xy(rng), xy(rng), z(rng)};
  } while (u.distance() < 1.0);
  u.cell_type = std::bernoulli_distribution(0.5)(rng) ? CellType::aerial : CellType::terrestrial;
  return u;
}

// A valid link with `n_nlos` random NLOS paths (plus the direct path if LOS).
inline Link random_link(Rng& rng, LinkState state, int n_nlos) {
  Link l;
  l.condition = random_condition(rng);
  l.state = state;
  if (state == LinkState::no_link) return l;
  const LosGeometry g = los_geometry(l.condition.d);
  std::uniform_real_distribution<double> loss(80.0, 190.0);
  std::uniform_real_distribution<double> az(-180.0, 180.0);
  std::uniform_real_distribution<double> el(-90.0, 90.0);
  std::uniform_real_distribution<double> excess(0.0, 1e-6);
  if (state == LinkState::los) {
    Path d;
    d.loss_db = 70.0;
    d.aod_az = g.departure.azimuth;
    d.aod_el = g.departure.elevation;
    d.aoa_az = g.arrival.azimuth;
    d.aoa_el = g.arrival.elevation;
    d.delay_s = g.delay_s;
    l.paths.push_back(d);
  }
  for (int k = 0; k < n_nlos; ++k) {
    Path p;
    p.loss_db = loss(rng);
    p.aoa_az = wrap_azimuth(az(rng));
    p.aoa_el = el(rng);
    p.aod_az = wrap_azimuth(az(rng));
    p.aod_el = el(rng);
    p.delay_s = g.delay_s + excess(rng);
    l.paths.push_back(p);
  }
  sort_by_loss(l.paths);
  return l;
}

inline double angle_gap(double a, double b) { return std::abs(wrap_azimuth(a - b)); }

}  // namespace mmwgen::testing

#endif

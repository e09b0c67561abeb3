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

#ifndef MMWGEN_TESTS_MC_KL_HPP
#define MMWGEN_TESTS_MC_KL_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "mmwgen/random.hpp"

namespace mmwgen::testing {

// Monte-Carlo KL(N(mu, e^lv) || N(0,1)) as the mean log-density ratio.
inline double mc_kl_1d(double mu, double lv, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const double sd = std::exp(0.5 * lv);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = normal(rng);
    const double z = mu + sd * e;
    acc += (-0.5 * e * e - 0.5 * lv) - (-0.5 * z * z);
  }
  return acc / n;
}

}  // namespace mmwgen::testing

#endif

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

#ifndef MMWGEN_RANDOM_HPP
#define MMWGEN_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmwgen {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream for a (master seed, index path) key. Result depends only
// on the key, never on how many streams were derived before.
inline Rng derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

// Stream tags keep the separate consumers of one master seed apart.
namespace stream_tag {
inline constexpr std::uint64_t init_link_state = 1;
inline constexpr std::uint64_t shuffle_link_state = 2;
inline constexpr std::uint64_t init_encoder = 3;
inline constexpr std::uint64_t init_decoder = 4;
inline constexpr std::uint64_t shuffle_vae = 5;
inline constexpr std::uint64_t noise_vae = 6;
inline constexpr std::uint64_t generate = 7;
inline constexpr std::uint64_t oracle = 8;
inline constexpr std::uint64_t split = 9;
inline constexpr std::uint64_t conditions = 10;
}  // namespace stream_tag

}  // namespace mmwgen

#endif

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

#ifndef MMWGEN_LINK_STATE_MODEL_HPP
#define MMWGEN_LINK_STATE_MODEL_HPP

// First stage of the generator: P(LOS), P(NLOS), P(NoLink) given the link
// condition, and a categorical draw from them.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/random.hpp"
#include "mmwgen/tensor_nn.hpp"

namespace mmwgen {

// Ordered (LOS, NLOS, NoLink).
using StateProbs = std::array<double, 3>;

struct LinkStateConfig {
  int epochs = 50;
  int batch_size = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {25, 10};
};

struct LinkStateNet {
  StandardScaler scaler;
  nn::MlpModel mlp;  // (5, 25, 10, 3), softmax output
};

struct LinkStateTraining {
  LinkStateNet net;
  std::vector<double> loss_trace;  // mean minibatch cross-entropy per epoch
  std::vector<std::string> warnings;
};

inline int state_index(LinkState s) { return static_cast<int>(s); }

inline StateProbs predict_state_probs(const LinkStateNet& net, const LinkCondition& u) {
  const ConditionFeatures f = condition_features(u, ForLinkState{});
  const std::vector<double> x = scaler_apply(net.scaler, f);
  const nn::Vector p = nn::mlp_forward(net.mlp, x);
  return {p[0], p[1], p[2]};
}

// Inverse-CDF draw in the fixed order (LOS, NLOS, NoLink).
inline LinkState sample_state(const StateProbs& p, Rng& rng) {
  const double total = p[0] + p[1] + p[2];
  const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  if (r < p[0]) return LinkState::los;
  if (r < p[0] + p[1]) return LinkState::nlos;
  // guard against r landing exactly on the total with p[2] == 0
  if (p[2] <= 0.0) return p[1] > 0.0 ? LinkState::nlos : LinkState::los;
  return LinkState::no_link;
}

inline LinkState sample_state(const LinkStateNet& net, const LinkCondition& u, Rng& rng) {
  return sample_state(predict_state_probs(net, u), rng);
}

inline LinkStateTraining train_link_state(std::span<const Link> links, const LinkStateConfig& cfg) {
  require(cfg.batch_size >= 1 && cfg.epochs >= 0, ErrorKind::domain, "train_link_state: invalid batch/epochs");
  require(links.size() >= static_cast<std::size_t>(cfg.batch_size) && links.size() >= 2, ErrorKind::domain,
          "train_link_state: need at least one full batch of links");

  LinkStateTraining out;
  const std::size_t n = links.size();

  std::vector<std::vector<double>> raw;
  raw.reserve(n);
  std::array<std::size_t, 3> class_counts{0, 0, 0};
  for (const Link& l : links) {
    const auto f = condition_features(l.condition, ForLinkState{});
    raw.emplace_back(f.begin(), f.end());
    class_counts[static_cast<std::size_t>(state_index(l.state))] += 1;
  }
  for (LinkState s : kAllStates)
    if (class_counts[static_cast<std::size_t>(state_index(s))] == 0)
      out.warnings.push_back("class " + to_string(s) + " absent from training data");

  out.net.scaler = scaler_fit(raw);
  nn::Matrix features(kConditionDim, static_cast<Eigen::Index>(n));
  nn::Matrix targets = nn::Matrix::Zero(3, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = scaler_apply(out.net.scaler, raw[i]);
    for (int r = 0; r < kConditionDim; ++r) features(r, static_cast<Eigen::Index>(i)) = x[static_cast<std::size_t>(r)];
    targets(state_index(links[i].state), static_cast<Eigen::Index>(i)) = 1.0;
  }

  std::vector<int> widths{kConditionDim};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(3);
  out.net.mlp = nn::init_params(widths, splitmix64(cfg.seed ^ stream_tag::init_link_state), nn::Activation::softmax);
  nn::AdamState adam = nn::make_adam(out.net.mlp.params, {cfg.learning_rate});

  std::vector<std::size_t> order(n);
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t batches = n / bs;  // trailing partial batch dropped
  nn::Matrix xb(kConditionDim, cfg.batch_size);
  nn::Matrix yb(3, cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = derive_stream(cfg.seed, {stream_tag::shuffle_link_state, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t j = 0; j < bs; ++j) {
        const auto col = static_cast<Eigen::Index>(order[b * bs + j]);
        xb.col(static_cast<Eigen::Index>(j)) = features.col(col);
        yb.col(static_cast<Eigen::Index>(j)) = targets.col(col);
      }
      nn::ForwardCache cache;
      const nn::Matrix p = nn::forward_batch(out.net.mlp, xb, &cache);
      epoch_loss += -(yb.array() * p.array().max(1e-300).log()).sum() / static_cast<double>(bs);
      const nn::Matrix dlogits = (p - yb) / static_cast<double>(bs);
      const auto back = nn::backward_batch(out.net.mlp, cache, dlogits, /*grad_wrt_preactivation=*/true);
      nn::adam_step(out.net.mlp, back.grads, adam);
    }
    out.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
  }
  return out;
}

inline nlohmann::json to_json(const LinkStateNet& net) {
  return {{"scaler", to_json(net.scaler)}, {"mlp", nn::to_json(net.mlp)}};
}

inline LinkStateNet link_state_from_json(const nlohmann::json& j) {
  try {
    LinkStateNet net{scaler_from_json(j.at("scaler")), nn::mlp_from_json(j.at("mlp"))};
    require(net.scaler.dim() == kConditionDim && net.mlp.input_width() == kConditionDim && net.mlp.output_width() == 3,
            ErrorKind::parse, "link_state: unexpected dimensions");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("link_state: ") + e.what());
  }
}

}  // namespace mmwgen

#endif

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

#ifndef MMWGEN_TENSOR_NN_HPP
#define MMWGEN_TENSOR_NN_HPP

// Dense multilayer perceptrons in double precision: batched forward pass,
// reverse-mode gradients, Adam, initialization and JSON serialization.
//
// Batches are matrices with one sample per column.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwgen/error.hpp"
#include "mmwgen/random.hpp"

namespace mmwgen::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { relu, linear, softmax };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "linear";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  if (s == "softmax") return Activation::softmax;
  throw Error(ErrorKind::parse, "unknown activation '" + s + "'");
}

// Parameter blocks of a network, or anything congruent with them (gradients,
// Adam moments). weights[i] is (widths[i+1] x widths[i]).
struct ParamSet {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static ParamSet zeros_like(const ParamSet& other) {
    ParamSet z;
    for (const auto& w : other.weights) z.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& b : other.biases) z.biases.push_back(Vector::Zero(b.size()));
    return z;
  }
};

using Gradients = ParamSet;

struct MlpModel {
  std::vector<int> widths;
  ParamSet params;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::linear;

  std::size_t num_layers() const { return params.weights.size(); }
  int input_width() const { return widths.front(); }
  int output_width() const { return widths.back(); }
};

inline long count_params(std::span<const int> widths) {
  long total = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
    total += static_cast<long>(widths[i]) * widths[i + 1] + widths[i + 1];
  return total;
}

inline long count_params(const std::vector<int>& widths) { return count_params(std::span<const int>(widths)); }

// Fan-balanced uniform initialization, zero biases.
inline MlpModel init_params(const std::vector<int>& widths, std::uint64_t seed,
                            Activation output = Activation::linear) {
  require(!widths.empty(), ErrorKind::domain, "init_params: empty width list");
  require(widths.size() >= 2, ErrorKind::domain, "init_params: need at least input and output widths");
  for (int w : widths) require(w >= 1, ErrorKind::domain, "init_params: widths must be >= 1");

  MlpModel m;
  m.widths = widths;
  m.output_activation = output;
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int fan_in = widths[i];
    const int fan_out = widths[i + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(fan_out, fan_in);
    // Row-major fill order so the draw sequence matches the serialized layout.
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    m.params.weights.push_back(std::move(w));
    m.params.biases.push_back(Vector::Zero(fan_out));
  }
  return m;
}

// Column-wise softmax with max subtraction.
inline void softmax_columns(Matrix& logits) {
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    auto col = logits.col(c);
    const double mx = col.maxCoeff();
    col = (col.array() - mx).exp().matrix();
    col /= col.sum();
  }
}

struct ForwardCache {
  std::vector<Matrix> activations;  // activations[0] = input, activations[i+1] = output of layer i
  std::vector<Matrix> pre;          // pre-activation of layer i
};

inline void check_input_rows(const MlpModel& model, Eigen::Index rows) {
  if (rows != model.input_width())
    throw Error(ErrorKind::dimension,
                dimension_message("mlp_forward input", static_cast<std::size_t>(model.input_width()),
                                  static_cast<std::size_t>(rows)));
}

inline Matrix forward_batch(const MlpModel& model, const Matrix& input, ForwardCache* cache = nullptr) {
  check_input_rows(model, input.rows());
  const std::size_t n = model.num_layers();
  if (cache) {
    cache->activations.resize(n + 1);
    cache->pre.resize(n);
    cache->activations[0] = input;
  }
  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix z = model.params.weights[i] * a;
    z.colwise() += model.params.biases[i];
    if (cache) cache->pre[i] = z;
    const Activation act = (i + 1 == n) ? model.output_activation : model.hidden_activation;
    switch (act) {
      case Activation::relu: a = z.cwiseMax(0.0); break;
      case Activation::linear: a = std::move(z); break;
      case Activation::softmax: softmax_columns(z); a = std::move(z); break;
    }
    if (cache) cache->activations[i + 1] = a;
  }
  return a;
}

inline Vector mlp_forward(const MlpModel& model, std::span<const double> input) {
  Matrix x = Eigen::Map<const Vector>(input.data(), static_cast<Eigen::Index>(input.size()));
  return forward_batch(model, x).col(0);
}

struct BackwardResult {
  Gradients grads;
  Matrix input_grad;
};

// Gradient of a loss w.r.t. every parameter and the input, given dLoss/dOutput
// for each column of the cached batch. When `grad_wrt_preactivation` is set the
// supplied gradient is taken w.r.t. the last layer's pre-activation (softmax
// plus cross-entropy collapses to p - y there).
inline BackwardResult backward_batch(const MlpModel& model, const ForwardCache& cache, const Matrix& output_grad,
                                     bool grad_wrt_preactivation = false) {
  const std::size_t n = model.num_layers();
  require(cache.pre.size() == n, ErrorKind::dimension, "mlp_backward: forward cache does not match model");
  const Matrix& out = cache.activations[n];
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols())
    throw Error(ErrorKind::dimension,
                "mlp_backward: loss gradient is " + std::to_string(output_grad.rows()) + "x" +
                    std::to_string(output_grad.cols()) + ", output is " + std::to_string(out.rows()) + "x" +
                    std::to_string(out.cols()));

  BackwardResult r;
  r.grads.weights.resize(n);
  r.grads.biases.resize(n);

  Matrix delta;
  if (grad_wrt_preactivation) {
    delta = output_grad;
  } else {
    switch (model.output_activation) {
      case Activation::linear: delta = output_grad; break;
      case Activation::relu: delta = output_grad.cwiseProduct((cache.pre[n - 1].array() > 0.0).cast<double>().matrix()); break;
      case Activation::softmax: {
        // J^T g = p * (g - <g, p>) per column
        const Eigen::RowVectorXd dots = (output_grad.cwiseProduct(out)).colwise().sum();
        delta = out.cwiseProduct(output_grad - Matrix::Ones(out.rows(), 1) * dots);
        break;
      }
    }
  }

  for (std::size_t k = n; k-- > 0;) {
    r.grads.weights[k] = delta * cache.activations[k].transpose();
    r.grads.biases[k] = delta.rowwise().sum();
    Matrix upstream = model.params.weights[k].transpose() * delta;
    if (k == 0) {
      r.input_grad = std::move(upstream);
    } else {
      // hidden layers are relu
      delta = upstream.cwiseProduct((cache.pre[k - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return r;
}

// Recomputes the forward pass for a single input.
inline Gradients mlp_backward(const MlpModel& model, std::span<const double> input, std::span<const double> loss_grad) {
  if (loss_grad.size() != static_cast<std::size_t>(model.output_width()))
    throw Error(ErrorKind::dimension,
                dimension_message("mlp_backward loss gradient", static_cast<std::size_t>(model.output_width()),
                                  loss_grad.size()));
  Matrix x = Eigen::Map<const Vector>(input.data(), static_cast<Eigen::Index>(input.size()));
  ForwardCache cache;
  forward_batch(model, x, &cache);
  Matrix g = Eigen::Map<const Vector>(loss_grad.data(), static_cast<Eigen::Index>(loss_grad.size()));
  return backward_batch(model, cache, g).grads;
}

inline bool all_finite(const ParamSet& p) {
  for (const auto& w : p.weights)
    if (!w.allFinite()) return false;
  for (const auto& b : p.biases)
    if (!b.allFinite()) return false;
  return true;
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct AdamState {
  ParamSet first_moment;
  ParamSet second_moment;
  long step_count = 0;
  AdamConfig config;
};

inline AdamState make_adam(const ParamSet& params, const AdamConfig& config) {
  require(config.learning_rate > 0.0, ErrorKind::domain, "adam: learning rate must be positive");
  return AdamState{ParamSet::zeros_like(params), ParamSet::zeros_like(params), 0, config};
}

// Bias-corrected Adam. Gradients are validated before any parameter moves.
inline void adam_step(ParamSet& params, const Gradients& grads, AdamState& state) {
  const std::size_t n = params.weights.size();
  require(grads.weights.size() == n && grads.biases.size() == n && state.first_moment.weights.size() == n,
          ErrorKind::dimension, "adam_step: parameter/gradient block count mismatch");
  require(state.config.learning_rate > 0.0, ErrorKind::domain, "adam_step: learning rate must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    require(grads.weights[i].rows() == params.weights[i].rows() && grads.weights[i].cols() == params.weights[i].cols() &&
                grads.biases[i].size() == params.biases[i].size(),
            ErrorKind::dimension, "adam_step: gradient shape mismatch in layer " + std::to_string(i));
    if (!grads.weights[i].allFinite())
      throw Error(ErrorKind::non_finite, "adam_step: non-finite gradient in layer " + std::to_string(i) + " weights");
    if (!grads.biases[i].allFinite())
      throw Error(ErrorKind::non_finite, "adam_step: non-finite gradient in layer " + std::to_string(i) + " biases");
  }

  const auto& c = state.config;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    p.array() -= c.learning_rate * (m.array() / corr1) / ((v.array() / corr2).sqrt() + c.epsilon);
  };
  for (std::size_t i = 0; i < n; ++i) {
    update(params.weights[i], grads.weights[i], state.first_moment.weights[i], state.second_moment.weights[i]);
    update(params.biases[i], grads.biases[i], state.first_moment.biases[i], state.second_moment.biases[i]);
  }
}

inline void adam_step(MlpModel& model, const Gradients& grads, AdamState& state) {
  adam_step(model.params, grads, state);
}

// ---- serialization ------------------------------------------------------

inline nlohmann::json to_json(const MlpModel& m) {
  nlohmann::json j;
  j["widths"] = m.widths;
  nlohmann::json ws = nlohmann::json::array();
  nlohmann::json bs = nlohmann::json::array();
  for (std::size_t i = 0; i < m.num_layers(); ++i) {
    const Matrix& w = m.params.weights[i];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    ws.push_back(flat);
    const Vector& b = m.params.biases[i];
    bs.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  }
  j["weights"] = ws;
  j["biases"] = bs;
  j["hidden_activation"] = to_string(m.hidden_activation);
  j["output_activation"] = to_string(m.output_activation);
  return j;
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
  MlpModel m;
  try {
    m.widths = j.at("widths").get<std::vector<int>>();
    m.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
    m.output_activation = activation_from_string(j.at("output_activation").get<std::string>());
    const auto& ws = j.at("weights");
    const auto& bs = j.at("biases");
    require(m.widths.size() >= 2, ErrorKind::parse, "mlp: need at least two widths");
    const std::size_t n = m.widths.size() - 1;
    require(ws.size() == n && bs.size() == n, ErrorKind::parse, "mlp: layer count does not match widths");
    for (std::size_t i = 0; i < n; ++i) {
      const int rows = m.widths[i + 1];
      const int cols = m.widths[i];
      const auto flat = ws[i].get<std::vector<double>>();
      const auto bias = bs[i].get<std::vector<double>>();
      require(flat.size() == static_cast<std::size_t>(rows) * cols, ErrorKind::parse,
              "mlp: layer " + std::to_string(i) + " weight count mismatch");
      require(bias.size() == static_cast<std::size_t>(rows), ErrorKind::parse,
              "mlp: layer " + std::to_string(i) + " bias count mismatch");
      Matrix w(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) w(r, c) = flat[static_cast<std::size_t>(r) * cols + c];
      m.params.weights.push_back(std::move(w));
      m.params.biases.push_back(Eigen::Map<const Vector>(bias.data(), rows));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("mlp: ") + e.what());
  }
  return m;
}

}  // namespace mmwgen::nn

#endif

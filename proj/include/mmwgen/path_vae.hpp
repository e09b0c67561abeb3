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

#ifndef MMWGEN_PATH_VAE_HPP
#define MMWGEN_PATH_VAE_HPP

// Conditional VAE over the 120-dimensional NLOS path vector.
//
// Encoder: [cond(5); x(120)] -> [mu_z(20); logvar_z(20)]
// Decoder: [cond(5); z(20)]  -> [mu_x(120); logvar_x(120)]
// Both log-variance heads are clamped to [-10, 10] before exponentiation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/random.hpp"
#include "mmwgen/tensor_nn.hpp"

namespace mmwgen {

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;
inline constexpr int kDefaultLatentDim = 20;

// Network-side representation of path losses: the raw dB values, or the
// excess over the free-space loss of the link distance.
enum class LossReference { absolute, friis };

inline std::string to_string(LossReference r) { return r == LossReference::friis ? "friis" : "absolute"; }

inline LossReference loss_reference_from_string(const std::string& s) {
  if (s == "friis") return LossReference::friis;
  if (s == "absolute") return LossReference::absolute;
  throw Error(ErrorKind::parse, "unknown loss reference '" + s + "'");
}

struct VaeConfig {
  int epochs = 10000;
  int batch_size = 100;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  int latent_dim = kDefaultLatentDim;
  std::vector<int> encoder_hidden = {200, 80};
  std::vector<int> decoder_hidden = {200, 80};
  double absent_threshold_db = kDefaultAbsentThresholdDb;
  LossReference loss_reference = LossReference::friis;
  double carrier_frequency_hz = kDefaultCarrierHz;
};

struct PathVae {
  nn::MlpModel encoder;
  nn::MlpModel decoder;
  StandardScaler cond_scaler;
  StandardScaler data_scaler;
  int latent_dim = kDefaultLatentDim;
  double absent_threshold_db = kDefaultAbsentThresholdDb;
  LossReference loss_reference = LossReference::friis;
  double carrier_frequency_hz = kDefaultCarrierHz;

  bool trained() const { return !cond_scaler.empty() && !data_scaler.empty(); }
};

enum class GenerationMode {
  sample,     // z ~ N(0, I), x ~ N(mu_x, sigma_x^2)
  mean_only,  // z = 0, x = mu_x
};

inline double clamp_log_var(double lv) { return std::clamp(lv, kLogVarMin, kLogVarMax); }

// KL(N(mu, diag exp(lv)) || N(0, I)).
inline double kl_diag_gaussian(std::span<const double> mu, std::span<const double> log_var) {
  if (mu.size() != log_var.size())
    throw Error(ErrorKind::dimension, dimension_message("kl_diag_gaussian log_var", mu.size(), log_var.size()));
  double kl = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) kl += mu[i] * mu[i] + std::exp(log_var[i]) - log_var[i] - 1.0;
  return 0.5 * kl;
}

inline std::vector<double> reparam_sample(std::span<const double> mu, std::span<const double> log_var, Rng& rng) {
  if (mu.size() != log_var.size())
    throw Error(ErrorKind::dimension, dimension_message("reparam_sample log_var", mu.size(), log_var.size()));
  std::normal_distribution<double> normal;
  std::vector<double> z(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) z[i] = mu[i] + std::exp(0.5 * clamp_log_var(log_var[i])) * normal(rng);
  return z;
}

namespace detail {

// Row-wise clamp to [kLogVarMin, kLogVarMax]; mask is 1 where the clamp is inactive.
inline nn::Matrix clamped(const nn::Matrix& lv, nn::Matrix* mask) {
  if (mask) *mask = ((lv.array() >= kLogVarMin) && (lv.array() <= kLogVarMax)).cast<double>().matrix();
  return lv.cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
}

inline void check_finite(const nn::Matrix& m, const char* term) {
  if (!m.allFinite()) throw Error(ErrorKind::non_finite, std::string("elbo: non-finite ") + term);
}

}  // namespace detail

struct ElboParts {
  double elbo = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

struct ElboBatch {
  double loss = 0.0;        // mean -ELBO over the batch
  double recon_mean = 0.0;  // mean reconstruction log-likelihood
  double kl_mean = 0.0;
  nn::Gradients encoder_grads;
  nn::Gradients decoder_grads;
};

// Single-sample ELBO estimate for a batch of scaled data `x` (120 x B) and
// scaled conditions `cond` (5 x B), with the latent noise supplied as
// `noise` (latent x B) so the estimator is a deterministic function of it.
inline ElboBatch neg_elbo_batch(const PathVae& vae, const nn::Matrix& x, const nn::Matrix& cond,
                                const nn::Matrix& noise, bool want_grads = true) {
  const Eigen::Index B = x.cols();
  const int L = vae.latent_dim;
  const int D = static_cast<int>(x.rows());
  require(cond.cols() == B && noise.cols() == B && noise.rows() == L && cond.rows() == kConditionDim,
          ErrorKind::dimension, "neg_elbo_batch: batch shape mismatch");
  require(vae.encoder.output_width() == 2 * L && vae.decoder.output_width() == 2 * D, ErrorKind::dimension,
          "neg_elbo_batch: network widths do not match data/latent dimensions");

  nn::Matrix enc_in(kConditionDim + D, B);
  enc_in << cond, x;
  nn::ForwardCache enc_cache;
  const nn::Matrix enc_out = nn::forward_batch(vae.encoder, enc_in, want_grads ? &enc_cache : nullptr);
  const nn::Matrix mu_z = enc_out.topRows(L);
  nn::Matrix mask_z;
  const nn::Matrix lv_z = detail::clamped(enc_out.bottomRows(L), &mask_z);
  const nn::Matrix sd_z = (0.5 * lv_z.array()).exp().matrix();
  const nn::Matrix z = mu_z + sd_z.cwiseProduct(noise);
  detail::check_finite(z, "latent sample");

  nn::Matrix dec_in(kConditionDim + L, B);
  dec_in << cond, z;
  nn::ForwardCache dec_cache;
  const nn::Matrix dec_out = nn::forward_batch(vae.decoder, dec_in, want_grads ? &dec_cache : nullptr);
  const nn::Matrix mu_x = dec_out.topRows(D);
  nn::Matrix mask_x;
  const nn::Matrix lv_x = detail::clamped(dec_out.bottomRows(D), &mask_x);
  const nn::Matrix inv_var_x = (-lv_x.array()).exp().matrix();
  const nn::Matrix resid = x - mu_x;

  const double log2pi = std::log(2.0 * std::numbers::pi);
  const nn::Matrix sq = resid.cwiseProduct(resid).cwiseProduct(inv_var_x);
  const double recon_total = -0.5 * (static_cast<double>(D * B) * log2pi + lv_x.sum() + sq.sum());
  const nn::Matrix exp_lv_z = lv_z.array().exp().matrix();
  const double kl_total = 0.5 * (mu_z.cwiseProduct(mu_z) + exp_lv_z - lv_z).sum() - 0.5 * static_cast<double>(L * B);
  if (!std::isfinite(recon_total)) throw Error(ErrorKind::non_finite, "elbo: non-finite reconstruction term");
  if (!std::isfinite(kl_total)) throw Error(ErrorKind::non_finite, "elbo: non-finite KL term");

  ElboBatch r;
  const double inv_b = 1.0 / static_cast<double>(B);
  r.recon_mean = recon_total * inv_b;
  r.kl_mean = kl_total * inv_b;
  r.loss = r.kl_mean - r.recon_mean;
  if (!want_grads) return r;

  // d(-recon)/d(mu_x) = -(x - mu) / var ; d(-recon)/d(lv_x) = 0.5 (1 - (x - mu)^2 / var)
  nn::Matrix g_dec(2 * D, B);
  g_dec.topRows(D) = -resid.cwiseProduct(inv_var_x) * inv_b;
  g_dec.bottomRows(D) = (0.5 * (1.0 - sq.array())).matrix().cwiseProduct(mask_x) * inv_b;
  auto dec_back = nn::backward_batch(vae.decoder, dec_cache, g_dec);
  const nn::Matrix g_z = dec_back.input_grad.bottomRows(L);

  nn::Matrix g_enc(2 * L, B);
  g_enc.topRows(L) = g_z + mu_z * inv_b;
  g_enc.bottomRows(L) =
      (g_z.cwiseProduct(noise).cwiseProduct(sd_z) * 0.5 + (exp_lv_z.array() - 1.0).matrix() * (0.5 * inv_b))
          .cwiseProduct(mask_z);
  auto enc_back = nn::backward_batch(vae.encoder, enc_cache, g_enc);

  r.encoder_grads = std::move(enc_back.grads);
  r.decoder_grads = std::move(dec_back.grads);
  return r;
}

inline nn::Matrix standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  nn::Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
  return m;
}

// ELBO of one scaled sample with a fresh reparameterized latent draw.
inline ElboParts elbo(const PathVae& vae, std::span<const double> x, std::span<const double> cond, Rng& rng) {
  if (x.size() != static_cast<std::size_t>(vae.decoder.output_width() / 2))
    throw Error(ErrorKind::dimension, dimension_message("elbo data", static_cast<std::size_t>(vae.decoder.output_width() / 2), x.size()));
  if (cond.size() != static_cast<std::size_t>(kConditionDim))
    throw Error(ErrorKind::dimension, dimension_message("elbo condition", kConditionDim, cond.size()));
  const nn::Matrix xm = Eigen::Map<const nn::Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  const nn::Matrix cm = Eigen::Map<const nn::Vector>(cond.data(), kConditionDim);
  const nn::Matrix noise = standard_normal_matrix(vae.latent_dim, 1, rng);
  const ElboBatch b = neg_elbo_batch(vae, xm, cm, noise, false);
  return ElboParts{b.recon_mean - b.kl_mean, b.recon_mean, b.kl_mean};
}

inline PathVae make_untrained_vae(const VaeConfig& cfg) {
  std::vector<int> enc{kConditionDim + kPathVectorDim};
  enc.insert(enc.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
  enc.push_back(2 * cfg.latent_dim);
  std::vector<int> dec{kConditionDim + cfg.latent_dim};
  dec.insert(dec.end(), cfg.decoder_hidden.begin(), cfg.decoder_hidden.end());
  dec.push_back(2 * kPathVectorDim);
  PathVae vae;
  vae.encoder = nn::init_params(enc, splitmix64(cfg.seed ^ stream_tag::init_encoder));
  vae.decoder = nn::init_params(dec, splitmix64(cfg.seed ^ stream_tag::init_decoder));
  vae.latent_dim = cfg.latent_dim;
  vae.absent_threshold_db = cfg.absent_threshold_db;
  vae.loss_reference = cfg.loss_reference;
  vae.carrier_frequency_hz = cfg.carrier_frequency_hz;
  return vae;
}

// Shift applied to every loss slot (padding included) between the path
// vector and the network target; decoding adds it back, so padding still
// lands on 200 dB.
inline double loss_offset_db(LossReference ref, double carrier_hz, const LinkCondition& u) {
  return ref == LossReference::friis ? friis_path_loss(u.distance(), carrier_hz) : 0.0;
}

inline void shift_losses(std::vector<double>& v, double offset_db) {
  for (int k = 0; k < kMaxPaths; ++k) v[static_cast<std::size_t>(k * kPathFields)] += offset_db;
}

struct VaeTrainingData {
  std::vector<std::vector<double>> conditions;  // unscaled 5-d ForVae features
  std::vector<std::vector<double>> targets;     // unscaled encode_paths vectors, losses shifted
};

// LOS and NLOS links only; NoLink links carry no paths to learn.
inline VaeTrainingData vae_training_data(std::span<const Link> links, LossReference ref = LossReference::friis,
                                         double carrier_hz = kDefaultCarrierHz) {
  VaeTrainingData d;
  for (const Link& l : links) {
    if (l.state == LinkState::no_link) continue;
    const auto f = condition_features(l.condition, ForVae{l.state});
    d.conditions.emplace_back(f.begin(), f.end());
    d.targets.push_back(encode_paths(l));
    shift_losses(d.targets.back(), -loss_offset_db(ref, carrier_hz, l.condition));
  }
  return d;
}

inline nn::Matrix scaled_columns(const StandardScaler& s, const std::vector<std::vector<double>>& rows) {
  nn::Matrix m(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = scaler_apply(s, rows[i]);
    m.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const nn::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return m;
}

struct VaeTraining {
  PathVae vae;
  std::vector<double> loss_trace;  // mean minibatch -ELBO per epoch
};

using EpochCallback = std::function<void(int epoch, double loss)>;

inline VaeTraining train_vae(std::span<const Link> links, const VaeConfig& cfg, const EpochCallback& on_epoch = {}) {
  require(cfg.batch_size >= 1 && cfg.epochs >= 0 && cfg.learning_rate > 0.0, ErrorKind::domain,
          "train_vae: invalid configuration");
  require(cfg.carrier_frequency_hz > 0.0, ErrorKind::domain, "train_vae: carrier frequency must be positive");
  const VaeTrainingData data = vae_training_data(links, cfg.loss_reference, cfg.carrier_frequency_hz);
  require(data.targets.size() >= static_cast<std::size_t>(cfg.batch_size) && data.targets.size() >= 2,
          ErrorKind::domain,
          "train_vae: " + std::to_string(data.targets.size()) + " LOS/NLOS links, fewer than one batch");

  VaeTraining out;
  out.vae = make_untrained_vae(cfg);
  out.vae.cond_scaler = scaler_fit(data.conditions);
  out.vae.data_scaler = scaler_fit(data.targets);
  const nn::Matrix cond = scaled_columns(out.vae.cond_scaler, data.conditions);
  const nn::Matrix target = scaled_columns(out.vae.data_scaler, data.targets);

  nn::AdamState adam_enc = nn::make_adam(out.vae.encoder.params, {cfg.learning_rate});
  nn::AdamState adam_dec = nn::make_adam(out.vae.decoder.params, {cfg.learning_rate});

  const std::size_t n = data.targets.size();
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t batches = n / bs;
  std::vector<std::size_t> order(n);
  nn::Matrix xb(kPathVectorDim, cfg.batch_size);
  nn::Matrix cb(kConditionDim, cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = derive_stream(cfg.seed, {stream_tag::shuffle_vae, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    Rng noise_rng = derive_stream(cfg.seed, {stream_tag::noise_vae, static_cast<std::uint64_t>(epoch)});
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t j = 0; j < bs; ++j) {
        const auto col = static_cast<Eigen::Index>(order[b * bs + j]);
        xb.col(static_cast<Eigen::Index>(j)) = target.col(col);
        cb.col(static_cast<Eigen::Index>(j)) = cond.col(col);
      }
      const nn::Matrix noise = standard_normal_matrix(cfg.latent_dim, cfg.batch_size, noise_rng);
      const ElboBatch step = neg_elbo_batch(out.vae, xb, cb, noise);
      nn::adam_step(out.vae.encoder, step.encoder_grads, adam_enc);
      nn::adam_step(out.vae.decoder, step.decoder_grads, adam_dec);
      epoch_loss += step.loss;
    }
    out.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
    if (on_epoch) on_epoch(epoch, out.loss_trace.back());
  }
  return out;
}

// Decoder output (mu_x, clamped logvar_x) for one scaled condition and latent.
inline std::pair<nn::Vector, nn::Vector> decode_distribution(const PathVae& vae, std::span<const double> cond_scaled,
                                                             std::span<const double> z) {
  nn::Vector in(kConditionDim + vae.latent_dim);
  for (int i = 0; i < kConditionDim; ++i) in[i] = cond_scaled[static_cast<std::size_t>(i)];
  for (int i = 0; i < vae.latent_dim; ++i) in[kConditionDim + i] = z[static_cast<std::size_t>(i)];
  const nn::Vector out = nn::mlp_forward(vae.decoder, std::span<const double>(in.data(), static_cast<std::size_t>(in.size())));
  const Eigen::Index D = out.size() / 2;
  nn::Vector lv = out.tail(D).cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
  return {out.head(D), lv};
}

// Draws the 120-d path vector in data units (before thresholding).
inline std::vector<double> generate_path_vector(const PathVae& vae, const LinkCondition& u, LinkState s, Rng& rng,
                                                GenerationMode mode = GenerationMode::sample) {
  require(vae.trained(), ErrorKind::domain, "generate_nlos: model is untrained (scalers absent)");
  require(s != LinkState::no_link, ErrorKind::domain, "generate_nlos: state must be LOS or NLOS");
  const auto f = condition_features(u, ForVae{s});
  const auto cond = scaler_apply(vae.cond_scaler, f);
  std::normal_distribution<double> normal;
  std::vector<double> z(static_cast<std::size_t>(vae.latent_dim), 0.0);
  if (mode == GenerationMode::sample)
    for (auto& zi : z) zi = normal(rng);
  const auto [mu, lv] = decode_distribution(vae, cond, z);
  std::vector<double> x(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    double v = mu[i];
    if (mode == GenerationMode::sample) v += std::exp(0.5 * lv[i]) * normal(rng);
    x[static_cast<std::size_t>(i)] = v;
  }
  std::vector<double> out = scaler_invert(vae.data_scaler, x);
  shift_losses(out, loss_offset_db(vae.loss_reference, vae.carrier_frequency_hz, u));
  return out;
}

inline std::vector<Path> generate_nlos(const PathVae& vae, const LinkCondition& u, LinkState s, Rng& rng,
                                       GenerationMode mode = GenerationMode::sample) {
  const auto x = generate_path_vector(vae, u, s, rng, mode);
  return decode_paths(x, u, vae.absent_threshold_db);
}

inline nlohmann::json to_json(const PathVae& v) {
  return {{"encoder", nn::to_json(v.encoder)},
          {"decoder", nn::to_json(v.decoder)},
          {"cond_scaler", to_json(v.cond_scaler)},
          {"data_scaler", to_json(v.data_scaler)},
          {"latent_dim", v.latent_dim},
          {"absent_threshold_db", v.absent_threshold_db},
          {"loss_reference", to_string(v.loss_reference)},
          {"carrier_frequency_hz", v.carrier_frequency_hz}};
}

inline PathVae path_vae_from_json(const nlohmann::json& j) {
  try {
    PathVae v;
    v.encoder = nn::mlp_from_json(j.at("encoder"));
    v.decoder = nn::mlp_from_json(j.at("decoder"));
    v.cond_scaler = scaler_from_json(j.at("cond_scaler"));
    v.data_scaler = scaler_from_json(j.at("data_scaler"));
    v.latent_dim = j.at("latent_dim").get<int>();
    v.absent_threshold_db = j.at("absent_threshold_db").get<double>();
    v.loss_reference = loss_reference_from_string(j.at("loss_reference").get<std::string>());
    v.carrier_frequency_hz = j.at("carrier_frequency_hz").get<double>();
    require(v.carrier_frequency_hz > 0.0, ErrorKind::parse, "path_vae: invalid carrier frequency");
    require(v.encoder.input_width() == kConditionDim + kPathVectorDim && v.encoder.output_width() == 2 * v.latent_dim &&
                v.decoder.input_width() == kConditionDim + v.latent_dim &&
                v.decoder.output_width() == 2 * kPathVectorDim && v.cond_scaler.dim() == kConditionDim &&
                v.data_scaler.dim() == kPathVectorDim,
            ErrorKind::parse, "path_vae: unexpected dimensions");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("path_vae: ") + e.what());
  }
}

}  // namespace mmwgen

#endif

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

#ifndef MMWGEN_CLI_HPP
#define MMWGEN_CLI_HPP

// Batch front end: oracle, train, generate, eval, snrmap.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmwgen/antenna_snr.hpp"
#include "mmwgen/channel_generator.hpp"
#include "mmwgen/dataset_io.hpp"
#include "mmwgen/eval_stats.hpp"
#include "mmwgen/link_state_model.hpp"
#include "mmwgen/path_vae.hpp"

namespace mmwgen::cli {

enum ExitCode : int {
  ok = 0,
  internal_error = 1,
  usage_error = 2,
  io_error = 3,
  version_error = 4,
  data_error = 5,
  domain_error = 6,
};

inline constexpr const char* kExitCodeHelp =
    "Exit codes: 0 success, 1 internal error, 2 usage error (unknown flag, bad value), "
    "3 missing/unwritable file, 4 model version mismatch, 5 malformed input data, "
    "6 invalid argument value for the computation.";

// MMWGEN_LOG=0 silences progress, 1 (default) reports, 2 adds per-epoch detail.
inline int log_level() {
  const char* v = std::getenv("MMWGEN_LOG");
  if (!v) return 1;
  try {
    return std::stoi(v);
  } catch (...) {
    return 1;
  }
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << s << '\n';
  return s;
}

inline void write_json_file(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + p.string() + "'");
  f << j.dump(1) << '\n';
}

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::io: return io_error;
    case ErrorKind::version: return version_error;
    case ErrorKind::parse: return data_error;
    case ErrorKind::dimension: return data_error;
    case ErrorKind::domain: return domain_error;
    case ErrorKind::non_finite: return internal_error;
  }
  return internal_error;
}

struct OracleArgs {
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  ConditionRegion region;
};

struct TrainArgs {
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> split_seed;
  std::string test_out;
  double train_fraction = 0.7;
  LinkStateConfig ls;
  VaeConfig vae;
  double carrier_hz = kDefaultCarrierHz;
  std::string loss_reference = "friis";
  int progress_every = 100;
};

struct GenerateArgs {
  std::string model;
  std::string conditions;
  int n = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool mean_only = false;
};

struct EvalArgs {
  std::string model;
  std::string test;
  std::optional<std::uint64_t> seed;
  std::string outdir;
};

struct SnrArgs {
  std::string model;
  std::string gnb = "terrestrial";
  std::optional<std::uint64_t> seed;
  std::string out;
  int n_real = 100;
  std::size_t x_points = 51;
  std::size_t z_points = 14;
};

inline int run_oracle(OracleArgs a, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(a.seed, err);
  const auto conds = sample_conditions(a.n, seed, a.region);
  const OracleParams params;
  const Dataset ds = oracle_generate(params, conds, seed);
  save_links(a.out, ds.links);
  write_json_file(a.out + ".config.json",
                  {{"command", "oracle"},
                   {"n", a.n},
                   {"seed", seed},
                   {"region",
                    {{"dh_max", a.region.dh_max}, {"dz_min", a.region.dz_min}, {"dz_max", a.region.dz_max},
                     {"min_distance", a.region.min_distance}}},
                   {"params",
                    {{"carrier_hz", params.carrier_hz},
                     {"los_scale_m", params.los_scale_m},
                     {"los_alt_gain", params.los_alt_gain},
                     {"outage_ref_m", params.outage_ref_m},
                     {"nlos_extra_count_p", params.nlos_extra_count_p},
                     {"first_excess_mean_db", params.first_excess_mean_db},
                     {"increment_mean_db", params.increment_mean_db},
                     {"ang_scale_base_deg", params.ang_scale_base_deg},
                     {"ang_scale_amp_deg", params.ang_scale_amp_deg},
                     {"ang_scale_decay_m", params.ang_scale_decay_m},
                     {"delay_excess_mean_s", params.delay_excess_mean_s}}}});
  if (log_level() >= 1) err << "oracle: wrote " << ds.links.size() << " links to " << a.out << '\n';
  return ok;
}

inline int run_train(TrainArgs a, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(a.seed, err);
  const std::uint64_t split_seed = a.split_seed.value_or(seed);
  Dataset ds = load_dataset(a.data);
  split_train_test(ds, a.train_fraction, split_seed);
  const std::vector<Link> train = ds.subset(SplitTag::train);
  if (!a.test_out.empty()) save_links(a.test_out, ds.subset(SplitTag::test));

  a.ls.seed = seed;
  a.vae.seed = splitmix64(seed + 1);
  a.vae.carrier_frequency_hz = a.carrier_hz;
  a.vae.loss_reference = loss_reference_from_string(a.loss_reference);
  const int verbosity = log_level();
  if (verbosity >= 1) err << "train: " << train.size() << " training links, link-state stage\n";
  const LinkStateTraining ls = train_link_state(train, a.ls);
  for (const auto& w : ls.warnings) err << "warning: " << w << '\n';
  if (verbosity >= 1) err << "train: VAE stage, " << a.vae.epochs << " epochs\n";
  const VaeTraining vt = train_vae(train, a.vae, [&](int epoch, double loss) {
    if (verbosity >= 2 || (verbosity >= 1 && a.progress_every > 0 && (epoch + 1) % a.progress_every == 0))
      err << "  vae epoch " << epoch + 1 << " -ELBO " << loss << '\n';
  });

  ChannelModel model;
  model.link_state = ls.net;
  model.path_vae = vt.vae;
  model.carrier_frequency_hz = a.carrier_hz;
  model.split_seed = split_seed;
  save_model(model, a.out);

  {
    std::ofstream f(a.out + ".traces.csv");
    if (!f) throw Error(ErrorKind::io, "cannot write '" + a.out + ".traces.csv'");
    f << std::setprecision(17) << "stage,epoch,loss\n";
    for (std::size_t i = 0; i < ls.loss_trace.size(); ++i) f << "link_state," << i + 1 << ',' << ls.loss_trace[i] << '\n';
    for (std::size_t i = 0; i < vt.loss_trace.size(); ++i) f << "path_vae," << i + 1 << ',' << vt.loss_trace[i] << '\n';
  }
  write_json_file(a.out + ".config.json",
                  {{"command", "train"},
                   {"data", a.data},
                   {"seed", seed},
                   {"split_seed", split_seed},
                   {"train_fraction", a.train_fraction},
                   {"train_links", train.size()},
                   {"carrier_frequency_hz", a.carrier_hz},
                   {"link_state",
                    {{"epochs", a.ls.epochs}, {"batch_size", a.ls.batch_size}, {"learning_rate", a.ls.learning_rate},
                     {"hidden", a.ls.hidden}, {"seed", a.ls.seed}}},
                   {"path_vae",
                    {{"epochs", a.vae.epochs},
                     {"batch_size", a.vae.batch_size},
                     {"learning_rate", a.vae.learning_rate},
                     {"latent_dim", a.vae.latent_dim},
                     {"encoder_hidden", a.vae.encoder_hidden},
                     {"decoder_hidden", a.vae.decoder_hidden},
                     {"absent_threshold_db", a.vae.absent_threshold_db},
                     {"loss_reference", to_string(a.vae.loss_reference)},
                     {"seed", a.vae.seed}}},
                   {"test_out", a.test_out}});
  if (verbosity >= 1) err << "train: wrote " << a.out << '\n';
  return ok;
}

inline int run_generate(GenerateArgs a, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(a.seed, err);
  const ChannelModel model = load_model(a.model);
  const auto conds = load_conditions(a.conditions);
  GenerateOptions opt;
  opt.mode = a.mean_only ? GenerationMode::mean_only : GenerationMode::sample;
  const auto links = generate_batch(model, conds, a.n, seed, opt);
  save_links(a.out, links);
  write_json_file(a.out + ".config.json", {{"command", "generate"},
                                           {"model", a.model},
                                           {"conditions", a.conditions},
                                           {"n", a.n},
                                           {"seed", seed},
                                           {"mean_only", a.mean_only}});
  if (log_level() >= 1) err << "generate: wrote " << links.size() << " links to " << a.out << '\n';
  return ok;
}

inline int run_eval(EvalArgs a, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(a.seed, err);
  const ChannelModel model = load_model(a.model);
  const Dataset test = load_dataset(a.test);
  const EvalReport r = compare_model_to_test(model, test.links, seed);
  write_report(r, a.outdir);
  write_json_file(std::filesystem::path(a.outdir) / "config.json",
                  {{"command", "eval"}, {"model", a.model}, {"test", a.test}, {"seed", seed}});
  if (log_level() >= 1)
    for (const auto& [name, c] : r.cells) err << "eval: KS(" << name << ") = " << c.ks << '\n';
  return ok;
}

inline int run_snrmap(SnrArgs a, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(a.seed, err);
  const ChannelModel model = load_model(a.model);
  const GnbSpec gnb = a.gnb == "aerial" ? GnbSpec::aerial() : GnbSpec::terrestrial();
  SnrGrid grid;
  grid.x_m = SnrGrid::linear_values(0.0, 500.0, a.x_points);
  grid.z_m = SnrGrid::linear_values(0.0, 130.0, a.z_points);
  const SnrArrays arrays;
  const LinkBudget budget;
  const SnrMap m = snr_map(model, gnb, grid, a.n_real, seed, arrays, budget);
  write_snr_csv(a.out, m);
  nlohmann::json side = snr_params_json(gnb, grid, a.n_real, seed, arrays, budget);
  side["command"] = "snrmap";
  side["model"] = a.model;
  write_json_file(a.out + ".json", side);
  if (log_level() >= 1) err << "snrmap: wrote " << a.out << '\n';
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
  CLI::App app{"mmwgen: two-stage generative mmWave channel model"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "write a synthetic ground-truth dataset (JSON lines)");
  oracle->add_option("--n", oa.n, "number of links")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oa.seed, "master seed (drawn from entropy when omitted)");
  oracle->add_option("--out", oa.out, "output .jsonl")->required();
  oracle->add_option("--dh-max", oa.region.dh_max, "max horizontal distance [m]")->check(CLI::PositiveNumber);
  oracle->add_option("--dz-min", oa.region.dz_min, "min vertical offset [m]");
  oracle->add_option("--dz-max", oa.region.dz_max, "max vertical offset [m]");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train the link-state network and the path VAE");
  train->add_option("--data", ta.data, "training dataset (.jsonl)")->required();
  train->add_option("--out", ta.out, "output model file")->required();
  train->add_option("--epochs-ls", ta.ls.epochs, "link-state epochs")->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--epochs-vae", ta.vae.epochs, "VAE epochs")->check(CLI::NonNegativeNumber)->capture_default_str();
  train->add_option("--batch-ls", ta.ls.batch_size, "link-state batch size")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--batch-vae", ta.vae.batch_size, "VAE batch size")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--lr-ls", ta.ls.learning_rate, "link-state learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--lr-vae", ta.vae.learning_rate, "VAE learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--decoder-hidden", ta.vae.decoder_hidden, "VAE decoder hidden widths")->delimiter(',')->capture_default_str();
  train->add_option("--absent-threshold", ta.vae.absent_threshold_db, "absent-path threshold [dB]")->capture_default_str();
  train->add_option("--loss-reference", ta.loss_reference, "VAE loss target: friis (excess over free space) or absolute")
      ->check(CLI::IsMember({"friis", "absolute"}))
      ->capture_default_str();
  train->add_option("--carrier", ta.carrier_hz, "carrier frequency [Hz]")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--train-fraction", ta.train_fraction, "fraction of links used for training")->capture_default_str();
  train->add_option("--seed", ta.seed, "master seed (drawn from entropy when omitted)");
  train->add_option("--split-seed", ta.split_seed, "train/test split seed (defaults to --seed)");
  train->add_option("--test-out", ta.test_out, "write the held-out split here (.jsonl)");
  train->add_option("--progress-every", ta.progress_every, "report VAE loss every N epochs")->capture_default_str();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "generate links for a list of conditions");
  gen->add_option("--model", ga.model, "model file")->required();
  gen->add_option("--conditions", ga.conditions, "conditions (.jsonl, paths ignored)")->required();
  gen->add_option("--n", ga.n, "realizations per condition")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", ga.seed, "master seed (drawn from entropy when omitted)");
  gen->add_option("--out", ga.out, "output .jsonl")->required();
  gen->add_flag("--mean-only", ga.mean_only, "decode latent and output means instead of sampling");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "compare model draws against a test set");
  ev->add_option("--model", ea.model, "model file")->required();
  ev->add_option("--test", ea.test, "test dataset (.jsonl)")->required();
  ev->add_option("--seed", ea.seed, "master seed (drawn from entropy when omitted)");
  ev->add_option("--outdir", ea.outdir, "report directory")->required();

  SnrArgs sa;
  auto* snr = app.add_subcommand("snrmap", "median uplink SNR over UAV positions");
  snr->add_option("--model", sa.model, "model file")->required();
  snr->add_option("--gnb", sa.gnb, "gNB type")->check(CLI::IsMember({"terrestrial", "aerial"}))->capture_default_str();
  snr->add_option("--seed", sa.seed, "master seed (drawn from entropy when omitted)");
  snr->add_option("--out", sa.out, "output .csv")->required();
  snr->add_option("--nreal", sa.n_real, "realizations per grid point")->check(CLI::PositiveNumber)->capture_default_str();
  snr->add_option("--x-points", sa.x_points, "grid points over x in [0, 500] m")->check(CLI::PositiveNumber)->capture_default_str();
  snr->add_option("--z-points", sa.z_points, "grid points over z in [0, 130] m")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  }

  try {
    if (*oracle) return run_oracle(oa, err);
    if (*train) return run_train(ta, err);
    if (*gen) return run_generate(ga, err);
    if (*ev) return run_eval(ea, err);
    if (*snr) return run_snrmap(sa, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return internal_error;
  }
  return usage_error;
}

}  // namespace mmwgen::cli

#endif

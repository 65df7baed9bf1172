// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line front end: enhancement, data synthesis, accounting, loss
// evaluation, the RTF benchmark and the schedule trace.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pse/data/mix.hpp"
#include "pse/data/room.hpp"
#include "pse/dsp/stft.hpp"
#include "pse/error.hpp"
#include "pse/io/run_config.hpp"
#include "pse/io/wav.hpp"
#include "pse/io/weights.hpp"
#include "pse/loss/losses.hpp"
#include "pse/model/model.hpp"
#include "pse/model/stats.hpp"
#include "pse/model/stream.hpp"
#include "pse/rng.hpp"
#include "pse/train/schedule.hpp"

namespace {

using pse::check;
using pse::fail;
using pse::i64;
using pse::Rng;

pse::io::RunConfig config_from_flag(const std::string& path) {
  if (path.empty()) return pse::io::RunConfig{};
  return pse::io::load_run_config(path);
}

pse::model::SpeakerEmbedding read_embedding(const std::string& arg, int dim) {
  pse::model::SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(dim), 0.0f);
  if (arg == "zero") return emb;
  std::ifstream f(arg, std::ios::binary);
  check(f.good(), "io_error", "cannot open embedding file: " + arg);
  f.seekg(0, std::ios::end);
  const auto n = static_cast<i64>(f.tellg());
  f.seekg(0, std::ios::beg);
  check(n == static_cast<i64>(dim) * 4, "bad_embedding",
        "embedding file must hold exactly " + std::to_string(dim) +
            " little-endian float32 values");
  f.read(reinterpret_cast<char*>(emb.e.data()), n);
  check(f.good(), "io_error", "cannot read embedding file: " + arg);
  return emb;
}

pse::dsp::AudioBuffer seeded_noise(i64 n, int sample_rate, uint64_t seed) {
  pse::dsp::AudioBuffer buf;
  buf.sample_rate = sample_rate;
  buf.samples.resize(static_cast<size_t>(n));
  Rng rng(seed);
  for (auto& v : buf.samples) v = 0.1f * rng.normal();
  return buf;
}

std::vector<float> enhance_streaming(const pse::model::Model& model,
                                     const pse::dsp::AudioBuffer& noisy,
                                     const pse::dsp::AudioBuffer& enroll,
                                     const pse::model::SpeakerEmbedding& emb) {
  pse::model::StreamSession session(model, enroll, emb);
  const int hop = session.hop();
  const i64 n = noisy.size();
  const i64 pushes = (n + hop - 1) / hop;

  std::vector<float> out;
  out.reserve(static_cast<size_t>((pushes + 1) * hop));
  std::vector<float> block(static_cast<size_t>(hop));
  for (i64 p = 0; p < pushes; ++p) {
    for (int j = 0; j < hop; ++j) {
      const i64 idx = p * hop + j;
      block[static_cast<size_t>(j)] =
          idx < n ? noisy.samples[static_cast<size_t>(idx)] : 0.0f;
    }
    const auto got = session.push(block);
    out.insert(out.end(), got.begin(), got.end());
  }
  const auto tail = session.flush();
  out.insert(out.end(), tail.begin(), tail.end());

  // Remove the algorithmic delay so the file lines up with the input.
  out.erase(out.begin(), out.begin() + session.latency());
  out.resize(static_cast<size_t>(n), 0.0f);
  return out;
}

int cmd_enhance(const std::string& noisy_path, const std::string& enroll_path,
                const std::string& embedding_arg,
                const std::string& weights_path, const std::string& out_path,
                bool streaming, uint64_t seed,
                const std::string& config_path) {
  const auto rc = config_from_flag(config_path);
  auto model = pse::model::Model::build(rc.model, seed);
  if (!weights_path.empty()) {
    pse::io::load_weights(weights_path, model->registry());
  }

  const auto noisy = pse::io::read_wav(noisy_path);
  const auto enroll = pse::io::read_wav(enroll_path);
  check(noisy.sample_rate == rc.model.sample_rate, "bad_audio",
        "noisy input must be sampled at " +
            std::to_string(rc.model.sample_rate) + " Hz");
  const auto emb = read_embedding(embedding_arg, rc.model.embedding_dim);

  pse::dsp::AudioBuffer out;
  out.sample_rate = noisy.sample_rate;
  if (streaming) {
    out.samples = enhance_streaming(*model, noisy, enroll, emb);
  } else {
    out = pse::model::enhance_offline(*model, noisy, enroll, emb);
  }
  pse::io::write_wav(out_path, out, pse::io::WavEncoding::float32);
  std::cout << "out=" << out_path << " samples=" << out.size()
            << " mode=" << (streaming ? "streaming" : "offline") << "\n";
  return 0;
}

int cmd_rir_gen(int count, const std::string& range, const std::string& dir,
                uint64_t seed, int fs, i64 len) {
  const size_t colon = range.find(':');
  check(colon != std::string::npos, "bad_config",
        "reverberation range must look like LO:HI");
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(range.substr(0, colon));
    hi = std::stod(range.substr(colon + 1));
  } catch (...) {
    fail("bad_config", "reverberation range must look like LO:HI");
  }
  check(lo <= hi, "bad_config", "reverberation range is inverted");
  check(count > 0, "bad_config", "count must be positive");
  std::filesystem::create_directories(dir);

  for (int i = 0; i < count; ++i) {
    Rng rng(seed + static_cast<uint64_t>(i));
    pse::data::RoomSpec room;
    room.dims = {3.0 + 5.0 * rng.uniform(), 3.0 + 5.0 * rng.uniform(),
                 2.5 + 1.5 * rng.uniform()};
    for (int a = 0; a < 3; ++a) {
      const double span = room.dims[static_cast<size_t>(a)] - 1.0;
      room.src[static_cast<size_t>(a)] = 0.5 + span * rng.uniform();
      room.mic[static_cast<size_t>(a)] = 0.5 + span * rng.uniform();
    }
    room.rt60_target = lo + (hi - lo) * rng.uniform();
    room.sample_rate = fs;
    room.rir_len = len;
    room.validate();

    const double beta = pse::data::rt60_to_reflection_eyring(room);
    const auto rir = pse::data::simulate_rir(room, beta);

    char name[32];
    std::snprintf(name, sizeof(name), "rir_%05d.wav", i);
    const auto path = std::filesystem::path(dir) / name;
    pse::io::write_wav(path.string(), rir, pse::io::WavEncoding::float32);
    std::cout << "item=" << name << " rt60=" << room.rt60_target
              << " beta=" << beta << "\n";
  }
  return 0;
}

std::map<std::string, std::string> parse_manifest_line(
    const std::string& line, int line_no) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    const size_t eq = tok.find('=');
    check(eq != std::string::npos && eq > 0, "bad_manifest",
          "line " + std::to_string(line_no) + ": expected key=value tokens");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

int cmd_mix(const std::string& manifest, const std::string& dir,
            uint64_t seed) {
  std::ifstream f(manifest);
  check(f.good(), "io_error", "cannot open manifest: " + manifest);
  std::filesystem::create_directories(dir);

  std::string line;
  int line_no = 0;
  int item = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto kv = parse_manifest_line(line, line_no);

    static const std::set<std::string> known = {
        "target", "noise", "interferer", "rir", "snr", "sir", "gain", "seed"};
    for (const auto& [k, v] : kv) {
      check(known.count(k) != 0, "bad_manifest",
            "line " + std::to_string(line_no) + ": unknown key: " + k);
    }
    check(kv.count("target") != 0, "bad_manifest",
          "line " + std::to_string(line_no) + ": missing target=");

    pse::data::MixtureRecipe recipe;
    recipe.target = pse::io::read_wav(kv["target"]);
    if (kv.count("rir")) {
      recipe.rir = pse::io::read_wav(kv["rir"]);
    } else {
      recipe.rir.sample_rate = recipe.target.sample_rate;
      recipe.rir.samples = {1.0f};  // anechoic
    }
    if (kv.count("noise")) recipe.noise = pse::io::read_wav(kv["noise"]);
    if (kv.count("interferer"))
      recipe.interferer = pse::io::read_wav(kv["interferer"]);
    try {
      if (kv.count("snr")) recipe.snr_db = std::stod(kv["snr"]);
      if (kv.count("sir")) recipe.sir_db = std::stod(kv["sir"]);
      if (kv.count("gain")) recipe.output_gain = std::stod(kv["gain"]);
      recipe.seed = kv.count("seed")
                        ? std::stoull(kv["seed"])
                        : seed + static_cast<uint64_t>(item);
    } catch (const pse::Error&) {
      throw;
    } catch (...) {
      fail("bad_manifest",
           "line " + std::to_string(line_no) + ": bad numeric value");
    }

    const auto result = pse::data::synth_example(recipe);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "mix_%05d", item);
    const auto base = std::filesystem::path(dir) / stem;
    pse::io::write_wav(base.string() + "_noisy.wav", result.noisy,
                       pse::io::WavEncoding::float32);
    pse::io::write_wav(base.string() + "_clean.wav", result.clean,
                       pse::io::WavEncoding::float32);
    pse::io::write_wav(base.string() + "_enroll.wav", result.enroll,
                       pse::io::WavEncoding::float32);
    std::cout << "item=" << stem << " seed=" << recipe.seed
              << " gain=" << result.gain << "\n";
    ++item;
  }
  check(item > 0, "bad_manifest", "manifest has no recipes");
  return 0;
}

int cmd_stats(const std::string& which, const std::string& config_path,
              const std::string& group) {
  const auto rc = config_from_flag(config_path);
  if (which == "params") {
    auto model = pse::model::Model::build(rc.model, 0);
    const auto stats = pse::model::param_stats(model->registry());
    if (!group.empty()) {
      const auto g = pse::model::group_from_string(group);
      check(g.has_value(), "unknown_group", "unknown group: " + group);
      std::cout << "group." << group << "="
                << model->registry().count_params(*g) << "\n";
      return 0;
    }
    std::cout << "total=" << stats.total << "\n";
    for (const auto& [name, n] : stats.per_group) {
      std::cout << "group." << name << "=" << n << "\n";
    }
    return 0;
  }
  if (which == "macs") {
    const auto stats = pse::model::mac_stats(rc.model);
    std::cout << "per_frame=" << stats.per_frame << "\n";
    std::cout << "per_second=" << stats.per_second << "\n";
    for (const auto& [name, n] : stats.parts) {
      if (!group.empty() && name.find(group) == std::string::npos) continue;
      std::cout << "part." << name << "=" << n << "\n";
    }
    return 0;
  }
  fail("bad_config", "stats expects 'params' or 'macs'");
}

int cmd_loss_eval(const std::string& ref_path, const std::string& est_path,
                  bool single, const std::string& which) {
  const auto ref = pse::io::read_wav(ref_path);
  const auto est = pse::io::read_wav(est_path);
  const auto multi = single ? pse::loss::MultiResConfig::single()
                            : pse::loss::MultiResConfig::standard();
  pse::loss::CompositeKind kind;
  if (which == "l1") {
    kind = pse::loss::CompositeKind::L1;
  } else if (which == "l2") {
    kind = pse::loss::CompositeKind::L2;
  } else {
    fail("bad_config", "loss kind must be l1 or l2");
  }
  const auto b = pse::loss::composite_loss(ref, est, multi, kind, 0.3f);
  std::cout << "si_snr=" << b.si_snr << "\n";
  for (size_t m = 0; m < b.mag.size(); ++m) {
    std::cout << "mag_" << m << "=" << b.mag[m] << "\n";
    std::cout << "pha_" << m << "=" << b.pha[m] << "\n";
    std::cout << "asym_" << m << "=" << b.asym[m] << "\n";
  }
  std::cout << "composite=" << b.composite << "\n";
  std::cout << "which=" << (kind == pse::loss::CompositeKind::L1 ? "l1" : "l2")
            << "\n";
  return 0;
}

int cmd_bench_rtf(const std::string& mode, double seconds,
                  const std::string& config_path) {
  check(seconds >= 5.0, "bad_config", "benchmark needs at least 5 seconds");
  const auto rc = config_from_flag(config_path);
  auto model = pse::model::Model::build(rc.model, 7);

  const int fs = rc.model.sample_rate;
  const int hop = rc.model.stft.hop_len;
  const i64 n = static_cast<i64>(seconds * fs);
  const auto noisy = seeded_noise(n, fs, 11);
  const auto enroll = seeded_noise(fs, fs, 12);
  pse::model::SpeakerEmbedding emb;
  emb.e.assign(static_cast<size_t>(rc.model.embedding_dim), 0.0f);

  using clock = std::chrono::steady_clock;
  const double hop_s = static_cast<double>(hop) / fs;

  if (mode == "streaming") {
    pse::model::StreamSession session(*model, enroll, emb);
    const i64 pushes = n / hop;
    constexpr i64 kWarmup = 50;
    check(pushes > kWarmup, "bad_config", "input too short for warm-up");
    std::vector<float> block(static_cast<size_t>(hop));
    std::vector<double> rtf;
    rtf.reserve(static_cast<size_t>(pushes - kWarmup));
    for (i64 p = 0; p < pushes; ++p) {
      std::copy_n(noisy.samples.begin() + p * hop, hop, block.begin());
      const auto t0 = clock::now();
      const auto out = session.push(block);
      const auto t1 = clock::now();
      if (out.empty()) fail("internal", "empty streaming block");
      if (p >= kWarmup) {
        rtf.push_back(std::chrono::duration<double>(t1 - t0).count() / hop_s);
      }
    }
    double sum = 0.0;
    for (double v : rtf) sum += v;
    std::vector<double> sorted = rtf;
    std::sort(sorted.begin(), sorted.end());
    const double p95 = sorted[static_cast<size_t>(
        std::min<double>(std::floor(0.95 * sorted.size()),
                         static_cast<double>(sorted.size() - 1)))];
    std::cout << "mode=streaming\n";
    std::cout << "frames=" << rtf.size() << "\n";
    std::cout << "rtf_mean=" << sum / static_cast<double>(rtf.size()) << "\n";
    std::cout << "rtf_p95=" << p95 << "\n";
    return 0;
  }
  if (mode == "offline") {
    const auto t0 = clock::now();
    const auto out = pse::model::enhance_offline(*model, noisy, enroll, emb);
    const auto t1 = clock::now();
    if (out.size() != n) fail("internal", "bad offline output length");
    const double total = std::chrono::duration<double>(t1 - t0).count();
    const double rtf = total / seconds;
    std::cout << "mode=offline\n";
    std::cout << "frames=" << (n - rc.model.stft.win_len) / hop + 1 << "\n";
    std::cout << "rtf_mean=" << rtf << "\n";
    std::cout << "rtf_p95=" << rtf << "\n";
    return 0;
  }
  fail("bad_config", "mode must be streaming or offline");
}

int cmd_schedule_trace(const std::string& losses_csv) {
  std::vector<double> losses;
  std::stringstream ss(losses_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      losses.push_back(std::stod(item));
    } catch (...) {
      fail("bad_value", "bad loss value: " + item);
    }
  }
  check(!losses.empty(), "bad_value", "no losses given");
  const auto trace = pse::train::lr_trace(losses);
  for (size_t i = 0; i < trace.size(); ++i) {
    std::cout << "epoch=" << i + 1 << " loss=" << losses[i]
              << " lr=" << trace[i] << "\n";
  }
  return 0;
}

int cmd_weights_init(const std::string& out_path, uint64_t seed,
                     const std::string& config_path) {
  const auto rc = config_from_flag(config_path);
  auto model = pse::model::Model::build(rc.model, seed);
  pse::io::save_weights(model->registry(), out_path);
  std::cout << "out=" << out_path
            << " tensors=" << model->registry().entries().size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized speech enhancement engine"};
  app.require_subcommand(1);

  // enhance
  std::string noisy_path, enroll_path, embedding_arg, weights_path, out_path;
  std::string config_path;
  bool streaming = false;
  uint64_t seed = 0;
  auto* enhance = app.add_subcommand("enhance", "Enhance a noisy recording");
  enhance->add_option("--noisy", noisy_path)->required();
  enhance->add_option("--enroll", enroll_path)->required();
  enhance->add_option("--embedding", embedding_arg,
                      "raw float32 file or 'zero'")
      ->required();
  enhance->add_option("--weights", weights_path);
  enhance->add_option("--out", out_path)->required();
  enhance->add_flag("--streaming", streaming);
  enhance->add_option("--seed", seed);
  enhance->add_option("--config", config_path);

  // rir gen
  int rir_count = 0;
  std::string rir_range = "0.1:1.0", rir_dir;
  uint64_t rir_seed = 0;
  int rir_fs = 48000;
  i64 rir_len = 48000;
  auto* rir = app.add_subcommand("rir", "Room impulse responses");
  auto* rir_gen = rir->add_subcommand("gen", "Generate a batch of responses");
  rir_gen->add_option("--count", rir_count)->required();
  rir_gen->add_option("--rt60", rir_range, "target range LO:HI seconds");
  rir_gen->add_option("--out", rir_dir)->required();
  rir_gen->add_option("--seed", rir_seed)->required();
  rir_gen->add_option("--fs", rir_fs);
  rir_gen->add_option("--len", rir_len);

  // mix
  std::string mix_manifest, mix_dir;
  uint64_t mix_seed = 0;
  auto* mix = app.add_subcommand("mix", "Synthesize training examples");
  mix->add_option("--manifest", mix_manifest)->required();
  mix->add_option("--out", mix_dir)->required();
  mix->add_option("--seed", mix_seed)->required();

  // stats
  std::string stats_which, stats_config, stats_group;
  auto* stats = app.add_subcommand("stats", "Parameter and MAC accounting");
  stats->add_option("which", stats_which, "params or macs")->required();
  stats->add_option("--config", stats_config);
  stats->add_option("--group", stats_group);

  // loss eval
  std::string loss_ref, loss_est, loss_which = "l1";
  bool loss_multi = false, loss_single = false;
  auto* loss = app.add_subcommand("loss", "Loss evaluation");
  auto* loss_eval = loss->add_subcommand("eval", "Evaluate the composite loss");
  loss_eval->add_option("--ref", loss_ref)->required();
  loss_eval->add_option("--est", loss_est)->required();
  auto* multi_flag = loss_eval->add_flag("--multi", loss_multi);
  loss_eval->add_flag("--single", loss_single)->excludes(multi_flag);
  loss_eval->add_option("--which", loss_which, "l1 or l2");

  // bench rtf
  std::string bench_mode = "streaming", bench_config;
  double bench_seconds = 10.0;
  auto* bench = app.add_subcommand("bench", "Performance measurements");
  auto* bench_rtf = bench->add_subcommand("rtf", "Real-time factor");
  bench_rtf->add_option("--mode", bench_mode, "streaming or offline");
  bench_rtf->add_option("--seconds", bench_seconds);
  bench_rtf->add_option("--config", bench_config);

  // schedule trace
  std::string trace_losses;
  auto* schedule = app.add_subcommand("schedule", "Training schedule");
  auto* schedule_trace =
      schedule->add_subcommand("trace", "Learning-rate trace");
  schedule_trace->add_option("--losses", trace_losses,
                             "comma-separated validation losses")
      ->required();

  // weights init
  std::string wi_out, wi_config;
  uint64_t wi_seed = 0;
  auto* weights = app.add_subcommand("weights", "Weight files");
  auto* weights_init =
      weights->add_subcommand("init", "Write a randomly initialized file");
  weights_init->add_option("--out", wi_out)->required();
  weights_init->add_option("--seed", wi_seed);
  weights_init->add_option("--config", wi_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: cli: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*enhance) {
      return cmd_enhance(noisy_path, enroll_path, embedding_arg, weights_path,
                         out_path, streaming, seed, config_path);
    }
    if (*rir_gen) {
      return cmd_rir_gen(rir_count, rir_range, rir_dir, rir_seed, rir_fs,
                         rir_len);
    }
    if (*mix) return cmd_mix(mix_manifest, mix_dir, mix_seed);
    if (*stats) return cmd_stats(stats_which, stats_config, stats_group);
    if (*loss_eval) {
      return cmd_loss_eval(loss_ref, loss_est, loss_single, loss_which);
    }
    if (*bench_rtf) {
      return cmd_bench_rtf(bench_mode, bench_seconds, bench_config);
    }
    if (*schedule_trace) return cmd_schedule_trace(trace_losses);
    if (*weights_init) return cmd_weights_init(wi_out, wi_seed, wi_config);
    std::cerr << "error: cli: missing subcommand\n";
    return 1;
  } catch (const pse::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

// Copyright 2026 The pse-engine authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pse/io/run_config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "pse/error.hpp"

namespace pse::io {
namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const int n = std::stoi(v, &used);
    check(used == v.size(), "bad_value", "bad integer for " + key);
    return n;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail("bad_value", "bad integer for " + key + ": " + v);
  }
}

float parse_float(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const float f = std::stof(v, &used);
    check(used == v.size(), "bad_value", "bad number for " + key);
    return f;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail("bad_value", "bad number for " + key + ": " + v);
  }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const uint64_t n = std::stoull(v, &used);
    check(used == v.size(), "bad_value", "bad integer for " + key);
    return n;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail("bad_value", "bad integer for " + key + ": " + v);
  }
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_int(key, strip(item)));
  }
  check(!out.empty(), "bad_value", "empty list for " + key);
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig rc;
  model::ModelConfig& m = rc.model;

  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    check(eq != std::string::npos, "bad_config",
          "line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    check(!key.empty() && !val.empty(), "bad_config",
          "line " + std::to_string(line_no) + ": expected key=value");

    if (key == "n_fd") m.n_fd = parse_int(key, val);
    else if (key == "n_fu") m.n_fu = parse_int(key, val);
    else if (key == "conv_channels") m.conv_channels = parse_int(key, val);
    else if (key == "kernel_t") m.kernel_t = parse_int(key, val);
    else if (key == "kernel_f") m.kernel_f = parse_int(key, val);
    else if (key == "stride_t") m.stride_t = parse_int(key, val);
    else if (key == "stride_f") m.stride_f = parse_int(key, val);
    else if (key == "n_stcnl_groups") m.n_stcnl_groups = parse_int(key, val);
    else if (key == "stcm_per_group") m.stcm_per_group = parse_int(key, val);
    else if (key == "dilations") m.dilations = parse_int_list(key, val);
    else if (key == "dconv_kernel") m.dconv_kernel = parse_int(key, val);
    else if (key == "lstm_hidden") m.lstm_hidden = parse_int(key, val);
    else if (key == "spk_blstm_hidden")
      m.spk_blstm_hidden = parse_int(key, val);
    else if (key == "spk_fd_layers") m.spk_fd_layers = parse_int(key, val);
    else if (key == "spk_channels") m.spk_channels = parse_int(key, val);
    else if (key == "embedding_dim") m.embedding_dim = parse_int(key, val);
    else if (key == "fft_len") m.stft.fft_len = parse_int(key, val);
    else if (key == "win_len") m.stft.win_len = parse_int(key, val);
    else if (key == "hop_len") m.stft.hop_len = parse_int(key, val);
    else if (key == "compression") m.compression = parse_float(key, val);
    else if (key == "sample_rate") m.sample_rate = parse_int(key, val);
    else if (key == "seed") rc.seed = parse_u64(key, val);
    else fail("unknown_key", "unknown key: " + key);
  }
  m.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  check(f.good(), "io_error", "cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace pse::io

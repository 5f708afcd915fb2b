// Copyright 2026 The TEAM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Run configuration shared by the command-line subcommands. Every field has
// a snake_case key; the same keys are used in key=value config files, in
// resolved snapshots, and (with dashes) as command-line flags.

#include "team/mutual/mutual.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace team::cli {

struct RunConfig {
  std::string data;
  std::string embeddings;  // optional word-vector file for topic selection
  std::string out = "run";
  std::string protocol = "cross_target";  // or "in_target"
  std::size_t folds = 10;
  std::size_t fold = 0;
  std::string target;
  mutual::TeamConfig team;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
T parse_number(const std::string& key, const std::string& s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("config key '" + key + "': cannot parse '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + s + "'");
}

struct Field {
  std::string key;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline Field text(std::string key, std::string help, std::string RunConfig::*m) {
  return {key, std::move(help), [m](const RunConfig& c) { return c.*m; },
          [m](RunConfig& c, const std::string& v) { c.*m = v; }};
}

template <class T>
std::string format(T v) {
  if constexpr (std::is_same_v<T, bool>)
    return v ? "true" : "false";
  else if constexpr (std::is_floating_point_v<T>)
    return format_double(v);
  else
    return std::to_string(v);
}

template <class T>
T parse(const std::string& key, const std::string& s) {
  if constexpr (std::is_same_v<T, bool>)
    return parse_bool(key, s);
  else
    return parse_number<T>(key, s);
}

/// `ref` maps a config to the member it controls; reads never modify.
template <class T>
Field typed(std::string key, std::string help, T& (*ref)(RunConfig&)) {
  return {key, std::move(help),
          [ref](const RunConfig& c) { return format(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse<T>(key, v); }};
}

}  // namespace detail

/// All configurable fields, in snapshot order.
inline const std::vector<detail::Field>& config_fields() {
  using namespace detail;
  static const std::vector<Field> fields = {
      text("data", "corpus TSV file or directory of TSV files", &RunConfig::data),
      text("embeddings", "word vectors (word v1 ... vd per line) used to match topics to targets",
           &RunConfig::embeddings),
      text("out", "run directory", &RunConfig::out),
      text("protocol", "cross_target or in_target", &RunConfig::protocol),
      typed<std::size_t>("folds", "number of in-target folds", [](RunConfig& c) -> std::size_t& { return c.folds; }),
      typed<std::size_t>("fold", "in-target fold to train", [](RunConfig& c) -> std::size_t& { return c.fold; }),
      text("target", "held-out target for cross-target training", &RunConfig::target),
      typed<std::uint64_t>("seed", "run seed", [](RunConfig& c) -> std::uint64_t& { return c.team.schedule.seed; }),
      typed<std::size_t>("vocab_size", "topic-model vocabulary size",
                 [](RunConfig& c) -> std::size_t& { return c.team.ntm_vocab_size; }),
      typed<std::size_t>("num_topics", "number of latent topics", [](RunConfig& c) -> std::size_t& { return c.team.num_topics; }),
      typed<std::size_t>("latent_dim", "topic-model latent width", [](RunConfig& c) -> std::size_t& { return c.team.latent_dim; }),
      typed<std::size_t>("ntm_hidden_dim", "topic-model encoder width",
                 [](RunConfig& c) -> std::size_t& { return c.team.ntm_hidden_dim; }),
      typed<std::size_t>("kl_warmup_epochs", "epochs of linear KL warm-up",
                 [](RunConfig& c) -> std::size_t& { return c.team.kl_warmup_epochs; }),
      typed<double>("ntm_lr", "topic-model learning rate (Adam)",
                 [](RunConfig& c) -> double& { return c.team.ntm_learning_rate; }),
      typed<std::size_t>("encoder_vocab_size", "encoder vocabulary size",
                 [](RunConfig& c) -> std::size_t& { return c.team.encoder_vocab_size; }),
      typed<std::size_t>("embed_dim", "word embedding width", [](RunConfig& c) -> std::size_t& { return c.team.embed_dim; }),
      typed<std::size_t>("hidden_dim", "sentence representation width",
                 [](RunConfig& c) -> std::size_t& { return c.team.hidden_dim; }),
      typed<std::size_t>("max_len", "encoder input length limit", [](RunConfig& c) -> std::size_t& { return c.team.max_len; }),
      typed<double>("classifier_lr", "classifier learning rate (AdamW)",
                 [](RunConfig& c) -> double& { return c.team.classifier_learning_rate; }),
      typed<std::size_t>("topic_terms", "key terms kept per topic", [](RunConfig& c) -> std::size_t& { return c.team.topic_terms; }),
      typed<double>("topic_ratio", "fraction of terms used to score a topic",
                 [](RunConfig& c) -> double& { return c.team.topic_ratio; }),
      typed<double>("gamma", "mutual-learning weight", [](RunConfig& c) -> double& { return c.team.mutual.gamma; }),
      typed<bool>("mutual", "enable mutual learning", [](RunConfig& c) -> bool& { return c.team.mutual_enabled; }),
      typed<bool>("use_topics", "feed extracted topics to the encoder",
                 [](RunConfig& c) -> bool& { return c.team.use_topics; }),
      typed<std::size_t>("iterations", "alternating iterations",
                 [](RunConfig& c) -> std::size_t& { return c.team.schedule.max_iterations; }),
      typed<std::size_t>("ntm_epochs", "topic-model epochs per iteration",
                 [](RunConfig& c) -> std::size_t& { return c.team.schedule.ntm_epochs_per_iteration; }),
      typed<std::size_t>("classifier_epochs", "classifier epochs per iteration",
                 [](RunConfig& c) -> std::size_t& { return c.team.schedule.classifier_epochs_per_iteration; }),
      typed<std::size_t>("batch_size", "mini-batch size", [](RunConfig& c) -> std::size_t& { return c.team.schedule.batch_size; }),
      typed<std::size_t>("patience", "iterations without validation gain before stopping (0 = never)",
                 [](RunConfig& c) -> std::size_t& { return c.team.schedule.patience; }),
  };
  return fields;
}

inline const detail::Field& config_field(const std::string& key) {
  for (const auto& f : config_fields())
    if (f.key == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

inline void set_value(RunConfig& c, const std::string& key, const std::string& value) {
  config_field(key).set(c, value);
}

inline std::string get_value(const RunConfig& c, const std::string& key) { return config_field(key).get(c); }

/// Applies "key = value" lines; '#' starts a comment.
inline void apply_config_text(RunConfig& c, std::istream& is, const std::string& source = "<config>") {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = corpus::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set_value(c, corpus::trim(t.substr(0, eq)), corpus::trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void apply_config_file(RunConfig& c, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  apply_config_text(c, is, path.string());
}

inline void write_config(std::ostream& os, const RunConfig& c) {
  for (const auto& f : config_fields()) os << f.key << " = " << f.get(c) << '\n';
}

inline std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

}  // namespace team::cli

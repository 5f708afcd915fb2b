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

// team: prepare corpora, train, extract topics, evaluate and score coherence.

#include "team/cli/run_config.hpp"
#include "team/corpus/splits.hpp"
#include "team/corpus/tsv.hpp"
#include "team/eval/coherence.hpp"
#include "team/eval/protocols.hpp"
#include "team/mutual/mutual.hpp"
#include "team/nn/checkpoint.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace team;
using cli::RunConfig;
using json = nlohmann::ordered_json;

namespace {

std::string sha256_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string data = buf.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed for " + p.string());
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

/// Collects outputs of one command and writes config.txt and manifest.json.
class Run {
 public:
  Run(std::string command, const RunConfig& config) : command_(std::move(command)), config_(config), dir_(config.out) {
    fs::create_directories(dir_);
    auto os = open_out(dir_ / "config.txt");
    cli::write_config(os, config_);
    outputs_.push_back("config.txt");
  }

  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }

  json& info() { return info_; }

  void finish() {
    json m;
    m["command"] = command_;
    m["config"] = "config.txt";
    m["info"] = info_;
    json files = json::array();
    std::sort(outputs_.begin(), outputs_.end());
    outputs_.erase(std::unique(outputs_.begin(), outputs_.end()), outputs_.end());
    for (const auto& name : outputs_)
      files.push_back({{"path", name}, {"bytes", fs::file_size(dir_ / name)}, {"sha256", sha256_file(dir_ / name)}});
    m["files"] = files;
    auto os = open_out(dir_ / "manifest.json");
    os << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  RunConfig config_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  json info_ = json::object();
};

std::vector<corpus::RawRecord> load_records(const RunConfig& c, json* info = nullptr) {
  if (c.data.empty()) throw std::runtime_error("no corpus given (--data)");
  auto loaded = corpus::load_corpus(c.data);
  if (loaded.records.empty()) throw std::runtime_error("corpus " + c.data + " has no usable rows");
  if (info) {
    (*info)["rejected_annotation"] = loaded.rejected_annotation;
    (*info)["rejected_empty"] = loaded.rejected_empty;
  }
  return std::move(loaded.records);
}

std::shared_ptr<const topics::EmbeddingTable> load_embeddings(const RunConfig& c) {
  if (c.embeddings.empty()) return nullptr;
  return std::make_shared<const topics::EmbeddingTable>(topics::EmbeddingTable::load(c.embeddings));
}

std::string slug(const corpus::TargetId& t) {
  std::string s = t.str();
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

std::string joined(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) s += (i ? " " : "") + tokens[i];
  return s;
}

json stats_json(const corpus::CorpusStats& s) {
  json j;
  j["examples"] = s.total;
  for (auto l : corpus::kAllLabels) j["labels"][std::string(corpus::to_string(l))] = s.per_label[corpus::index_of(l)];
  for (const auto& [t, n] : s.per_target) {
    json row;
    row["total"] = n;
    for (auto l : corpus::kAllLabels)
      row[std::string(corpus::to_string(l))] = s.per_target_label.at(t)[corpus::index_of(l)];
    j["targets"][t.str()] = row;
  }
  return j;
}

void cmd_prepare(const RunConfig& c) {
  Run run("prepare", c);
  auto records = load_records(c, &run.info());
  const auto stats = corpus::corpus_stats(records);
  run.info()["corpus"] = stats_json(stats);

  const auto ntm_vocab = corpus::build_vocabulary(records, c.team.ntm_vocab_size);
  ntm_vocab.save(run.path("vocab_ntm.txt"));
  corpus::build_encoder_vocabulary(records, c.team.encoder_vocab_size).save(run.path("vocab_encoder.txt"));

  {
    auto os = open_out(run.path("bow.tsv"));
    os << "line\ttarget\tlabel\tbow\n";
    for (const auto& r : records) {
      const auto ex = corpus::to_example(r);
      os << r.line << '\t' << r.target.str() << '\t' << corpus::to_string(ex.label) << '\t';
      const auto bow = corpus::vectorize(corpus::ntm_filter(ex.tokens), ntm_vocab);
      for (std::size_t i = 0; i < bow.entries.size(); ++i)
        os << (i ? " " : "") << bow.entries[i].first << ':' << bow.entries[i].second;
      os << '\n';
    }
  }
  {
    auto os = open_out(run.path("stats.tsv"));
    os << "target\ttotal\tsupport\toppose\tnone\n";
    for (const auto& [t, n] : stats.per_target) {
      const auto& pl = stats.per_target_label.at(t);
      os << t.str() << '\t' << n << '\t' << pl[0] << '\t' << pl[1] << '\t' << pl[2] << '\n';
    }
    os << "all\t" << stats.total << '\t' << stats.per_label[0] << '\t' << stats.per_label[1] << '\t'
       << stats.per_label[2] << '\n';
  }
  const auto examples = corpus::to_examples(records);
  if (examples.size() >= c.folds) {
    const auto folds = corpus::make_in_target_folds(examples, c.folds, c.team.schedule.seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      auto os = open_out(run.path("splits/in_target_fold" + std::to_string(f) + ".tsv"));
      corpus::write_split(os, folds[f]);
    }
  }
  for (const auto& t : corpus::targets_of(records)) {
    auto split = corpus::make_cross_target_split(records, t);
    corpus::assert_no_leakage(split);
    auto os = open_out(run.path("splits/cross_target_" + slug(t) + ".tsv"));
    corpus::write_split(os, split);
  }
  run.finish();
  std::cout << "prepared " << stats.total << " examples across " << stats.per_target.size()
            << " targets in " << c.out << '\n';
}

corpus::DatasetSplit split_for(const RunConfig& c, const std::vector<corpus::RawRecord>& records) {
  if (c.protocol == "in_target") {
    auto folds = corpus::make_in_target_folds(corpus::to_examples(records), c.folds, c.team.schedule.seed);
    if (c.fold >= folds.size())
      throw std::runtime_error("fold " + std::to_string(c.fold) + " out of range for " +
                               std::to_string(c.folds) + " folds");
    return folds[c.fold];
  }
  if (c.protocol == "cross_target") {
    if (c.target.empty()) throw std::runtime_error("cross_target training needs --target");
    auto split = corpus::make_cross_target_split(records, corpus::TargetId(c.target));
    corpus::assert_no_leakage(split);
    return split;
  }
  throw std::runtime_error("unknown protocol '" + c.protocol + "' (expected in_target or cross_target)");
}

std::vector<corpus::TargetId> targets_in(const corpus::DatasetSplit& s) {
  std::vector<corpus::TargetId> out;
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (const auto& ex : *part)
      if (std::find(out.begin(), out.end(), ex.target) == out.end()) out.push_back(ex.target);
  return out;
}

void write_topic_outputs(Run& run, mutual::TeamModel& model, const std::vector<corpus::TargetId>& targets) {
  model.refresh_topics(targets);
  std::vector<topics::TopicReportRow> rows;
  for (const auto& t : targets) rows.push_back({t.str(), model.topics_for(t)});
  auto os = open_out(run.path("topics.tsv"));
  topics::write_topic_report(os, rows);
  ntm::export_topic_word_tsv(run.path("topic_word.tsv"), model.ntm(), model.ntm_vocab());
}

void cmd_train(const RunConfig& c) {
  Run run("train", c);
  auto records = load_records(c, &run.info());
  const auto split = split_for(c, records);
  if (split.train.empty()) throw std::runtime_error("training slice is empty");
  const auto targets = targets_in(split);
  auto model = mutual::TeamModel::from_examples(c.team, split.train, targets);
  if (auto e = load_embeddings(c)) model.use_embeddings(e);
  const auto result = mutual::train_alternating(model, split.train, split.val);

  model.ntm_vocab().save(run.path("vocab_ntm.txt"));
  model.encoder_vocab().save(run.path("vocab_encoder.txt"));
  nn::save_checkpoint(run.path("checkpoint.txt"), model.checkpoint());
  {
    auto os = open_out(run.path("history.csv"));
    mutual::write_history_csv(os, result.history);
  }
  write_topic_outputs(run, model, targets);

  run.info()["train_examples"] = split.train.size();
  run.info()["val_examples"] = split.val.size();
  run.info()["test_examples"] = split.test.size();
  run.info()["iterations_run"] = result.iterations_run;
  run.info()["best_iteration"] = result.best_iteration;
  if (result.best_val_macro_f1) run.info()["best_val_macro_f1"] = *result.best_val_macro_f1;

  if (!split.test.empty()) {
    const auto preds = model.predict(split.test);
    std::vector<encoder::PredictionRow> rows;
    std::vector<corpus::Label> gold, pred;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      rows.push_back({split.test[i].target.str(), joined(split.test[i].tokens), split.test[i].label, preds[i]});
      gold.push_back(split.test[i].label);
      pred.push_back(preds[i].predicted);
    }
    auto ps = open_out(run.path("predictions.tsv"));
    encoder::write_predictions(ps, rows);
    const auto report = eval::metric_report(eval::confusion(gold, pred));
    auto ms = open_out(run.path("test_metrics.csv"));
    eval::write_report_header(ms);
    eval::write_report_row(ms, "test", report);
    run.info()["test_macro_f1"] = report.macro_f1;
    std::cout << "test macro F1 " << report.macro_f1 << '\n';
  }
  run.finish();
}

void cmd_extract_topics(const RunConfig& c, const std::string& model_dir) {
  Run run("extract-topics", c);
  RunConfig trained;
  cli::apply_config_file(trained, fs::path(model_dir) / "config.txt");
  mutual::TeamConfig tc = trained.team;
  tc.topic_terms = c.team.topic_terms;
  tc.topic_ratio = c.team.topic_ratio;
  tc.use_topics = true;
  auto ntm_vocab = corpus::Vocabulary::load(fs::path(model_dir) / "vocab_ntm.txt");
  auto enc_vocab = corpus::Vocabulary::load(fs::path(model_dir) / "vocab_encoder.txt");
  const auto V = static_cast<Eigen::Index>(ntm_vocab.size());
  mutual::TeamModel model(tc, std::move(ntm_vocab), std::move(enc_vocab), nn::Vector::Zero(V));
  model.restore(nn::load_checkpoint(fs::path(model_dir) / "checkpoint.txt"));
  const RunConfig& vectors = c.embeddings.empty() ? trained : c;
  if (auto e = load_embeddings(vectors)) model.use_embeddings(e);

  std::vector<corpus::RawRecord> records;
  if (!c.data.empty()) records = load_records(c, &run.info());
  std::vector<corpus::TargetId> targets;
  if (!c.target.empty())
    targets.emplace_back(c.target);
  else
    targets = corpus::targets_of(records);
  if (targets.empty()) throw std::runtime_error("extract-topics needs --target or --data");
  write_topic_outputs(run, model, targets);

  if (!records.empty()) {
    auto os = open_out(run.path("doc_topics.tsv"));
    os << "line\ttarget";
    for (std::size_t k = 0; k < tc.num_topics; ++k) os << "\tz" << k;
    os << '\n';
    os.precision(9);
    for (const auto& r : records) {
      const auto z = model.ntm().posterior_topics(model.bow(corpus::to_example(r))).z;
      os << r.line << '\t' << r.target.str();
      for (Eigen::Index k = 0; k < z.size(); ++k) os << '\t' << z(k);
      os << '\n';
    }
  }
  run.finish();
}

void cmd_evaluate(const RunConfig& c, bool oracle, bool majority) {
  Run run("evaluate", c);
  auto records = load_records(c, &run.info());
  eval::TrainAndPredict model = oracle     ? eval::oracle_predictor()
                                : majority ? eval::majority_predictor()
                                           : mutual::team_trainer(c.team, load_embeddings(c));
  eval::ProtocolReport report;
  if (c.protocol == "in_target") {
    report = eval::run_in_target(corpus::to_examples(records), model, c.folds, c.team.schedule.seed);
  } else if (c.protocol == "cross_target") {
    std::vector<corpus::TargetId> targets;
    if (!c.target.empty()) targets.emplace_back(c.target);
    report = eval::run_cross_target(records, model, targets, c.team.schedule.seed);
  } else {
    throw std::runtime_error("unknown protocol '" + c.protocol + "' (expected in_target or cross_target)");
  }
  auto os = open_out(run.path("metrics.csv"));
  eval::write_protocol_csv(os, report);
  run.info()["predictor"] = oracle ? "oracle" : majority ? "majority" : "team";
  run.info()["runs"] = report.runs.size();
  run.info()["mean_macro_f1"] = report.mean.macro_f1;
  run.finish();
  std::cout << c.protocol << " mean macro F1 " << report.mean.macro_f1 << " over " << report.runs.size()
            << " runs\n";
}

void cmd_coherence(const RunConfig& c, const std::string& topic_file, std::size_t top_n, std::size_t window) {
  Run run("coherence", c);
  const auto topics = eval::read_topic_word_tsv(topic_file, top_n);
  auto records = load_records(c, &run.info());
  std::vector<std::vector<std::string>> docs;
  for (const auto& r : records) docs.push_back(corpus::ntm_filter(corpus::to_example(r).tokens));
  std::vector<std::size_t> cutoffs;
  for (auto k : eval::default_cutoffs())
    if (k <= top_n) cutoffs.push_back(k);
  const auto report = eval::coherence_report(topics, docs, cutoffs, window);
  auto os = open_out(run.path("coherence.csv"));
  eval::write_coherence_csv(os, report);
  run.info()["topics"] = topics.size();
  run.info()["reference_documents"] = docs.size();
  run.finish();
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

/// Registers one flag per config key on `sub`; values land in `given`.
void add_config_flags(CLI::App* sub, std::map<std::string, std::string>& given) {
  for (const auto& f : cli::config_fields()) sub->add_option(flag_name(f.key), given[f.key], f.help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-enhanced argument mining"};
  app.require_subcommand(1);
  std::string config_file;
  std::map<std::string, std::string> given;
  bool no_topics = false, no_mutual = false, oracle = false, majority = false;
  std::string model_dir, topic_file;
  std::size_t top_n = 20, window = eval::kNpmiWindow;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    add_config_flags(sub, given);
  };
  auto* prepare = app.add_subcommand("prepare", "load a corpus; write vocabularies, BoW cache and splits");
  common(prepare);
  auto* train = app.add_subcommand("train", "train one fold or one held-out target");
  common(train);
  train->add_flag("--no-topics", no_topics, "train without extracted topics");
  train->add_flag("--no-mutual", no_mutual, "disable mutual learning");
  auto* extract = app.add_subcommand("extract-topics", "extract target topics from a trained run");
  common(extract);
  extract->add_option("--model", model_dir, "directory of a train run")->required()->check(CLI::ExistingDirectory);
  auto* evaluate = app.add_subcommand("evaluate", "run the in-target or cross-target protocol");
  common(evaluate);
  evaluate->add_flag("--no-topics", no_topics, "train without extracted topics");
  evaluate->add_flag("--no-mutual", no_mutual, "disable mutual learning");
  evaluate->add_flag("--oracle", oracle, "predict gold labels (harness self-test)");
  evaluate->add_flag("--majority", majority, "predict the majority training label");
  auto* coherence = app.add_subcommand("coherence", "NPMI coherence of exported topics");
  common(coherence);
  coherence->add_option("--topic-file", topic_file, "topic<TAB>word<TAB>weight file")->required()->check(CLI::ExistingFile);
  coherence->add_option("--top-n", top_n, "words per topic")->check(CLI::Range(2, 1000));
  coherence->add_option("--window", window, "sliding window size")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (!config_file.empty()) cli::apply_config_file(config, config_file);
    auto* sub = app.get_subcommands().front();
    for (const auto& f : cli::config_fields())
      if (sub->count(flag_name(f.key)) > 0) cli::set_value(config, f.key, given[f.key]);
    if (no_topics) config.team.use_topics = false;
    if (no_mutual) config.team.mutual_enabled = false;

    if (sub == prepare) cmd_prepare(config);
    else if (sub == train) cmd_train(config);
    else if (sub == extract) cmd_extract_topics(config, model_dir);
    else if (sub == evaluate) cmd_evaluate(config, oracle, majority);
    else if (sub == coherence) cmd_coherence(config, topic_file, top_n, window);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

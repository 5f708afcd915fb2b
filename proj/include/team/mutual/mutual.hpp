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

// Topic-argument mutual learning.
//
// The classifier's representation h is projected to a topic distribution u
// and compared with the topic model's z through a harmonic mean of the two
// directed KL divergences:
//
//   A = KL(u || z),  B = KL(z || u),  O = 1 / (1 + A B / (A + B))   (O = 1 when A + B = 0)
//
// Both models minimise gamma * mean(1 - O) on top of their own loss. Training
// alternates: the topic model runs against fixed u, then topics are
// re-extracted and the classifier runs against fixed z.

#include "team/corpus/splits.hpp"
#include "team/corpus/tokenizer.hpp"
#include "team/corpus/types.hpp"
#include "team/corpus/vocabulary.hpp"
#include "team/encoder/encoder.hpp"
#include "team/eval/metrics.hpp"
#include "team/eval/protocols.hpp"
#include "team/nn/autograd.hpp"
#include "team/nn/checkpoint.hpp"
#include "team/nn/functional.hpp"
#include "team/nn/mlp.hpp"
#include "team/nn/optimizer.hpp"
#include "team/ntm/ntm.hpp"
#include "team/topics/topics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace team::mutual {

using nn::Matrix;
using nn::Var;
using nn::Vector;

struct MutualLossConfig {
  double gamma = 0.1;
  double epsilon = nn::kProbFloor;
};

/// u = softmax(W h + b).
class ProjectionHead {
 public:
  static constexpr const char* kPrefix = "proj";

  ProjectionHead(std::size_t hidden_dim, std::size_t num_topics, std::uint64_t seed)
      : spec_(nn::MlpSpec::affine(static_cast<Eigen::Index>(hidden_dim),
                                  static_cast<Eigen::Index>(num_topics), nn::OutputActivation::softmax)) {
    nn::Rng rng(seed);
    nn::init_mlp(params_, kPrefix, spec_, rng);
  }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  Var project(nn::Tape& tape, Var h) { return nn::mlp_forward(tape, spec_, params_, kPrefix, h); }

  Vector project(const Vector& h) {
    return nn::mlp_forward(spec_, params_, kPrefix, Matrix(h.transpose())).row(0).transpose();
  }

 private:
  nn::MlpSpec spec_;
  nn::ParameterSet params_;
};

inline double similarity_O(std::span<const double> u, std::span<const double> z,
                           double eps = nn::kProbFloor) {
  if (u.size() != z.size())
    throw nn::ShapeError("similarity_O: lengths " + std::to_string(u.size()) + " and " +
                         std::to_string(z.size()));
  const double a = nn::kl_categorical(u, z, eps), b = nn::kl_categorical(z, u, eps);
  const double s = a + b;
  return s > 0.0 ? 1.0 / (1.0 + a * b / s) : 1.0;
}

/// Sum over pairs of (1 - O); zero when every pair matches.
inline double mutual_loss(const std::vector<std::pair<Vector, Vector>>& pairs,
                          const MutualLossConfig& config = {}) {
  double s = 0.0;
  for (const auto& [u, z] : pairs) s += 1.0 - similarity_O(nn::as_span(u), nn::as_span(z), config.epsilon);
  return s;
}

inline double loss_topic_side(double elbo_total, double l_m, double gamma) { return gamma * l_m + elbo_total; }
inline double loss_classifier_side(double ce, double l_m, double gamma) { return gamma * l_m + ce; }

/// Differentiable mean over rows of (1 - O(u_r, z_r)), 1 x 1.
inline Var mutual_term(Var u, Var z, double eps = nn::kProbFloor) {
  Var o = nn::harmonic_similarity(nn::kl_rows(u, z, eps), nn::kl_rows(z, u, eps));
  return nn::mean(nn::affine(o, -1.0, 1.0));
}

struct TrainSchedule {
  std::size_t max_iterations = 20;
  std::size_t ntm_epochs_per_iteration = 1;
  std::size_t classifier_epochs_per_iteration = 1;
  std::size_t batch_size = 16;
  std::size_t patience = 5;  // iterations without validation gain; 0 disables early stopping
  std::uint64_t seed = 0;
};

struct TeamConfig {
  // topic model
  std::size_t ntm_vocab_size = 4888;
  std::size_t num_topics = 10;
  std::size_t latent_dim = 64;
  std::size_t ntm_hidden_dim = 256;
  std::size_t kl_warmup_epochs = 10;
  double ntm_learning_rate = 2e-3;
  // encoder and classifier
  std::size_t encoder_vocab_size = 50000;
  std::size_t embed_dim = 100;
  std::size_t hidden_dim = 128;
  std::size_t max_len = 128;
  double classifier_learning_rate = 2e-5;
  // topic extraction
  std::size_t topic_terms = 10;
  double topic_ratio = 0.5;
  // mutual learning and ablations
  MutualLossConfig mutual;
  bool mutual_enabled = true;
  bool use_topics = true;
  TrainSchedule schedule;
};

/// splitmix64 finaliser; derives per-component seeds from one run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace salt {
inline constexpr std::uint64_t ntm_init = 1, encoder_init = 2, projection_init = 3, ntm_data = 4,
                               classifier_data = 5;
}

inline std::vector<std::string> target_tokens(const corpus::TargetId& t) {
  return corpus::tokenize(t.str(), corpus::TokenizeMode::encoder);
}

/// Topic model, encoder, projection head and their vocabularies.
class TeamModel {
 public:
  TeamModel(TeamConfig config, corpus::Vocabulary ntm_vocab, corpus::Vocabulary encoder_vocab,
            const Vector& log_freq)
      : config_(std::move(config)),
        ntm_vocab_(std::move(ntm_vocab)),
        encoder_vocab_(std::move(encoder_vocab)),
        ntm_(ntm_config(), log_freq, derive_seed(config_.schedule.seed, salt::ntm_init)),
        encoder_(encoder_config(), derive_seed(config_.schedule.seed, salt::encoder_init)),
        head_(config_.hidden_dim, config_.num_topics,
              derive_seed(config_.schedule.seed, salt::projection_init)),
        ntm_opt_({nn::OptimizerKind::adam, config_.ntm_learning_rate}),
        classifier_opt_({nn::OptimizerKind::adamw, config_.classifier_learning_rate}),
        head_opt_({nn::OptimizerKind::adamw, config_.classifier_learning_rate}) {}

  /// Builds vocabularies from the training examples. `extra_targets` lists
  /// targets whose names must be representable at prediction time.
  static TeamModel from_examples(const TeamConfig& config,
                                 const std::vector<corpus::ArgumentExample>& train,
                                 const std::vector<corpus::TargetId>& extra_targets = {}) {
    if (train.empty()) throw std::invalid_argument("TeamModel: no training examples");
    std::vector<std::vector<std::string>> ntm_docs, enc_docs;
    for (const auto& ex : train) {
      ntm_docs.push_back(corpus::ntm_filter(ex.tokens));
      enc_docs.push_back(ex.tokens);
      enc_docs.push_back(target_tokens(ex.target));
    }
    for (const auto& t : extra_targets) enc_docs.push_back(target_tokens(t));
    auto ntm_vocab = corpus::build_vocabulary_from_docs(ntm_docs, config.ntm_vocab_size);
    if (ntm_vocab.size() == 0) throw std::invalid_argument("TeamModel: empty topic-model vocabulary");
    auto enc_vocab = corpus::build_vocabulary_from_docs(
        enc_docs, config.encoder_vocab_size,
        {corpus::special::pad, corpus::special::unk, corpus::special::cls, corpus::special::sep});
    std::vector<corpus::BowVector> bows;
    for (const auto& d : ntm_docs) bows.push_back(corpus::vectorize(d, ntm_vocab));
    return TeamModel(config, std::move(ntm_vocab), std::move(enc_vocab), ntm::compute_log_freq(bows));
  }

  const TeamConfig& config() const { return config_; }
  TeamConfig& mutable_config() { return config_; }
  const corpus::Vocabulary& ntm_vocab() const { return ntm_vocab_; }
  const corpus::Vocabulary& encoder_vocab() const { return encoder_vocab_; }
  ntm::NeuralTopicModel& ntm() { return ntm_; }
  encoder::ArgumentEncoder& encoder() { return encoder_; }
  ProjectionHead& head() { return head_; }
  nn::Optimizer& ntm_optimizer() { return ntm_opt_; }
  nn::Optimizer& classifier_optimizer() { return classifier_opt_; }
  nn::Optimizer& head_optimizer() { return head_opt_; }

  corpus::BowVector bow(const corpus::ArgumentExample& ex) const {
    return corpus::vectorize(corpus::ntm_filter(ex.tokens), ntm_vocab_);
  }

  /// Word vectors used to score topics against targets; by default the
  /// encoder's own (row-normalised) embedding table.
  void use_embeddings(std::shared_ptr<const topics::EmbeddingTable> table) {
    external_ = std::move(table);
    topic_cache_.clear();
  }

  /// Re-extracts topics for `targets` from the current topic-word matrix.
  void refresh_topics(const std::vector<corpus::TargetId>& targets) {
    topic_cache_.clear();
    table_.reset();
    topics_ready_ = true;
    for (const auto& t : targets) topics_for(t);
  }

  /// Extracted topic for a target; empty before the first extraction or when
  /// topics are disabled.
  const topics::ExtractedTopics& topics_for(const corpus::TargetId& t) {
    static const topics::ExtractedTopics none;
    if (!config_.use_topics || !topics_ready_) return none;
    auto it = topic_cache_.find(t);
    if (it != topic_cache_.end()) return it->second;
    return topic_cache_.emplace(t, extract(t)).first->second;
  }

  encoder::EncoderInput input_for(const corpus::ArgumentExample& ex) {
    return encoder::build_input(ex.tokens, target_tokens(ex.target), topics_for(ex.target).words,
                                encoder_vocab_, config_.max_len);
  }

  std::vector<encoder::EncoderInput> inputs_for(const std::vector<corpus::ArgumentExample>& xs) {
    std::vector<encoder::EncoderInput> out;
    out.reserve(xs.size());
    for (const auto& ex : xs) out.push_back(input_for(ex));
    return out;
  }

  std::vector<encoder::ClassPrediction> predict(const std::vector<corpus::ArgumentExample>& xs,
                                                std::size_t batch = 256) {
    auto inputs = inputs_for(xs);
    std::vector<encoder::ClassPrediction> out;
    std::vector<const encoder::EncoderInput*> ptrs;
    for (std::size_t s = 0; s < inputs.size(); s += batch) {
      ptrs.clear();
      for (std::size_t i = s; i < std::min(inputs.size(), s + batch); ++i) ptrs.push_back(&inputs[i]);
      auto p = encoder_.predict(ptrs);
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }

  std::vector<corpus::Label> predict_labels(const std::vector<corpus::ArgumentExample>& xs) {
    std::vector<corpus::Label> out;
    for (const auto& p : predict(xs)) out.push_back(p.predicted);
    return out;
  }

  /// u for every input, from the current encoder and head.
  Matrix project_all(const std::vector<encoder::EncoderInput>& inputs, std::size_t batch = 256) {
    Matrix u(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(config_.num_topics));
    std::vector<const encoder::EncoderInput*> ptrs;
    for (std::size_t s = 0; s < inputs.size(); s += batch) {
      ptrs.clear();
      for (std::size_t i = s; i < std::min(inputs.size(), s + batch); ++i) ptrs.push_back(&inputs[i]);
      nn::Tape tape;
      u.middleRows(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(ptrs.size())) =
          tape.value(head_.project(tape, encoder_.encode(tape, ptrs)));
    }
    return u;
  }

  /// Posterior-mean z for every document.
  Matrix posterior_all(const std::vector<corpus::BowVector>& bows) {
    Matrix z(static_cast<Eigen::Index>(bows.size()), static_cast<Eigen::Index>(config_.num_topics));
    for (std::size_t i = 0; i < bows.size(); ++i)
      z.row(static_cast<Eigen::Index>(i)) = ntm_.posterior_topics(bows[i]).z.transpose();
    return z;
  }

  nn::Checkpoint checkpoint() const {
    nn::Checkpoint ck;
    ck.add_params("", ntm_.params());
    ck.add_params("", encoder_.params());
    ck.add_params("", head_.params());
    return ck;
  }

  void restore(const nn::Checkpoint& ck) {
    ck.restore_params("", ntm_.params());
    ck.restore_params("", encoder_.params());
    ck.restore_params("", head_.params());
    topic_cache_.clear();
    table_.reset();
  }

  struct Snapshot {
    nn::ParameterSet ntm, encoder, head;
    std::map<corpus::TargetId, topics::ExtractedTopics> topics;
    bool topics_ready = false;
  };
  Snapshot snapshot() const {
    return {ntm_.params(), encoder_.params(), head_.params(), topic_cache_, topics_ready_};
  }
  void restore(const Snapshot& s) {
    ntm_.params() = s.ntm;
    encoder_.params() = s.encoder;
    head_.params() = s.head;
    topic_cache_ = s.topics;
    table_.reset();
    topics_ready_ = s.topics_ready;
  }

 private:
  ntm::NtmConfig ntm_config() const {
    ntm::NtmConfig c;
    c.vocab_size = ntm_vocab_.size();
    c.num_topics = config_.num_topics;
    c.latent_dim = config_.latent_dim;
    c.hidden_dim = config_.ntm_hidden_dim;
    c.kl_warmup_epochs = config_.kl_warmup_epochs;
    return c;
  }

  encoder::EncoderConfig encoder_config() const {
    encoder::EncoderConfig c;
    c.vocab_size = encoder_vocab_.size();
    c.embed_dim = config_.embed_dim;
    c.hidden_dim = config_.hidden_dim;
    return c;
  }

  topics::ExtractedTopics extract(const corpus::TargetId& t) {
    const auto tokens = target_tokens(t);
    auto mask = topics::build_target_mask(tokens, ntm_vocab_, config_.num_topics);
    std::size_t open = 0;
    for (Eigen::Index i = 0; i < mask.mask.cols(); ++i) open += mask.mask(0, i) != 0.0;
    const std::size_t n = std::min(config_.topic_terms, open);
    if (n == 0) return {};
    auto lists = topics::filter_topics(ntm_.topic_word(), mask, n);
    if (!external_ && !table_) table_ = encoder_.embedding_table(encoder_vocab_);
    const topics::EmbeddingTable& table = external_ ? *external_ : *table_;
    bool known = false;
    for (const auto& w : tokens) known = known || table.contains(w);
    if (!known) return {};
    return topics::extract_topics(lists, ntm_vocab_, table, tokens, config_.topic_ratio);
  }

  TeamConfig config_;
  corpus::Vocabulary ntm_vocab_;
  corpus::Vocabulary encoder_vocab_;
  ntm::NeuralTopicModel ntm_;
  encoder::ArgumentEncoder encoder_;
  ProjectionHead head_;
  nn::Optimizer ntm_opt_;
  nn::Optimizer classifier_opt_;
  nn::Optimizer head_opt_;
  std::map<corpus::TargetId, topics::ExtractedTopics> topic_cache_;
  std::optional<topics::EmbeddingTable> table_;  // encoder embeddings as of the last refresh
  std::shared_ptr<const topics::EmbeddingTable> external_;
  bool topics_ready_ = false;
};

struct HistoryRow {
  std::size_t iteration = 0;
  std::string phase;  // "ntm" or "classifier"
  std::size_t epoch = 0;
  std::optional<double> elbo, kl, mutual, cross_entropy, val_macro_f1;
};

inline void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
  const auto old = os.precision(17);
  os << "iteration,phase,epoch,elbo,kl,mutual,cross_entropy,val_macro_f1\n";
  auto cell = [&](const std::optional<double>& v) {
    os << ',';
    if (v) os << *v;
  };
  for (const auto& r : rows) {
    os << r.iteration << ',' << r.phase << ',' << r.epoch;
    cell(r.elbo);
    cell(r.kl);
    cell(r.mutual);
    cell(r.cross_entropy);
    cell(r.val_macro_f1);
    os << '\n';
  }
  os.precision(old);
}

struct TrainResult {
  std::vector<HistoryRow> history;
  std::size_t iterations_run = 0;
  std::size_t best_iteration = 0;
  std::optional<double> best_val_macro_f1;
};

/// Alternating training. Each iteration runs the topic-model phase against
/// fixed u, takes posterior-mean z for every training argument, re-extracts
/// topics, then runs the classifier phase against fixed z. With validation
/// data the best iteration by macro F1 is restored at the end.
inline TrainResult train_alternating(TeamModel& model,
                                     const std::vector<corpus::ArgumentExample>& train,
                                     const std::vector<corpus::ArgumentExample>& val = {}) {
  const TeamConfig& cfg = model.config();
  const TrainSchedule& sch = cfg.schedule;
  if (sch.max_iterations < 1) throw std::invalid_argument("train_alternating: I must be >= 1");
  if (sch.ntm_epochs_per_iteration < 1 || sch.classifier_epochs_per_iteration < 1)
    throw std::invalid_argument("train_alternating: epochs per phase must be >= 1");
  if (train.empty()) throw std::invalid_argument("train_alternating: no training examples");

  const bool ml = cfg.mutual_enabled;
  const double gamma = cfg.mutual.gamma, eps = cfg.mutual.epsilon;
  std::vector<corpus::BowVector> bows;
  std::vector<corpus::Label> labels;
  std::vector<corpus::TargetId> targets;
  for (const auto& ex : train) {
    bows.push_back(model.bow(ex));
    labels.push_back(ex.label);
  }
  for (const auto* part : {&train, &val})
    for (const auto& ex : *part)
      if (std::find(targets.begin(), targets.end(), ex.target) == targets.end()) targets.push_back(ex.target);
  std::vector<corpus::Label> val_gold;
  for (const auto& ex : val) val_gold.push_back(ex.label);

  nn::Rng ntm_rng(derive_seed(sch.seed, salt::ntm_data));
  nn::Rng cls_rng(derive_seed(sch.seed, salt::classifier_data));

  TrainResult result;
  std::optional<TeamModel::Snapshot> best;
  std::size_t stale = 0, ntm_epochs_done = 0;

  for (std::size_t it = 1; it <= sch.max_iterations; ++it) {
    try {
      // (a) topic model against fixed u
      Matrix u;
      if (ml) u = model.project_all(model.inputs_for(train));
      for (std::size_t e = 1; e <= sch.ntm_epochs_per_iteration; ++e) {
        double raw = 0.0;
        ntm::ExtraLoss extra;
        if (ml)
          extra = [&](nn::Tape& tape, Var z, std::span<const std::size_t> idx) {
            Matrix ub(static_cast<Eigen::Index>(idx.size()), u.cols());
            for (std::size_t r = 0; r < idx.size(); ++r)
              ub.row(static_cast<Eigen::Index>(r)) = u.row(static_cast<Eigen::Index>(idx[r]));
            Var m = mutual_term(tape.constant(std::move(ub)), z, eps);
            raw += tape.item(m) * static_cast<double>(idx.size());
            return nn::scale(m, gamma);
          };
        auto st = ntm::train_ntm_epoch(model.ntm(), bows, model.ntm_optimizer(), sch.batch_size,
                                       ntm_rng,
                                       ntm::kl_warmup_weight(ntm_epochs_done++, cfg.kl_warmup_epochs),
                                       extra);
        if (!std::isfinite(st.objective)) throw std::runtime_error("non-finite topic-model loss");
        HistoryRow row{it, "ntm", e, st.neg_elbo, st.kl, std::nullopt, std::nullopt, std::nullopt};
        if (ml) row.mutual = raw / static_cast<double>(bows.size());
        result.history.push_back(row);
      }

      // (b) fixed z targets, (c) fresh topics
      Matrix z;
      if (ml) z = model.posterior_all(bows);
      model.refresh_topics(targets);
      const auto inputs = model.inputs_for(train);

      // (d) classifier against fixed z
      for (std::size_t e = 1; e <= sch.classifier_epochs_per_iteration; ++e) {
        double raw = 0.0;
        encoder::ExtraLoss extra;
        if (ml)
          extra = [&](nn::Tape& tape, Var h, std::span<const std::size_t> idx) {
            Matrix zb(static_cast<Eigen::Index>(idx.size()), z.cols());
            for (std::size_t r = 0; r < idx.size(); ++r)
              zb.row(static_cast<Eigen::Index>(r)) = z.row(static_cast<Eigen::Index>(idx[r]));
            Var m = mutual_term(model.head().project(tape, h), tape.constant(std::move(zb)), eps);
            raw += tape.item(m) * static_cast<double>(idx.size());
            return nn::scale(m, gamma);
          };
        // The head's gradients come from the same tape; it steps right after the encoder.
        std::function<void()> step_head;
        if (ml) {
          model.head().params().zero_grad();
          step_head = [&] {
            model.head_optimizer().step(model.head().params());
            model.head().params().zero_grad();
          };
        }
        auto st = encoder::train_classifier_epoch(model.encoder(), inputs, labels,
                                                  model.classifier_optimizer(), sch.batch_size,
                                                  cls_rng, extra, step_head);
        if (!std::isfinite(st.objective)) throw std::runtime_error("non-finite classifier loss");
        HistoryRow row{it, "classifier", e, std::nullopt, std::nullopt, std::nullopt, st.cross_entropy,
                       std::nullopt};
        if (ml) row.mutual = raw / static_cast<double>(inputs.size());
        result.history.push_back(row);
      }
    } catch (const nn::NonFiniteGradient& err) {
      throw std::runtime_error("iteration " + std::to_string(it) + ": " + err.what());
    } catch (const std::runtime_error& err) {
      const std::string what = err.what();
      if (what.rfind("iteration ", 0) == 0) throw;
      throw std::runtime_error("iteration " + std::to_string(it) + ": " + what);
    }
    result.iterations_run = it;

    if (val.empty()) {
      result.best_iteration = it;
      continue;
    }
    const double f1 = eval::macro_f1(val_gold, model.predict_labels(val));
    result.history.back().val_macro_f1 = f1;
    if (!result.best_val_macro_f1 || f1 > *result.best_val_macro_f1) {
      result.best_val_macro_f1 = f1;
      result.best_iteration = it;
      best = model.snapshot();
      stale = 0;
    } else if (sch.patience > 0 && ++stale >= sch.patience) {
      break;
    }
  }
  if (best) model.restore(*best);
  return result;
}

/// Protocol adapter: trains a fresh model on each split and predicts its test slice.
inline eval::TrainAndPredict team_trainer(TeamConfig config,
                                          std::shared_ptr<const topics::EmbeddingTable> embeddings = {}) {
  return [config, embeddings](const corpus::DatasetSplit& split, const eval::RunContext& ctx) {
    TeamConfig c = config;
    c.schedule.seed = derive_seed(config.schedule.seed, ctx.seed);
    std::vector<corpus::TargetId> extra;
    for (const auto& ex : split.test)
      if (std::find(extra.begin(), extra.end(), ex.target) == extra.end()) extra.push_back(ex.target);
    TeamModel model = TeamModel::from_examples(c, split.train, extra);
    if (embeddings) model.use_embeddings(embeddings);
    train_alternating(model, split.train, split.val);
    return model.predict_labels(split.test);
  };
}

}  // namespace team::mutual

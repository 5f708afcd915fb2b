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

// Argument encoder and stance classifier.
//
// Input layout: [CLS] sentence [SEP] target [SEP] topic terms. [CLS] and the
// first [SEP] belong to the sentence segment, the second [SEP] to the target
// segment. Without topic terms the input stops after the target.
//
// The reference encoder adds a segment embedding to each word embedding,
// mean-pools each segment, concatenates the three pooled vectors and maps
// them through a two-layer MLP to h.

#include "team/corpus/types.hpp"
#include "team/corpus/vocabulary.hpp"
#include "team/nn/autograd.hpp"
#include "team/nn/mlp.hpp"
#include "team/nn/optimizer.hpp"
#include "team/nn/tensor.hpp"
#include "team/topics/topics.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace team::encoder {

using corpus::Label;
using corpus::WordId;
using nn::Matrix;
using nn::Var;
using nn::Vector;

enum class Segment : std::uint8_t { sentence = 0, target = 1, topics = 2 };
inline constexpr std::size_t kNumSegments = 3;

struct EncoderInput {
  std::vector<WordId> ids;
  std::vector<Segment> segments;

  std::size_t size() const { return ids.size(); }
  /// Number of distinct segments present.
  std::size_t segment_count() const {
    std::array<bool, kNumSegments> seen{};
    for (auto s : segments) seen[static_cast<std::size_t>(s)] = true;
    return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  }
  bool operator==(const EncoderInput&) const = default;
};

inline std::size_t fixed_input_length(std::size_t target_len, std::size_t topic_len) {
  return 2 + target_len + (topic_len ? 1 + topic_len : 0);
}

inline EncoderInput build_input(const std::vector<std::string>& sentence,
                                const std::vector<std::string>& target,
                                const std::vector<std::string>& topic_terms,
                                const corpus::Vocabulary& vocab, std::size_t max_len = 128) {
  const std::size_t fixed = fixed_input_length(target.size(), topic_terms.size());
  if (max_len < fixed)
    throw std::invalid_argument("build_input: max_len " + std::to_string(max_len) +
                                " cannot hold target and topics (" + std::to_string(fixed) +
                                " tokens)");
  auto lookup = [&](const std::string& w) { return vocab.id(w).value_or(corpus::special::unk_id); };
  EncoderInput in;
  auto push = [&](WordId id, Segment s) {
    in.ids.push_back(id);
    in.segments.push_back(s);
  };
  push(corpus::special::cls_id, Segment::sentence);
  const std::size_t keep = std::min(sentence.size(), max_len - fixed);
  for (std::size_t i = 0; i < keep; ++i) push(lookup(sentence[i]), Segment::sentence);
  push(corpus::special::sep_id, Segment::sentence);
  for (const auto& w : target) push(lookup(w), Segment::target);
  if (!topic_terms.empty()) {
    push(corpus::special::sep_id, Segment::target);
    for (const auto& w : topic_terms) push(lookup(w), Segment::topics);
  }
  return in;
}

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 100;
  std::size_t hidden_dim = 128;  // d_h
  std::size_t num_classes = corpus::kNumLabels;
};

struct ClassPrediction {
  std::array<double, corpus::kNumLabels> probabilities{};
  Label predicted = Label::support;
};

/// Argmax over the fixed label order; the first maximum wins.
inline Label argmax_label(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return corpus::label_from_index(best);
}

class ArgumentEncoder {
 public:
  static constexpr const char* kWordEmb = "enc.word_emb";
  static constexpr const char* kSegEmb = "enc.seg_emb";
  static constexpr const char* kMlp = "enc.mlp";
  static constexpr const char* kClassifier = "cls";

  ArgumentEncoder(EncoderConfig config, std::uint64_t seed) : config_(config) {
    if (config_.vocab_size == 0 || config_.embed_dim == 0 || config_.hidden_dim == 0 ||
        config_.num_classes == 0)
      throw std::invalid_argument("EncoderConfig: all sizes must be positive");
    const auto d = static_cast<Eigen::Index>(config_.embed_dim);
    const auto dh = static_cast<Eigen::Index>(config_.hidden_dim);
    mlp_spec_ = {{static_cast<Eigen::Index>(kNumSegments) * d, dh, dh},
                 {nn::Activation::relu},
                 nn::OutputActivation::identity};
    cls_spec_ = nn::MlpSpec::affine(dh, static_cast<Eigen::Index>(config_.num_classes));
    nn::Rng rng(seed);
    params_.add(kWordEmb, nn::glorot_uniform(static_cast<Eigen::Index>(config_.vocab_size), d, rng));
    params_.add(kSegEmb, nn::glorot_uniform(static_cast<Eigen::Index>(kNumSegments), d, rng));
    nn::init_mlp(params_, kMlp, mlp_spec_, rng);
    nn::init_mlp(params_, kClassifier, cls_spec_, rng);
  }

  const EncoderConfig& config() const { return config_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  /// h for every input, B x d_h.
  Var encode(nn::Tape& tape, std::span<const EncoderInput* const> batch) {
    if (batch.empty()) throw std::invalid_argument("ArgumentEncoder::encode: empty batch");
    std::vector<std::uint32_t> ids, segs;
    for (const auto* in : batch) {
      if (in->ids.size() != in->segments.size())
        throw nn::ShapeError("EncoderInput: ids and segments differ in length");
      for (std::size_t i = 0; i < in->ids.size(); ++i) {
        if (in->ids[i] >= config_.vocab_size)
          throw std::out_of_range("token id " + std::to_string(in->ids[i]) +
                                  " outside vocabulary of " + std::to_string(config_.vocab_size));
        ids.push_back(in->ids[i]);
        segs.push_back(static_cast<std::uint32_t>(in->segments[i]));
      }
    }
    const auto B = static_cast<Eigen::Index>(batch.size());
    const auto n = static_cast<Eigen::Index>(ids.size());
    std::array<Matrix, kNumSegments> pool;
    for (auto& p : pool) p = Matrix::Zero(B, n);
    Eigen::Index col = 0;
    for (Eigen::Index r = 0; r < B; ++r) {
      const auto& in = *batch[static_cast<std::size_t>(r)];
      std::array<double, kNumSegments> count{};
      for (auto s : in.segments) count[static_cast<std::size_t>(s)] += 1.0;
      for (auto s : in.segments) {
        const auto si = static_cast<std::size_t>(s);
        pool[si](r, col++) = 1.0 / count[si];
      }
    }

    Var tokens = nn::add(nn::gather_rows(tape.param(params_.at(kWordEmb)), std::move(ids)),
                         nn::gather_rows(tape.param(params_.at(kSegEmb)), std::move(segs)));
    std::vector<Var> pooled;
    for (auto& p : pool) pooled.push_back(nn::matmul(tape.constant(std::move(p)), tokens));
    return nn::mlp_forward(tape, mlp_spec_, params_, kMlp, nn::concat_cols(pooled));
  }

  /// Class logits, B x 3.
  Var logits(nn::Tape& tape, Var h) { return nn::mlp_forward(tape, cls_spec_, params_, kClassifier, h); }

  Vector encode(const EncoderInput& in) {
    const EncoderInput* one[] = {&in};
    nn::Tape tape;
    return tape.value(encode(tape, one)).row(0).transpose();
  }

  ClassPrediction classify(const Vector& h) {
    Matrix l = nn::mlp_forward(cls_spec_, params_, kClassifier, Matrix(h.transpose()));
    return prediction_from_logits(l.row(0).transpose());
  }

  std::vector<ClassPrediction> predict(std::span<const EncoderInput* const> batch) {
    nn::Tape tape;
    const Matrix& l = tape.value(logits(tape, encode(tape, batch)));
    std::vector<ClassPrediction> out;
    for (Eigen::Index r = 0; r < l.rows(); ++r) out.push_back(prediction_from_logits(l.row(r).transpose()));
    return out;
  }

  /// Row-normalised copy of the word-embedding table keyed by `vocab`.
  topics::EmbeddingTable embedding_table(const corpus::Vocabulary& vocab) const {
    const Matrix& E = params_.at(kWordEmb).value;
    if (vocab.size() != static_cast<std::size_t>(E.rows()))
      throw nn::ShapeError("embedding_table: vocabulary size mismatch");
    return topics::EmbeddingTable(vocab.words(), E);
  }

  static ClassPrediction prediction_from_logits(const Vector& logits) {
    if (logits.size() != static_cast<Eigen::Index>(corpus::kNumLabels))
      throw nn::ShapeError("classifier must produce 3 logits");
    Matrix p = nn::softmax_rows(Matrix(logits.transpose()));
    ClassPrediction out;
    for (std::size_t i = 0; i < corpus::kNumLabels; ++i) out.probabilities[i] = p(0, static_cast<Eigen::Index>(i));
    out.predicted = argmax_label(out.probabilities);
    return out;
  }

 private:
  EncoderConfig config_;
  nn::MlpSpec mlp_spec_;
  nn::MlpSpec cls_spec_;
  nn::ParameterSet params_;
};

/// Mean cross-entropy of a batch, 1 x 1.
inline Var cross_entropy_loss(Var logits, std::span<const Label> gold) {
  std::vector<std::size_t> idx;
  for (auto l : gold) idx.push_back(corpus::index_of(l));
  return nn::scale(nn::sum(nn::pick(nn::log_softmax(logits), std::move(idx))),
                   -1.0 / static_cast<double>(gold.size()));
}

struct ClassifierEpochStats {
  double objective = 0.0;  // per-example mean of the minimised loss
  double cross_entropy = 0.0;
  double extra = 0.0;
  std::size_t examples = 0;
};

/// Optional additional loss: receives the batch's h (B x d_h) and the indices
/// of the batch rows; returns a 1x1 Var added to the objective.
using ExtraLoss = std::function<Var(nn::Tape&, Var h, std::span<const std::size_t> batch_indices)>;

inline ClassifierEpochStats train_classifier_epoch(ArgumentEncoder& model,
                                                   const std::vector<EncoderInput>& inputs,
                                                   const std::vector<Label>& labels,
                                                   nn::Optimizer& optimizer, std::size_t batch_size,
                                                   nn::Rng& rng, const ExtraLoss& extra = {},
                                                   const std::function<void()>& after_step = {}) {
  if (inputs.empty()) throw std::invalid_argument("train_classifier_epoch: no examples");
  if (inputs.size() != labels.size())
    throw std::invalid_argument("train_classifier_epoch: inputs and labels differ in length");
  if (batch_size == 0) throw std::invalid_argument("train_classifier_epoch: batch_size must be >= 1");
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());

  ClassifierEpochStats st;
  std::vector<const EncoderInput*> batch;
  std::vector<Label> gold;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::span<const std::size_t> idx(order.data() + start, end - start);
    batch.clear();
    gold.clear();
    for (std::size_t i : idx) {
      batch.push_back(&inputs[i]);
      gold.push_back(labels[i]);
    }
    nn::Tape tape;
    Var h = model.encode(tape, batch);
    Var ce = cross_entropy_loss(model.logits(tape, h), gold);
    Var loss = ce;
    const auto b = static_cast<double>(idx.size());
    if (extra) {
      Var e = extra(tape, h, idx);
      st.extra += tape.item(e) * b;
      loss = nn::add(loss, e);
    }
    model.params().zero_grad();
    tape.backward(loss);
    optimizer.step(model.params());
    if (after_step) after_step();  // parameters outside the model that the extra term touched
    st.cross_entropy += tape.item(ce) * b;
    st.objective += tape.item(loss) * b;
    st.examples += idx.size();
  }
  const auto n = static_cast<double>(st.examples);
  st.objective /= n;
  st.cross_entropy /= n;
  st.extra /= n;
  return st;
}

struct PredictionRow {
  std::string target;
  std::string sentence;
  std::optional<Label> gold;
  ClassPrediction prediction;
};

/// target, sentence, gold (blank if unknown), predicted, p(support), p(oppose), p(none).
inline void write_predictions(std::ostream& os, const std::vector<PredictionRow>& rows) {
  os << "target\tsentence\tgold\tpredicted\tp_support\tp_oppose\tp_none\n";
  const auto old = os.precision(9);
  for (const auto& r : rows) {
    os << r.target << '\t' << r.sentence << '\t' << (r.gold ? corpus::to_string(*r.gold) : "")
       << '\t' << corpus::to_string(r.prediction.predicted);
    for (double p : r.prediction.probabilities) os << '\t' << p;
    os << '\n';
  }
  os.precision(old);
}

}  // namespace team::encoder

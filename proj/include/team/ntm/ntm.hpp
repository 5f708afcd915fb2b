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

// VAE neural topic model.
//
//   x       = v / sum(v)                       (count-normalised bag of words)
//   mu      = MLP_mu(x),  logvar = MLP_logvar(x)
//   theta   = softplus(mu + exp(logvar / 2) * noise),  noise ~ N(0, I)
//   z       = softmax(MLP_topic(theta))        (K topics)
//   log p(w | z) = log_softmax(m + z T)        (T is K x V, m the log frequencies)
//
// Training minimises the negative ELBO: reconstruction + KL(q || N(0, I)).

#include "team/corpus/vocabulary.hpp"
#include "team/nn/autograd.hpp"
#include "team/nn/functional.hpp"
#include "team/nn/mlp.hpp"
#include "team/nn/optimizer.hpp"
#include "team/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace team::ntm {

using corpus::BowVector;
using nn::Matrix;
using nn::Vector;

struct NtmConfig {
  std::size_t vocab_size = 0;
  std::size_t num_topics = 10;
  std::size_t latent_dim = 64;
  std::size_t hidden_dim = 256;
  std::size_t kl_warmup_epochs = 10;
};

struct LatentSample {
  Vector mu;
  Vector logvar;
  Vector theta_hat;
  Vector noise;
};

struct TopicDistribution {
  Vector z;
};

struct ElboTerms {
  double total = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
};

/// m_i = ln((count_i + 1) / (total + V)).
inline Vector compute_log_freq(const std::vector<BowVector>& corpus_bows) {
  if (corpus_bows.empty()) throw std::invalid_argument("compute_log_freq: empty corpus");
  const std::size_t V = corpus_bows.front().dim;
  std::vector<double> counts(V, 0.0);
  double total = 0.0;
  for (const auto& bow : corpus_bows) {
    if (bow.dim != V) throw nn::ShapeError("compute_log_freq: inconsistent BoW dimensions");
    for (const auto& [id, c] : bow.entries) {
      counts[id] += c;
      total += c;
    }
  }
  if (total == 0.0) throw std::invalid_argument("compute_log_freq: corpus has no words");
  Vector m(static_cast<Eigen::Index>(V));
  for (std::size_t i = 0; i < V; ++i)
    m(static_cast<Eigen::Index>(i)) = std::log((counts[i] + 1.0) / (total + static_cast<double>(V)));
  return m;
}

inline double kl_warmup_weight(std::size_t epoch, std::size_t warmup_epochs) {
  if (warmup_epochs == 0) return 1.0;
  return std::min(1.0, static_cast<double>(epoch) / static_cast<double>(warmup_epochs));
}

class NeuralTopicModel {
 public:
  static constexpr const char* kTopicWord = "ntm.topic_word";
  static constexpr const char* kLogFreq = "ntm.log_freq";
  static constexpr const char* kEncMu = "ntm.enc_mu";
  static constexpr const char* kEncLogvar = "ntm.enc_logvar";
  static constexpr const char* kToTopic = "ntm.to_topic";

  NeuralTopicModel(NtmConfig config, const Vector& log_freq, std::uint64_t seed)
      : config_(config) {
    if (config_.vocab_size == 0 || config_.num_topics == 0 || config_.latent_dim == 0 ||
        config_.hidden_dim == 0)
      throw std::invalid_argument("NtmConfig: all sizes must be positive");
    if (static_cast<std::size_t>(log_freq.size()) != config_.vocab_size)
      throw nn::ShapeError("log_freq length " + std::to_string(log_freq.size()) +
                           " != vocab size " + std::to_string(config_.vocab_size));
    const auto V = static_cast<Eigen::Index>(config_.vocab_size);
    const auto K = static_cast<Eigen::Index>(config_.num_topics);
    const auto H = static_cast<Eigen::Index>(config_.latent_dim);
    const auto D = static_cast<Eigen::Index>(config_.hidden_dim);
    enc_spec_ = {{V, D, H}, {nn::Activation::softplus}, nn::OutputActivation::identity};
    topic_spec_ = nn::MlpSpec::affine(H, K);

    nn::Rng rng(seed);
    nn::init_mlp(params_, kEncMu, enc_spec_, rng);
    nn::init_mlp(params_, kEncLogvar, enc_spec_, rng);
    nn::init_mlp(params_, kToTopic, topic_spec_, rng);
    params_.add(kTopicWord, nn::glorot_uniform(K, V, rng));
    params_.add(kLogFreq, Matrix(log_freq.transpose()), /*trainable=*/false);
  }

  const NtmConfig& config() const { return config_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  const Matrix& topic_word() const { return params_.at(kTopicWord).value; }
  Vector log_freq() const { return params_.at(kLogFreq).value.row(0).transpose(); }

  /// Count-normalised dense batch (rows = documents).
  Matrix normalized_batch(std::span<const BowVector* const> batch) const {
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(batch.size()),
                            static_cast<Eigen::Index>(config_.vocab_size));
    for (std::size_t r = 0; r < batch.size(); ++r) {
      check_dim(*batch[r]);
      const double total = static_cast<double>(batch[r]->total());
      if (total == 0.0) continue;
      for (const auto& [id, c] : batch[r]->entries)
        x(static_cast<Eigen::Index>(r), id) = c / total;
    }
    return x;
  }

  std::pair<Vector, Vector> infer(const BowVector& v) {
    const BowVector* one[] = {&v};
    nn::Tape tape;
    nn::Var x = tape.constant(normalized_batch(one));
    Vector mu = tape.value(nn::mlp_forward(tape, enc_spec_, params_, kEncMu, x)).row(0).transpose();
    Vector lv =
        tape.value(nn::mlp_forward(tape, enc_spec_, params_, kEncLogvar, x)).row(0).transpose();
    return {std::move(mu), std::move(lv)};
  }

  static LatentSample sample_from_noise(const Vector& mu, const Vector& logvar, const Vector& noise) {
    if (mu.size() != logvar.size() || mu.size() != noise.size())
      throw nn::ShapeError("reparameterize: mu/logvar/noise length mismatch");
    LatentSample s{mu, logvar, Vector(mu.size()), noise};
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      s.theta_hat(i) = nn::detail::softplus(mu(i) + std::exp(0.5 * logvar(i)) * noise(i));
    return s;
  }

  static LatentSample reparameterize(const Vector& mu, const Vector& logvar, nn::Rng& rng) {
    Vector noise(mu.size());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
    return sample_from_noise(mu, logvar, noise);
  }

  TopicDistribution topic_distribution(const LatentSample& s) {
    if (static_cast<std::size_t>(s.theta_hat.size()) != config_.latent_dim)
      throw nn::ShapeError("topic_distribution: latent width mismatch");
    Matrix logits = nn::mlp_forward(topic_spec_, params_, kToTopic, Matrix(s.theta_hat.transpose()));
    return {nn::softmax_rows(logits).row(0).transpose()};
  }

  /// z from the posterior mean (noise fixed at zero).
  TopicDistribution posterior_topics(const BowVector& v) {
    auto [mu, lv] = infer(v);
    return topic_distribution(sample_from_noise(mu, lv, Vector::Zero(mu.size())));
  }

  /// Log word probabilities log_softmax(m + z T).
  Vector decode(const TopicDistribution& z) const {
    if (static_cast<std::size_t>(z.z.size()) != config_.num_topics)
      throw nn::ShapeError("decode: topic count mismatch");
    Matrix logits = z.z.transpose() * topic_word() + params_.at(kLogFreq).value;
    return nn::log_softmax_rows(logits).row(0).transpose();
  }

  /// Negative ELBO of one document with `num_samples` reparameterised draws.
  ElboTerms elbo_loss(const BowVector& v, nn::Rng& rng, std::size_t num_samples = 1) {
    if (num_samples < 1) throw std::invalid_argument("elbo_loss: num_samples must be >= 1");
    check_dim(v);
    auto [mu, lv] = infer(v);
    ElboTerms t;
    for (std::size_t l = 0; l < num_samples; ++l) {
      Vector logp = decode(topic_distribution(reparameterize(mu, lv, rng)));
      for (const auto& [id, c] : v.entries) t.reconstruction -= c * logp(id);
    }
    t.reconstruction /= static_cast<double>(num_samples);
    t.kl = nn::gaussian_kl(nn::as_span(mu), nn::as_span(lv));
    t.total = t.reconstruction + t.kl;
    return t;
  }

  struct Forward {
    nn::Var objective;       // batch mean of reconstruction + kl_weight * kl
    nn::Var reconstruction;  // batch sum
    nn::Var kl;              // batch sum
    nn::Var z;               // B x K, from the first noise draw
  };

  /// Differentiable batch forward. `noise` holds one B x H matrix per
  /// Monte Carlo sample.
  Forward forward(nn::Tape& tape, std::span<const BowVector* const> batch,
                  const std::vector<Matrix>& noise, double kl_weight) {
    if (batch.empty()) throw std::invalid_argument("NeuralTopicModel::forward: empty batch");
    if (noise.empty()) throw std::invalid_argument("NeuralTopicModel::forward: no noise samples");
    const auto B = static_cast<Eigen::Index>(batch.size());
    Matrix counts = Matrix::Zero(B, static_cast<Eigen::Index>(config_.vocab_size));
    for (Eigen::Index r = 0; r < B; ++r)
      for (const auto& [id, c] : batch[static_cast<std::size_t>(r)]->entries) counts(r, id) = c;

    nn::Var x = tape.constant(normalized_batch(batch));
    nn::Var mu = nn::mlp_forward(tape, enc_spec_, params_, kEncMu, x);
    nn::Var lv = nn::mlp_forward(tape, enc_spec_, params_, kEncLogvar, x);
    nn::Var sd = nn::exp(nn::scale(lv, 0.5));
    nn::Var T = tape.param(params_.at(kTopicWord));
    nn::Var m = tape.param(params_.at(kLogFreq));
    nn::Var C = tape.constant(std::move(counts));

    Forward f;
    nn::Var recon_total;
    for (std::size_t l = 0; l < noise.size(); ++l) {
      const Matrix& eps = noise[l];
      if (eps.rows() != B || eps.cols() != static_cast<Eigen::Index>(config_.latent_dim))
        throw nn::ShapeError("forward: noise shape " + nn::shape_str(eps));
      nn::Var theta = nn::softplus(nn::add(mu, nn::mul(sd, tape.constant(eps))));
      nn::Var z = nn::softmax(nn::mlp_forward(tape, topic_spec_, params_, kToTopic, theta));
      if (l == 0) f.z = z;
      nn::Var logp = nn::log_softmax(nn::add_row(nn::matmul(z, T), m));
      nn::Var ll = nn::sum(nn::mul(C, logp));
      recon_total = l == 0 ? ll : nn::add(recon_total, ll);
    }
    f.reconstruction = nn::scale(recon_total, -1.0 / static_cast<double>(noise.size()));
    // 0.5 * sum(exp(lv) + mu^2 - 1 - lv)
    nn::Var kl_terms = nn::sub(nn::add(nn::exp(lv), nn::mul(mu, mu)), nn::affine(lv, 1.0, 1.0));
    f.kl = nn::scale(nn::sum(kl_terms), 0.5);
    f.objective = nn::scale(nn::add(f.reconstruction, nn::scale(f.kl, kl_weight)),
                            1.0 / static_cast<double>(B));
    return f;
  }

  Matrix draw_noise(std::size_t batch, nn::Rng& rng) const {
    return rng.normal_matrix(static_cast<Eigen::Index>(batch),
                             static_cast<Eigen::Index>(config_.latent_dim));
  }

  /// Indices of the n largest weights of topic k (ties to the smaller id).
  std::vector<corpus::WordId> top_words(std::size_t k, std::size_t n) const {
    const Matrix& T = topic_word();
    std::vector<corpus::WordId> ids(static_cast<std::size_t>(T.cols()));
    std::iota(ids.begin(), ids.end(), 0);
    n = std::min(n, ids.size());
    const auto row = static_cast<Eigen::Index>(k);
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](corpus::WordId a, corpus::WordId b) {
                        const double wa = T(row, a), wb = T(row, b);
                        return wa != wb ? wa > wb : a < b;
                      });
    ids.resize(n);
    return ids;
  }

 private:
  void check_dim(const BowVector& v) const {
    if (v.dim != config_.vocab_size)
      throw nn::ShapeError("BoW dimension " + std::to_string(v.dim) + " != vocab size " +
                           std::to_string(config_.vocab_size));
  }

  NtmConfig config_;
  nn::MlpSpec enc_spec_;
  nn::MlpSpec topic_spec_;
  nn::ParameterSet params_;
};

struct NtmEpochStats {
  double objective = 0.0;       // per-document mean of the minimised loss
  double neg_elbo = 0.0;        // per-document mean of reconstruction + kl
  double reconstruction = 0.0;
  double kl = 0.0;
  double extra = 0.0;           // batch-weighted mean of the extra term's value
  double kl_weight = 1.0;
  std::size_t documents = 0;
};

/// Optional additional loss term: receives the batch's z (B x K) and the
/// corpus indices of the batch rows; returns a 1x1 Var added to the objective.
using ExtraLoss =
    std::function<nn::Var(nn::Tape&, nn::Var z, std::span<const std::size_t> batch_indices)>;

/// One shuffled pass over `corpus_bows`.
inline NtmEpochStats train_ntm_epoch(NeuralTopicModel& model, const std::vector<BowVector>& corpus_bows,
                                     nn::Optimizer& optimizer, std::size_t batch_size, nn::Rng& rng,
                                     double kl_weight = 1.0, const ExtraLoss& extra = {}) {
  if (corpus_bows.empty()) throw std::invalid_argument("train_ntm_epoch: empty corpus");
  if (batch_size == 0) throw std::invalid_argument("train_ntm_epoch: batch_size must be >= 1");
  std::vector<std::size_t> order(corpus_bows.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());

  NtmEpochStats st;
  st.kl_weight = kl_weight;
  std::vector<const BowVector*> batch;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::span<const std::size_t> idx(order.data() + start, end - start);
    batch.clear();
    for (std::size_t i : idx) batch.push_back(&corpus_bows[i]);

    nn::Tape tape;
    auto f = model.forward(tape, batch, {model.draw_noise(batch.size(), rng)}, kl_weight);
    nn::Var loss = f.objective;
    if (extra) {
      nn::Var e = extra(tape, f.z, idx);
      st.extra += tape.item(e) * static_cast<double>(batch.size());
      loss = nn::add(loss, e);
    }
    model.params().zero_grad();
    tape.backward(loss);
    optimizer.step(model.params());

    const double r = tape.item(f.reconstruction), k = tape.item(f.kl);
    st.reconstruction += r;
    st.kl += k;
    st.objective += tape.item(loss) * static_cast<double>(batch.size());
    st.documents += batch.size();
  }
  const auto n = static_cast<double>(st.documents);
  st.reconstruction /= n;
  st.kl /= n;
  st.neg_elbo = st.reconstruction + st.kl;
  st.objective /= n;
  st.extra /= n;
  return st;
}

/// "topic<TAB>word<TAB>weight" for every entry of the K x V topic-word matrix.
inline void export_topic_word_tsv(const std::filesystem::path& path, const NeuralTopicModel& model,
                                  const corpus::Vocabulary& vocab) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  const Matrix& T = model.topic_word();
  if (static_cast<std::size_t>(T.cols()) != vocab.size())
    throw nn::ShapeError("export_topic_word_tsv: vocabulary size mismatch");
  os.precision(17);
  os << "topic\tword\tweight\n";
  for (Eigen::Index k = 0; k < T.rows(); ++k)
    for (Eigen::Index i = 0; i < T.cols(); ++i)
      os << k << '\t' << vocab.word(static_cast<corpus::WordId>(i)) << '\t' << T(k, i) << '\n';
}

}  // namespace team::ntm

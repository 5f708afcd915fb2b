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

// Target-aware topic extraction: mask the target's own words out of the
// topic-word matrix, keep the top-N terms per topic, and pick the topic whose
// terms sit closest to the target in embedding space.

#include "team/corpus/vocabulary.hpp"
#include "team/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace team::topics {

using corpus::WordId;
using nn::Matrix;

struct TargetMask {
  Matrix mask;  // K x V, column i zero iff word i is a target word
};

inline TargetMask build_target_mask(const std::vector<std::string>& target_tokens,
                                    const corpus::Vocabulary& vocab, std::size_t num_topics) {
  TargetMask m{Matrix::Ones(static_cast<Eigen::Index>(num_topics),
                            static_cast<Eigen::Index>(vocab.size()))};
  for (const auto& t : target_tokens)
    if (auto id = vocab.id(t)) m.mask.col(*id).setZero();
  return m;
}

struct KeyTerm {
  WordId id = 0;
  double weight = 0.0;
  bool operator==(const KeyTerm&) const = default;
};

struct KeyTermLists {
  std::vector<std::vector<KeyTerm>> lists;
};

/// Top-n entries of each row of topic_word * mask. Masked entries are never
/// candidates; ties go to the smaller word id.
inline KeyTermLists filter_topics(const Matrix& topic_word, const TargetMask& mask, std::size_t n) {
  if (mask.mask.rows() != topic_word.rows() || mask.mask.cols() != topic_word.cols())
    throw nn::ShapeError("filter_topics: mask " + nn::shape_str(mask.mask) + " vs topic_word " +
                         nn::shape_str(topic_word));
  KeyTermLists out;
  for (Eigen::Index k = 0; k < topic_word.rows(); ++k) {
    std::vector<KeyTerm> cand;
    for (Eigen::Index i = 0; i < topic_word.cols(); ++i)
      if (mask.mask(k, i) != 0.0)
        cand.push_back({static_cast<WordId>(i), topic_word(k, i) * mask.mask(k, i)});
    if (n == 0 || n > cand.size())
      throw std::out_of_range("filter_topics: n=" + std::to_string(n) + " but topic " +
                              std::to_string(k) + " has " + std::to_string(cand.size()) +
                              " unmasked words");
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n), cand.end(),
                      [](const KeyTerm& a, const KeyTerm& b) {
                        return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
                      });
    cand.resize(n);
    out.lists.push_back(std::move(cand));
  }
  return out;
}

/// Word vectors, stored length-normalised. Zero vectors stay zero.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  EmbeddingTable(std::vector<std::string> words, const Matrix& vectors)
      : words_(std::move(words)), vectors_(vectors) {
    if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows())
      throw nn::ShapeError("EmbeddingTable: " + std::to_string(words_.size()) + " words for " +
                           std::to_string(vectors_.rows()) + " vectors");
    for (Eigen::Index r = 0; r < vectors_.rows(); ++r) {
      const double norm = vectors_.row(r).norm();
      if (norm > 0.0) vectors_.row(r) /= norm;
      index_.emplace(words_[static_cast<std::size_t>(r)], r);
    }
  }

  std::size_t size() const { return words_.size(); }
  Eigen::Index dim() const { return vectors_.cols(); }
  bool contains(const std::string& w) const { return index_.count(w) != 0; }
  const Matrix& vectors() const { return vectors_; }

  std::optional<Eigen::Index> row_of(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// "word v1 ... vd" per line. Blank lines are skipped; a repeated word keeps
  /// its first vector.
  static EmbeddingTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings " + path.string());
    std::vector<std::string> words;
    std::vector<std::vector<double>> rows;
    std::unordered_map<std::string, bool> seen;
    std::string line;
    std::size_t lineno = 0, d = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string w;
      if (!(ls >> w)) continue;
      std::vector<double> v;
      std::string tok;
      while (ls >> tok) {
        try {
          v.push_back(std::stod(tok));
        } catch (const std::exception&) {
          throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                   ": bad number '" + tok + "'");
        }
      }
      if (v.empty())
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": no vector");
      if (d == 0) d = v.size();
      if (v.size() != d)
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(d) + " values, got " + std::to_string(v.size()));
      if (!seen.emplace(w, true).second) continue;
      words.push_back(std::move(w));
      rows.push_back(std::move(v));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < d; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return EmbeddingTable(std::move(words), m);
  }

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

inline std::size_t kept_count(double p, std::size_t n) {
  // The small slack keeps products like 0.3 * 10 from rounding up to 4.
  const auto c = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-12));
  return std::clamp<std::size_t>(c, 1, n);
}

/// For each topic word, its best cosine against the target words; the top
/// ceil(p * N_t) of those are summed and divided by N_tau. Rows must already
/// be unit length.
inline double score_topic(const Matrix& target_vecs, const Matrix& topic_vecs, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("score_topic: p must lie in (0, 1)");
  if (target_vecs.rows() == 0 || topic_vecs.rows() == 0)
    throw std::invalid_argument("score_topic: empty target or topic list");
  if (target_vecs.cols() != topic_vecs.cols())
    throw nn::ShapeError("score_topic: embedding widths differ");
  Matrix cos = topic_vecs * target_vecs.transpose();
  std::vector<double> best(static_cast<std::size_t>(cos.rows()));
  for (Eigen::Index i = 0; i < cos.rows(); ++i) best[static_cast<std::size_t>(i)] = cos.row(i).maxCoeff();
  const std::size_t keep = kept_count(p, best.size());
  std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(keep), best.end(),
                    std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < keep; ++i) s += best[i];
  return s / static_cast<double>(target_vecs.rows());
}

struct ExtractedTopics {
  std::size_t topic_index = 0;
  std::vector<KeyTerm> terms;
  std::vector<std::string> words;
  double score = 0.0;
  std::vector<double> scores;  // every topic's score
};

/// Scores every list against the target and returns the best one (ties to
/// the smaller topic index). Topic words without an embedding contribute a
/// zero vector. Repeated target tokens count repeatedly.
inline ExtractedTopics extract_topics(const KeyTermLists& lists, const corpus::Vocabulary& vocab,
                                      const EmbeddingTable& embeddings,
                                      const std::vector<std::string>& target_tokens, double p = 0.5) {
  if (lists.lists.empty()) throw std::invalid_argument("extract_topics: no topics");
  std::vector<Eigen::Index> target_rows;
  for (const auto& t : target_tokens)
    if (auto r = embeddings.row_of(t)) target_rows.push_back(*r);
  if (target_rows.empty())
    throw std::invalid_argument("extract_topics: no target token has an embedding");
  Matrix target(static_cast<Eigen::Index>(target_rows.size()), embeddings.dim());
  for (std::size_t i = 0; i < target_rows.size(); ++i)
    target.row(static_cast<Eigen::Index>(i)) = embeddings.vectors().row(target_rows[i]);

  ExtractedTopics out;
  for (const auto& list : lists.lists) {
    Matrix topic = Matrix::Zero(static_cast<Eigen::Index>(list.size()), embeddings.dim());
    for (std::size_t i = 0; i < list.size(); ++i)
      if (auto r = embeddings.row_of(vocab.word(list[i].id)))
        topic.row(static_cast<Eigen::Index>(i)) = embeddings.vectors().row(*r);
    out.scores.push_back(score_topic(target, topic, p));
  }
  out.topic_index = static_cast<std::size_t>(
      std::max_element(out.scores.begin(), out.scores.end()) - out.scores.begin());
  out.score = out.scores[out.topic_index];
  out.terms = lists.lists[out.topic_index];
  for (const auto& t : out.terms) out.words.push_back(vocab.word(t.id));
  return out;
}

struct TopicReportRow {
  std::string target;
  ExtractedTopics topics;
};

/// target, selected topic, score, then "word:weight" terms separated by spaces.
inline void write_topic_report(std::ostream& os, const std::vector<TopicReportRow>& rows) {
  os << "target\ttopic\tscore\tterms\n";
  for (const auto& r : rows) {
    os << r.target << '\t' << r.topics.topic_index << '\t' << r.topics.score << '\t';
    for (std::size_t i = 0; i < r.topics.terms.size(); ++i)
      os << (i ? " " : "") << r.topics.words[i] << ':' << r.topics.terms[i].weight;
    os << '\n';
  }
}

}  // namespace team::topics

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

#include "team/corpus/tokenizer.hpp"
#include "team/corpus/types.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace team::corpus {

using WordId = std::uint32_t;

/// Dense word <-> id mapping with corpus statistics.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Ids follow the order of `words`.
  explicit Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> frequency = {},
                      std::vector<std::uint64_t> document_frequency = {})
      : words_(std::move(words)),
        frequency_(std::move(frequency)),
        document_frequency_(std::move(document_frequency)) {
    frequency_.resize(words_.size(), 0);
    document_frequency_.resize(words_.size(), 0);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (!index_.emplace(words_[i], static_cast<WordId>(i)).second)
        throw CorpusError("duplicate vocabulary word: " + words_[i]);
    }
  }

  std::size_t size() const { return words_.size(); }

  std::optional<WordId> id(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  const std::string& word(WordId id) const { return words_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  std::uint64_t frequency(WordId id) const { return frequency_.at(id); }
  std::uint64_t document_frequency(WordId id) const { return document_frequency_.at(id); }

  bool operator==(const Vocabulary& o) const {
    return words_ == o.words_ && frequency_ == o.frequency_ &&
           document_frequency_ == o.document_frequency_;
  }

  /// "id<TAB>word<TAB>frequency<TAB>document_frequency" per line.
  void save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CorpusError("cannot write " + path.string());
    for (std::size_t i = 0; i < words_.size(); ++i)
      os << i << '\t' << words_[i] << '\t' << frequency_[i] << '\t' << document_frequency_[i]
         << '\n';
  }

  static Vocabulary load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CorpusError("cannot open vocabulary " + path.string());
    std::vector<std::string> words;
    std::vector<std::uint64_t> freq, df;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::size_t id = 0;
      std::string w;
      std::uint64_t f = 0, d = 0;
      if (!(ls >> id) || ls.get() != '\t' || !std::getline(ls, w, '\t') || !(ls >> f >> d) ||
          id != words.size())
        throw CorpusError(path.string() + ":" + std::to_string(lineno) + ": bad vocabulary line");
      words.push_back(w);
      freq.push_back(f);
      df.push_back(d);
    }
    return Vocabulary(std::move(words), std::move(freq), std::move(df));
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> frequency_;
  std::vector<std::uint64_t> document_frequency_;
  std::unordered_map<std::string, WordId> index_;
};

/// Ranks tokens by total corpus frequency (ties lexicographic) and keeps the
/// first `max_size`.
inline Vocabulary build_vocabulary_from_docs(const std::vector<std::vector<std::string>>& docs,
                                             std::size_t max_size,
                                             std::vector<std::string> reserved = {}) {
  if (max_size < 1) throw std::invalid_argument("build_vocabulary: max_size must be >= 1");
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;  // freq, df
  for (const auto& doc : docs) {
    std::vector<std::string> seen;
    for (const auto& t : doc) {
      ++counts[t].first;
      seen.push_back(t);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (const auto& t : seen) ++counts[t].second;
  }
  for (const auto& r : reserved) counts.erase(r);
  std::vector<std::pair<std::string, std::pair<std::uint64_t, std::uint64_t>>> ranked(
      counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second.first > b.second.first;  // map order already lexicographic
  });
  if (ranked.size() > max_size) ranked.resize(max_size);

  std::vector<std::string> words = std::move(reserved);
  std::vector<std::uint64_t> freq(words.size(), 0), df(words.size(), 0);
  for (auto& [w, c] : ranked) {
    words.push_back(w);
    freq.push_back(c.first);
    df.push_back(c.second);
  }
  return Vocabulary(std::move(words), std::move(freq), std::move(df));
}

/// Topic-model vocabulary over the records' sentences. Tokens in `stopwords`
/// or shorter than `min_token_length` code points are excluded.
inline Vocabulary build_vocabulary(const std::vector<RawRecord>& records, std::size_t max_size,
                                   const StopwordSet& stopwords = default_stopwords(),
                                   std::size_t min_token_length = 2) {
  if (records.empty()) throw std::invalid_argument("build_vocabulary: no records");
  if (max_size < 1) throw std::invalid_argument("build_vocabulary: max_size must be >= 1");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(records.size());
  for (const auto& r : records) {
    std::vector<std::string> kept;
    for (auto& t : tokenize(r.sentence, TokenizeMode::encoder))
      if (detail::utf8_length(t) >= min_token_length && stopwords.count(t) == 0)
        kept.push_back(std::move(t));
    docs.push_back(std::move(kept));
  }
  return build_vocabulary_from_docs(docs, max_size);
}

namespace special {
inline const std::string pad = "[PAD]";
inline const std::string unk = "[UNK]";
inline const std::string cls = "[CLS]";
inline const std::string sep = "[SEP]";
inline constexpr WordId pad_id = 0, unk_id = 1, cls_id = 2, sep_id = 3;
}  // namespace special

/// Encoder vocabulary: the marker tokens at ids 0..3, then every encoder-mode
/// token of the records (no stopword removal), most frequent first.
inline Vocabulary build_encoder_vocabulary(const std::vector<RawRecord>& records,
                                           std::size_t max_size = 50000) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(records.size() * 2);
  std::vector<TargetId> targets;
  for (const auto& r : records) {
    docs.push_back(tokenize(r.sentence, TokenizeMode::encoder));
    if (std::find(targets.begin(), targets.end(), r.target) == targets.end()) {
      targets.push_back(r.target);
      docs.push_back(tokenize(r.target.str(), TokenizeMode::encoder));
    }
  }
  return build_vocabulary_from_docs(docs, max_size,
                                    {special::pad, special::unk, special::cls, special::sep});
}

/// Sparse bag of words: sorted (id, count) entries over a vocabulary of size `dim`.
struct BowVector {
  std::size_t dim = 0;
  std::vector<std::pair<WordId, std::uint32_t>> entries;

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (const auto& e : entries) s += e.second;
    return s;
  }

  std::vector<std::uint32_t> dense() const {
    std::vector<std::uint32_t> out(dim, 0);
    for (const auto& [id, c] : entries) out[id] = c;
    return out;
  }

  bool operator==(const BowVector&) const = default;
};

/// Out-of-vocabulary tokens are ignored.
inline BowVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::map<WordId, std::uint32_t> counts;
  for (const auto& t : tokens)
    if (auto id = vocab.id(t)) ++counts[*id];
  BowVector bow;
  bow.dim = vocab.size();
  bow.entries.assign(counts.begin(), counts.end());
  return bow;
}

}  // namespace team::corpus

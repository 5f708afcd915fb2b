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

// NPMI topic coherence from boolean sliding-window co-occurrence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace team::eval {

inline constexpr double kNpmiEpsilon = 1e-12;
inline constexpr std::size_t kNpmiWindow = 10;

/// Window counts for a fixed word list. A document shorter than the window
/// counts as a single window; otherwise every length-`window` span is one.
class WindowCounts {
 public:
  WindowCounts(const std::vector<std::string>& words,
               const std::vector<std::vector<std::string>>& docs, std::size_t window = kNpmiWindow)
      : words_(words), single_(words.size(), 0), joint_(words.size() * words.size(), 0) {
    if (window == 0) throw std::invalid_argument("npmi: window must be >= 1");
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < words.size(); ++i) index.emplace(words[i], i);
    const std::size_t n = words.size();
    std::vector<int> present_count(n, 0);
    std::vector<std::size_t> present;
    for (const auto& doc : docs) {
      if (doc.empty()) continue;
      std::vector<long> ids(doc.size());
      for (std::size_t t = 0; t < doc.size(); ++t) {
        auto it = index.find(doc[t]);
        ids[t] = it == index.end() ? -1 : static_cast<long>(it->second);
      }
      const std::size_t span = std::min(window, doc.size());
      std::fill(present_count.begin(), present_count.end(), 0);
      auto enter = [&](long id) { if (id >= 0) ++present_count[static_cast<std::size_t>(id)]; };
      auto leave = [&](long id) { if (id >= 0) --present_count[static_cast<std::size_t>(id)]; };
      for (std::size_t t = 0; t < span; ++t) enter(ids[t]);
      for (std::size_t start = 0;; ++start) {
        ++windows_;
        present.clear();
        for (std::size_t i = 0; i < n; ++i)
          if (present_count[i] > 0) present.push_back(i);
        for (std::size_t a : present) {
          ++single_[a];
          for (std::size_t b : present) ++joint_[a * n + b];
        }
        if (start + span >= doc.size()) break;
        leave(ids[start]);
        enter(ids[start + span]);
      }
    }
  }

  std::uint64_t windows() const { return windows_; }
  std::uint64_t count(std::size_t i) const { return single_.at(i); }
  std::uint64_t joint(std::size_t i, std::size_t j) const { return joint_.at(i * words_.size() + j); }
  const std::vector<std::string>& words() const { return words_; }

  /// NPMI of words i and j; -1 when either word never occurs.
  double npmi(std::size_t i, std::size_t j) const {
    if (windows_ == 0 || count(i) == 0 || count(j) == 0) return -1.0;
    const double n = static_cast<double>(windows_);
    const double pi = count(i) / n, pj = count(j) / n, pij = joint(i, j) / n + kNpmiEpsilon;
    const double denom = -std::log(pij);
    if (denom == 0.0) return 1.0;
    return std::clamp(std::log(pij / (pi * pj)) / denom, -1.0, 1.0);
  }

  /// Mean NPMI over unordered pairs among the first `cutoff` words.
  double mean_npmi(std::size_t cutoff) const {
    if (cutoff < 2 || cutoff > words_.size())
      throw std::out_of_range("npmi: cutoff " + std::to_string(cutoff) + " with " +
                              std::to_string(words_.size()) + " words");
    double s = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < cutoff; ++i)
      for (std::size_t j = i + 1; j < cutoff; ++j, ++pairs) s += npmi(i, j);
    return s / static_cast<double>(pairs);
  }

  /// Words among the first `cutoff` that never occur in the reference corpus.
  std::vector<std::string> missing(std::size_t cutoff) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(cutoff, words_.size()); ++i)
      if (count(i) == 0) out.push_back(words_[i]);
    return out;
  }

 private:
  std::vector<std::string> words_;
  std::uint64_t windows_ = 0;
  std::vector<std::uint64_t> single_;
  std::vector<std::uint64_t> joint_;
};

struct NpmiResult {
  double value = 0.0;
  std::vector<std::string> missing;
};

inline NpmiResult npmi(const std::vector<std::string>& topic_words,
                       const std::vector<std::vector<std::string>>& docs,
                       std::size_t window = kNpmiWindow, std::size_t cutoff = 10) {
  if (cutoff > topic_words.size())
    throw std::out_of_range("npmi: cutoff exceeds topic length");
  std::vector<std::string> top(topic_words.begin(), topic_words.begin() + static_cast<std::ptrdiff_t>(cutoff));
  WindowCounts wc(top, docs, window);
  return {wc.mean_npmi(cutoff), wc.missing(cutoff)};
}

inline const std::vector<std::size_t>& default_cutoffs() {
  static const std::vector<std::size_t> c = {5, 10, 15, 20};
  return c;
}

struct CoherenceReport {
  std::vector<std::size_t> cutoffs;
  std::vector<std::vector<double>> per_topic;  // [topic][cutoff]; NaN where the topic is too short
  std::vector<double> average;                 // per cutoff, over topics that have a value
  std::vector<std::vector<std::string>> missing;  // per topic
};

inline CoherenceReport coherence_report(const std::vector<std::vector<std::string>>& topics,
                                        const std::vector<std::vector<std::string>>& docs,
                                        std::vector<std::size_t> cutoffs = default_cutoffs(),
                                        std::size_t window = kNpmiWindow) {
  CoherenceReport r;
  r.cutoffs = cutoffs;
  r.average.assign(cutoffs.size(), 0.0);
  std::vector<std::size_t> counted(cutoffs.size(), 0);
  for (const auto& t : topics) {
    WindowCounts wc(t, docs, window);
    std::vector<double> row;
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      if (cutoffs[c] > t.size()) {
        row.push_back(std::nan(""));
        continue;
      }
      row.push_back(wc.mean_npmi(cutoffs[c]));
      r.average[c] += row.back();
      ++counted[c];
    }
    r.per_topic.push_back(std::move(row));
    r.missing.push_back(wc.missing(t.size()));
  }
  for (std::size_t c = 0; c < cutoffs.size(); ++c)
    r.average[c] = counted[c] ? r.average[c] / static_cast<double>(counted[c]) : std::nan("");
  return r;
}

/// "topic,npmi@5,...,missing" rows plus an "average" row.
inline void write_coherence_csv(std::ostream& os, const CoherenceReport& r) {
  const auto old = os.precision(10);
  auto cell = [&](double v) {
    os << ',';
    if (!std::isnan(v)) os << v;
  };
  os << "topic";
  for (auto c : r.cutoffs) os << ",npmi@" << c;
  os << ",missing\n";
  for (std::size_t k = 0; k < r.per_topic.size(); ++k) {
    os << k;
    for (double v : r.per_topic[k]) cell(v);
    os << ',';
    for (std::size_t i = 0; i < r.missing[k].size(); ++i) os << (i ? " " : "") << r.missing[k][i];
    os << '\n';
  }
  os << "average";
  for (double v : r.average) cell(v);
  os << ",\n";
  os.precision(old);
}

/// Reads a "topic<TAB>word<TAB>weight" export and returns each topic's words
/// ordered by weight (descending, ties by first appearance), truncated to `top_n`.
inline std::vector<std::vector<std::string>> read_topic_word_tsv(const std::filesystem::path& path,
                                                                 std::size_t top_n = 20) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topic file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("topic\tword\tweight", 0) != 0)
    throw std::runtime_error(path.string() + ": expected header 'topic<TAB>word<TAB>weight'");
  std::map<std::size_t, std::vector<std::pair<double, std::string>>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string k, w, v;
    if (!std::getline(ls, k, '\t') || !std::getline(ls, w, '\t') || !std::getline(ls, v, '\t'))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    try {
      rows[std::stoul(k)].emplace_back(std::stod(v), w);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  std::vector<std::vector<std::string>> topics;
  for (auto& [_, ws] : rows) {
    std::stable_sort(ws.begin(), ws.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::string> t;
    for (std::size_t i = 0; i < std::min(top_n, ws.size()); ++i) t.push_back(ws[i].second);
    topics.push_back(std::move(t));
  }
  return topics;
}

}  // namespace team::eval

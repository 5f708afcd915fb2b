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

// Brute-force reference implementations shared by unit and acceptance tests.
// They deliberately avoid the library code paths they check.

#include "team/corpus/types.hpp"
#include "team/corpus/vocabulary.hpp"
#include "team/eval/metrics.hpp"
#include "team/topics/topics.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

namespace team::testkit {

using nn::Matrix;

inline corpus::Vocabulary numbered_vocab(std::size_t n, const std::string& prefix = "w") {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
  return corpus::Vocabulary(words);
}

inline topics::TargetMask mask_columns(std::size_t K, std::size_t V, const std::set<std::size_t>& cols) {
  topics::TargetMask m{Matrix::Ones(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V))};
  for (auto c : cols) m.mask.col(static_cast<Eigen::Index>(c)).setZero();
  return m;
}

// Stable sort of every unmasked (id, weight) by weight, starting from
// ascending ids so equal weights keep id order.
inline std::vector<corpus::WordId> brute_force_top(const Matrix& T, const topics::TargetMask& m, Eigen::Index k,
                                                   std::size_t n) {
  std::vector<std::pair<corpus::WordId, double>> all;
  for (Eigen::Index i = 0; i < T.cols(); ++i)
    if (m.mask(k, i) == 1.0) all.emplace_back(static_cast<corpus::WordId>(i), T(k, i));
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<corpus::WordId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(all[i].first);
  return out;
}

inline std::vector<corpus::WordId> ids_of(const std::vector<topics::KeyTerm>& terms) {
  std::vector<corpus::WordId> out;
  for (const auto& t : terms) out.push_back(t.id);
  return out;
}

// Per-class scores by scanning example lists; shares nothing with metric_report.
inline eval::MetricReport brute_force_report(const std::vector<corpus::Label>& gold,
                                             const std::vector<corpus::Label>& pred) {
  eval::MetricReport r;
  std::array<double, 3> p{}, rc{};
  for (int c = 0; c < 3; ++c) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = corpus::index_of(gold[i]) == static_cast<std::size_t>(c);
      const bool q = corpus::index_of(pred[i]) == static_cast<std::size_t>(c);
      tp += g && q;
      fp += !g && q;
      fn += g && !q;
    }
    p[c] = tp + fp ? double(tp) / (tp + fp) : 0.0;
    rc[c] = tp + fn ? double(tp) / (tp + fn) : 0.0;
    r.f1[c] = p[c] + rc[c] > 0 ? 2 * p[c] * rc[c] / (p[c] + rc[c]) : 0.0;
  }
  r.macro_f1 = (r.f1[0] + r.f1[1] + r.f1[2]) / 3;
  r.precision_support = p[0];
  r.recall_support = rc[0];
  r.precision_oppose = p[1];
  r.recall_oppose = rc[1];
  return r;
}

}  // namespace team::testkit

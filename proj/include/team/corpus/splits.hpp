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
#include "team/nn/tensor.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace team::corpus {

inline ArgumentExample to_example(const RawRecord& r) {
  ArgumentExample ex;
  ex.target = r.target;
  ex.tokens = tokenize(r.sentence, TokenizeMode::encoder);
  ex.label = *label_from_annotation(r.annotation);
  ex.split = r.split;
  return ex;
}

inline std::vector<ArgumentExample> to_examples(const std::vector<RawRecord>& records) {
  std::vector<ArgumentExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(to_example(r));
  return out;
}

/// Targets in order of first appearance.
inline std::vector<TargetId> targets_of(const std::vector<RawRecord>& records) {
  std::vector<TargetId> out;
  std::set<TargetId> seen;
  for (const auto& r : records)
    if (seen.insert(r.target).second) out.push_back(r.target);
  return out;
}

/// Per-target and per-label counts.
struct CorpusStats {
  std::size_t total = 0;
  std::array<std::size_t, kNumLabels> per_label{};
  std::map<TargetId, std::array<std::size_t, kNumLabels>> per_target_label;
  std::map<TargetId, std::size_t> per_target;
};

inline CorpusStats corpus_stats(const std::vector<RawRecord>& records) {
  CorpusStats s;
  for (const auto& r : records) {
    const std::size_t l = index_of(*label_from_annotation(r.annotation));
    ++s.total;
    ++s.per_label[l];
    ++s.per_target[r.target];
    ++s.per_target_label[r.target][l];
  }
  return s;
}

/// k-fold in-target protocol. Fold i tests on slice i, validates on slice
/// (i+1) mod k and trains on the rest; with k == 2 the validation list is empty.
inline std::vector<DatasetSplit> make_in_target_folds(const std::vector<ArgumentExample>& examples,
                                                      std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_in_target_folds: k must be >= 2");
  if (examples.size() < k)
    throw std::invalid_argument("make_in_target_folds: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(examples.size()) + " examples");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  nn::Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  // The first (n mod k) slices get one extra example.
  std::vector<std::vector<std::size_t>> slices(k);
  const std::size_t base = examples.size() / k, extra = examples.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    slices[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                     order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }

  std::vector<DatasetSplit> splits(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t val = k > 2 ? (f + 1) % k : k;
    for (std::size_t s = 0; s < k; ++s) {
      auto& dst = s == f ? splits[f].test : s == val ? splits[f].val : splits[f].train;
      for (std::size_t i : slices[s]) dst.push_back(examples[i]);
    }
  }
  return splits;
}

/// Leave-one-target-out: train/val tags of the other targets, test tag of the
/// held-out one.
inline DatasetSplit make_cross_target_split(const std::vector<RawRecord>& records,
                                            const TargetId& held_out) {
  const bool known = std::any_of(records.begin(), records.end(),
                                 [&](const RawRecord& r) { return r.target == held_out; });
  if (!known) throw CorpusError("unknown target '" + held_out.str() + "'");
  DatasetSplit split;
  split.held_out_target = held_out;
  for (const auto& r : records) {
    if (r.target == held_out) {
      if (r.split == SplitTag::test) split.test.push_back(to_example(r));
    } else if (r.split == SplitTag::train) {
      split.train.push_back(to_example(r));
    } else if (r.split == SplitTag::val) {
      split.val.push_back(to_example(r));
    }
  }
  return split;
}

/// Throws if the held-out target leaks into train or val.
inline void assert_no_leakage(const DatasetSplit& split) {
  if (!split.held_out_target) return;
  for (const auto* part : {&split.train, &split.val})
    for (const auto& ex : *part)
      if (ex.target == *split.held_out_target)
        throw std::logic_error("held-out target '" + split.held_out_target->str() +
                               "' present in training data");
}

/// One line per example: target, label, role, space-joined tokens.
inline void write_split(std::ostream& os, const DatasetSplit& split) {
  auto dump = [&](const std::vector<ArgumentExample>& xs, const char* role) {
    for (const auto& ex : xs) {
      os << ex.target.str() << '\t' << to_string(ex.label) << '\t' << role << '\t';
      for (std::size_t i = 0; i < ex.tokens.size(); ++i) os << (i ? " " : "") << ex.tokens[i];
      os << '\n';
    }
  };
  dump(split.train, "train");
  dump(split.val, "val");
  dump(split.test, "test");
}

}  // namespace team::corpus

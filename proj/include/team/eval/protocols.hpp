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

// In-target k-fold and cross-target leave-one-out protocol runners. The
// model is abstracted as a callback that trains on a split and predicts its
// test slice, so reference predictors can be plugged in.

#include "team/corpus/splits.hpp"
#include "team/corpus/types.hpp"
#include "team/eval/metrics.hpp"

#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace team::eval {

struct RunContext {
  std::string name;       // "fold3" or the held-out target
  std::uint64_t seed = 0;  // derived per run
};

/// Trains on split.train (optionally split.val) and returns one prediction
/// per split.test example.
using TrainAndPredict =
    std::function<std::vector<Label>(const corpus::DatasetSplit& split, const RunContext& ctx)>;

struct ProtocolReport {
  std::vector<std::pair<std::string, MetricReport>> runs;
  MetricReport mean;
};

namespace detail {
inline MetricReport score_run(const corpus::DatasetSplit& split, const RunContext& ctx,
                              const TrainAndPredict& model) {
  auto pred = model(split, ctx);
  if (pred.size() != split.test.size())
    throw std::runtime_error(ctx.name + ": model returned " + std::to_string(pred.size()) +
                             " predictions for " + std::to_string(split.test.size()) +
                             " test examples");
  std::vector<Label> gold;
  for (const auto& ex : split.test) gold.push_back(ex.label);
  return metric_report(confusion(gold, pred));
}

inline void finish(ProtocolReport& r) {
  std::vector<MetricReport> all;
  for (const auto& [_, m] : r.runs) all.push_back(m);
  r.mean = mean_report(all);
}
}  // namespace detail

inline ProtocolReport run_in_target(const std::vector<corpus::ArgumentExample>& examples,
                                    const TrainAndPredict& model, std::size_t k = 10,
                                    std::uint64_t seed = 0) {
  ProtocolReport r;
  const auto folds = corpus::make_in_target_folds(examples, k, seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    RunContext ctx{"fold" + std::to_string(f), seed * 1000003ULL + f};
    r.runs.emplace_back(ctx.name, detail::score_run(folds[f], ctx, model));
  }
  detail::finish(r);
  return r;
}

/// One run per target in `targets` (all targets when empty).
inline ProtocolReport run_cross_target(const std::vector<corpus::RawRecord>& records,
                                       const TrainAndPredict& model,
                                       std::vector<corpus::TargetId> targets = {},
                                       std::uint64_t seed = 0) {
  if (targets.empty()) targets = corpus::targets_of(records);
  ProtocolReport r;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto split = corpus::make_cross_target_split(records, targets[i]);
    corpus::assert_no_leakage(split);
    RunContext ctx{targets[i].str(), seed * 1000003ULL + i};
    r.runs.emplace_back(ctx.name, detail::score_run(split, ctx, model));
  }
  detail::finish(r);
  return r;
}

/// One row per run followed by a "mean" row.
inline void write_protocol_csv(std::ostream& os, const ProtocolReport& r) {
  write_report_header(os);
  for (const auto& [name, m] : r.runs) write_report_row(os, name, m);
  write_report_row(os, "mean", r.mean);
}

/// Predicts the gold label; checks the harness end to end.
inline TrainAndPredict oracle_predictor() {
  return [](const corpus::DatasetSplit& s, const RunContext&) {
    std::vector<Label> out;
    for (const auto& ex : s.test) out.push_back(ex.label);
    return out;
  };
}

/// Predicts the most frequent training label (ties to the earlier label).
inline TrainAndPredict majority_predictor() {
  return [](const corpus::DatasetSplit& s, const RunContext&) {
    std::array<std::size_t, kNumLabels> counts{};
    for (const auto& ex : s.train) ++counts[corpus::index_of(ex.label)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumLabels; ++c)
      if (counts[c] > counts[best]) best = c;
    return std::vector<Label>(s.test.size(), corpus::label_from_index(best));
  };
}

}  // namespace team::eval

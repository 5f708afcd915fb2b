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

// Confusion matrices and macro-averaged classification metrics.

#include "team/corpus/types.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace team::eval {

using corpus::kNumLabels;
using corpus::Label;

/// Rows are gold labels, columns predictions, both in (support, oppose, none) order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels> counts{};

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const Label> gold, std::span<const Label> pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("confusion: " + std::to_string(gold.size()) + " gold labels vs " +
                                std::to_string(pred.size()) + " predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.counts[corpus::index_of(gold[i])][corpus::index_of(pred[i])];
  return cm;
}

struct MetricReport {
  double macro_f1 = 0.0;
  double precision_support = 0.0;
  double precision_oppose = 0.0;
  double recall_support = 0.0;
  double recall_oppose = 0.0;
  std::array<double, kNumLabels> f1{};
  bool operator==(const MetricReport&) const = default;
};

namespace detail {
inline double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace detail

inline MetricReport metric_report(const ConfusionMatrix& cm) {
  std::array<double, kNumLabels> precision{}, recall{};
  MetricReport r;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    double tp = static_cast<double>(cm.counts[c][c]), predicted = 0.0, gold = 0.0;
    for (std::size_t o = 0; o < kNumLabels; ++o) {
      predicted += static_cast<double>(cm.counts[o][c]);
      gold += static_cast<double>(cm.counts[c][o]);
    }
    precision[c] = detail::ratio(tp, predicted);
    recall[c] = detail::ratio(tp, gold);
    r.f1[c] = detail::ratio(2.0 * precision[c] * recall[c], precision[c] + recall[c]);
  }
  r.macro_f1 = (r.f1[0] + r.f1[1] + r.f1[2]) / 3.0;
  r.precision_support = precision[0];
  r.recall_support = recall[0];
  r.precision_oppose = precision[1];
  r.recall_oppose = recall[1];
  return r;
}

inline double macro_f1(std::span<const Label> gold, std::span<const Label> pred) {
  return metric_report(confusion(gold, pred)).macro_f1;
}

/// Arithmetic mean of every field.
inline MetricReport mean_report(std::span<const MetricReport> reports) {
  MetricReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.macro_f1 += r.macro_f1;
    m.precision_support += r.precision_support;
    m.precision_oppose += r.precision_oppose;
    m.recall_support += r.recall_support;
    m.recall_oppose += r.recall_oppose;
    for (std::size_t c = 0; c < kNumLabels; ++c) m.f1[c] += r.f1[c];
  }
  const auto n = static_cast<double>(reports.size());
  m.macro_f1 /= n;
  m.precision_support /= n;
  m.precision_oppose /= n;
  m.recall_support /= n;
  m.recall_oppose /= n;
  for (auto& f : m.f1) f /= n;
  return m;
}

inline void write_report_header(std::ostream& os) {
  os << "run,macro_f1,precision_support,recall_support,precision_oppose,recall_oppose,"
        "f1_support,f1_oppose,f1_none\n";
}

inline void write_report_row(std::ostream& os, const std::string& run, const MetricReport& r) {
  const auto old = os.precision(10);
  os << run << ',' << r.macro_f1 << ',' << r.precision_support << ',' << r.recall_support << ','
     << r.precision_oppose << ',' << r.recall_oppose << ',' << r.f1[0] << ',' << r.f1[1] << ','
     << r.f1[2] << '\n';
  os.precision(old);
}

}  // namespace team::eval

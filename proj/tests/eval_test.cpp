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

#include "team/eval/coherence.hpp"
#include "team/eval/metrics.hpp"
#include "team/eval/protocols.hpp"
#include "team/nn/tensor.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace team;
using namespace team::eval;
using corpus::Label;
using testkit::brute_force_report;

namespace {

constexpr Label S = Label::support, O = Label::oppose, N = Label::none;

std::vector<corpus::RawRecord> small_corpus() {
  // Four targets, sets cycling train/train/val/test, labels cycling s/o/n.
  std::vector<corpus::RawRecord> out;
  const char* ann[] = {"Argument_for", "Argument_against", "NoArgument"};
  const corpus::SplitTag tags[] = {corpus::SplitTag::train, corpus::SplitTag::train,
                                   corpus::SplitTag::val, corpus::SplitTag::test};
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 12; ++i) {
      corpus::RawRecord r;
      r.target_name = "target " + std::to_string(t);
      r.target = corpus::TargetId(r.target_name);
      r.sentence = "sentence " + std::to_string(i) + " about topic " + std::to_string(t);
      r.annotation = ann[(i + t) % 3];
      r.split = tags[i % 4];
      out.push_back(r);
    }
  return out;
}

}  // namespace

TEST(Confusion, Examples) {
  std::vector<Label> g = {S, O, N, N};
  auto diag = confusion(g, g);
  EXPECT_EQ(diag.counts[0][0], 1u);
  EXPECT_EQ(diag.counts[2][2], 2u);
  EXPECT_EQ(diag.total(), 4u);
  EXPECT_EQ(confusion(std::vector<Label>{}, std::vector<Label>{}).total(), 0u);
  auto one = confusion(std::vector<Label>{S}, std::vector<Label>{O});
  EXPECT_EQ(one.counts[0][1], 1u);
  EXPECT_EQ(one.total(), 1u);
  EXPECT_THROW(confusion(std::vector<Label>{S}, std::vector<Label>{}), std::invalid_argument);
}

TEST(MetricReport, HandComputedFourExampleCase) {
  std::vector<Label> gold = {S, S, O, N}, pred = {S, O, O, N};
  auto r = metric_report(confusion(gold, pred));
  EXPECT_EQ(r.precision_support, 1.0);
  EXPECT_EQ(r.recall_support, 0.5);
  EXPECT_EQ(r.precision_oppose, 0.5);
  EXPECT_EQ(r.recall_oppose, 1.0);
  EXPECT_NEAR(r.macro_f1, 7.0 / 9.0, 1e-15);
}

TEST(MetricReport, PerfectAndAbsentClasses) {
  std::vector<Label> g = {S, O, N, S};
  auto perfect = metric_report(confusion(g, g));
  EXPECT_EQ(perfect.macro_f1, 1.0);
  EXPECT_EQ(perfect.precision_oppose, 1.0);
  // "none" never gold and never predicted: contributes 0.
  std::vector<Label> g2 = {S, O}, p2 = {S, O};
  EXPECT_NEAR(metric_report(confusion(g2, p2)).macro_f1, 2.0 / 3.0, 1e-15);
}

TEST(MetricReport, MatchesBruteForceOnRandomMatrices) {
  nn::Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Label> gold, pred;
    const std::size_t n = rng.index(30);
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(corpus::label_from_index(rng.index(3)));
      pred.push_back(corpus::label_from_index(rng.index(3)));
    }
    auto got = metric_report(confusion(gold, pred));
    auto want = brute_force_report(gold, pred);
    EXPECT_NEAR(got.macro_f1, want.macro_f1, 1e-12) << trial;
    EXPECT_NEAR(got.precision_support, want.precision_support, 1e-12);
    EXPECT_NEAR(got.recall_oppose, want.recall_oppose, 1e-12);
    for (double v : {got.macro_f1, got.precision_support, got.precision_oppose, got.recall_support,
                     got.recall_oppose}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    // Example order does not matter.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    std::vector<Label> g2, p2;
    for (auto i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    EXPECT_EQ(metric_report(confusion(g2, p2)), got);
  }
}

TEST(MeanReport, AveragesFields) {
  MetricReport a, b;
  a.macro_f1 = 0.5;
  b.macro_f1 = 1.0;
  a.f1 = {1, 0, 0};
  std::vector<MetricReport> rs = {a, b};
  auto m = mean_report(rs);
  EXPECT_DOUBLE_EQ(m.macro_f1, 0.75);
  EXPECT_DOUBLE_EQ(m.f1[0], 0.5);
}

TEST(Protocols, OracleScoresPerfectly) {
  auto records = small_corpus();
  auto in = run_in_target(corpus::to_examples(records), oracle_predictor(), 4, 1);
  EXPECT_EQ(in.runs.size(), 4u);
  EXPECT_EQ(in.mean.macro_f1, 1.0);
  auto cross = run_cross_target(records, oracle_predictor());
  EXPECT_EQ(cross.runs.size(), 4u);
  EXPECT_EQ(cross.mean.macro_f1, 1.0);
}

TEST(Protocols, MajorityPredictorMatchesHandComputation) {
  auto examples = corpus::to_examples(small_corpus());
  auto folds = corpus::make_in_target_folds(examples, 4, 9);
  double expect = 0.0;
  for (const auto& f : folds) {
    std::array<int, 3> train{}, test{};
    for (const auto& ex : f.train) ++train[corpus::index_of(ex.label)];
    for (const auto& ex : f.test) ++test[corpus::index_of(ex.label)];
    int maj = 0;
    for (int c = 1; c < 3; ++c)
      if (train[c] > train[maj]) maj = c;
    const double p = double(test[maj]) / f.test.size();
    expect += (test[maj] ? 2 * p / (1 + p) : 0.0) / 3.0;
  }
  expect /= folds.size();
  auto r = run_in_target(examples, majority_predictor(), 4, 9);
  EXPECT_NEAR(r.mean.macro_f1, expect, 1e-12);
}

TEST(Protocols, CrossTargetNeverTrainsOnHeldOutTarget) {
  auto records = small_corpus();
  std::set<std::string> seen;
  auto spy = [&](const corpus::DatasetSplit& s, const RunContext& ctx) {
    seen.insert(ctx.name);
    for (const auto* part : {&s.train, &s.val})
      for (const auto& ex : *part) EXPECT_NE(ex.target.str(), ctx.name);
    for (const auto& ex : s.test) EXPECT_EQ(ex.target.str(), ctx.name);
    return std::vector<Label>(s.test.size(), N);
  };
  auto r = run_cross_target(records, spy);
  EXPECT_EQ(seen.size(), 4u);
  std::ostringstream os;
  write_protocol_csv(os, r);
  int lines = 0;
  for (char c : os.str()) lines += c == '\n';
  EXPECT_EQ(lines, 1 + 4 + 1);
}

TEST(Protocols, SeededRerunsAreByteIdentical) {
  auto examples = corpus::to_examples(small_corpus());
  auto csv = [&] {
    std::ostringstream os;
    write_protocol_csv(os, run_in_target(examples, majority_predictor(), 4, 3));
    return os.str();
  };
  EXPECT_EQ(csv(), csv());
}

TEST(Protocols, WrongPredictionCountIsAnError) {
  auto bad = [](const corpus::DatasetSplit&, const RunContext&) { return std::vector<Label>{}; };
  EXPECT_THROW(run_cross_target(small_corpus(), bad), std::runtime_error);
}

TEST(Npmi, PerfectCooccurrenceScoresOne) {
  std::vector<std::vector<std::string>> docs = {{"x", "a", "b", "y"}, {"z", "w"}, {"b", "q", "a"}, {"u"}};
  auto r = npmi({"a", "b"}, docs, 10, 2);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  EXPECT_TRUE(r.missing.empty());
}

TEST(Npmi, HandCountedTinyCorpus) {
  // Window 3 over: "a b c" (1 window), "a d" (short, 1 window), "b e e" (1 window).
  std::vector<std::vector<std::string>> docs = {{"a", "b", "c"}, {"a", "d"}, {"b", "e", "e"}};
  WindowCounts wc({"a", "b", "c"}, docs, 3);
  EXPECT_EQ(wc.windows(), 3u);
  EXPECT_EQ(wc.count(0), 2u);
  EXPECT_EQ(wc.joint(0, 1), 1u);
  const double pab = 1.0 / 3 + 1e-12, pa = 2.0 / 3, pb = 2.0 / 3;
  EXPECT_NEAR(wc.npmi(0, 1), std::log(pab / (pa * pb)) / -std::log(pab), 1e-9);
  EXPECT_NEAR(wc.npmi(0, 1), std::log(0.75) / std::log(3.0), 1e-9);
  EXPECT_NEAR(wc.npmi(0, 1), wc.npmi(1, 0), 1e-15);
}

TEST(Npmi, SlidingWindowsOverLongDocument) {
  // Length 5, window 2 -> windows {a,b} {b,c} {c,a} {a,d}.
  WindowCounts wc({"a", "b", "c", "d"}, {{"a", "b", "c", "a", "d"}}, 2);
  EXPECT_EQ(wc.windows(), 4u);
  EXPECT_EQ(wc.count(0), 3u);
  EXPECT_EQ(wc.joint(0, 2), 1u);
  EXPECT_EQ(wc.joint(1, 3), 0u);
}

TEST(Npmi, IndependentWordsScoreNearZero) {
  nn::Rng rng(5);
  std::vector<std::vector<std::string>> docs;
  for (int d = 0; d < 100000; ++d) {
    std::vector<std::string> doc(10, "filler");
    if (rng.uniform(0.0, 1.0) < 0.3) doc[rng.index(5)] = "alpha";
    if (rng.uniform(0.0, 1.0) < 0.4) doc[5 + rng.index(5)] = "beta";
    docs.push_back(std::move(doc));
  }
  WindowCounts wc({"alpha", "beta"}, docs, 10);
  EXPECT_EQ(wc.windows(), 100000u);
  EXPECT_NEAR(wc.npmi(0, 1), 0.0, 0.05);
}

TEST(Npmi, MissingWordsAreFlaggedAndBounded) {
  std::vector<std::vector<std::string>> docs = {{"a", "b"}, {"a", "c"}};
  auto r = npmi({"a", "b", "zzz"}, docs, 10, 3);
  EXPECT_EQ(r.missing, (std::vector<std::string>{"zzz"}));
  EXPECT_GE(r.value, -1.0);
  EXPECT_LE(r.value, 1.0);
  EXPECT_THROW(npmi({"a"}, docs, 10, 2), std::out_of_range);
  EXPECT_THROW(WindowCounts({"a"}, docs, 0), std::invalid_argument);
}

TEST(Coherence, ReportAtDefaultCutoffs) {
  nn::Rng rng(6);
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
  std::vector<std::vector<std::string>> docs;
  for (int d = 0; d < 300; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 12; ++i) doc.push_back(words[rng.index(20)]);
    docs.push_back(doc);
  }
  std::vector<std::vector<std::string>> topics = {words, std::vector<std::string>(words.begin(), words.begin() + 12)};
  auto r = coherence_report(topics, docs);
  ASSERT_EQ(r.per_topic.size(), 2u);
  EXPECT_NEAR(r.per_topic[0][1], npmi(words, docs, 10, 10).value, 1e-15);
  EXPECT_TRUE(std::isnan(r.per_topic[1][2]));
  EXPECT_NEAR(r.average[0], (r.per_topic[0][0] + r.per_topic[1][0]) / 2, 1e-15);
  EXPECT_NEAR(r.average[3], r.per_topic[0][3], 1e-15);
  for (const auto& row : r.per_topic)
    for (double v : row)
      if (!std::isnan(v)) {
        EXPECT_TRUE(v >= -1.0 && v <= 1.0);
      }
  std::ostringstream os;
  write_coherence_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "topic,npmi@5,npmi@10,npmi@15,npmi@20,missing");
}

TEST(Coherence, ReadsTopicWordExport) {
  const auto path = std::filesystem::temp_directory_path() / "team_topics.tsv";
  {
    std::ofstream os(path);
    os << "topic\tword\tweight\n0\ta\t0.1\n0\tb\t0.9\n1\tc\t0.5\n0\tc\t0.5\n";
  }
  auto topics = read_topic_word_tsv(path, 2);
  ASSERT_EQ(topics.size(), 2u);
  EXPECT_EQ(topics[0], (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(topics[1], (std::vector<std::string>{"c"}));
  {
    std::ofstream os(path);
    os << "bad header\n";
  }
  EXPECT_THROW(read_topic_word_tsv(path), std::runtime_error);
  std::filesystem::remove(path);
}

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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Criterion 9 needs the real corpus: point
// TEAM_UKP_DATA at the directory (or file) of UKP ArgMin TSVs.

#include "team/team.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace team;
using nn::Matrix;
using nn::Vector;

namespace {

struct Outcome {
  enum Status { pass, fail, skip } status;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

int failures = 0;

void run(int id, const std::string& title, double budget_seconds, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {Outcome::fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status != Outcome::skip && secs > budget_seconds) {
    o.status = Outcome::fail;
    o.detail += "; over time budget of " + fmt(budget_seconds) + " s";
  }
  const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
  failures += o.status == Outcome::fail;
  std::cout << tag << " criterion " << id << " (" << title << "): " << o.detail << " [" << fmt(secs, 3) << " s]"
            << std::endl;
}

Vector random_simplex(nn::Rng& rng, std::size_t k) {
  Vector v(static_cast<Eigen::Index>(k));
  for (auto& x : v) x = -std::log(rng.uniform(1e-9, 1.0));
  return v / v.sum();
}

// ---------------------------------------------------------------- 1

Outcome gradients() {
  constexpr std::size_t V = 50, K = 5, H = 16, DH = 32;
  double worst = 0.0;
  bool ok = true;
  auto record = [&](const nn::GradCheckReport& r) {
    worst = std::max(worst, r.max_relative_error);
    ok = ok && r.passed;
  };

  // (a) topic-model objective
  ntm::NtmConfig nc;
  nc.vocab_size = V;
  nc.num_topics = K;
  nc.latent_dim = H;
  nc.hidden_dim = H;
  auto pc = testkit::make_planted_corpus(V, K, 4, 20, 0.5, 3);
  ntm::NeuralTopicModel ntm_model(nc, ntm::compute_log_freq(pc.bows), 5);
  std::vector<const corpus::BowVector*> docs;
  for (const auto& b : pc.bows) docs.push_back(&b);
  nn::Rng rng(6);
  std::vector<Matrix> noise{ntm_model.draw_noise(docs.size(), rng)};
  record(nn::grad_check(
      ntm_model.params(),
      [&](bool with_gradient) {
        nn::Tape tape;
        auto f = ntm_model.forward(tape, docs, noise, 1.0);
        if (with_gradient) {
          ntm_model.params().zero_grad();
          tape.backward(f.objective);
        }
        return tape.item(f.objective);
      },
      200, 1e-4, 7));

  // (b) encoder + classifier cross-entropy, (c) with gamma * (1 - O) through the projection
  auto vocab = testkit::numbered_vocab(V);
  encoder::EncoderConfig ec;
  ec.vocab_size = V;
  ec.embed_dim = 8;
  ec.hidden_dim = DH;
  encoder::ArgumentEncoder enc(ec, 8);
  mutual::ProjectionHead head(DH, K, 9);
  std::vector<encoder::EncoderInput> inputs;
  std::vector<corpus::Label> gold;
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<std::string> sent, tgt{"w" + std::to_string(4 + i)}, top;
    for (std::size_t j = 0; j < 4 + i; ++j) sent.push_back("w" + std::to_string(rng.index(V)));
    for (std::size_t j = 0; j < i % 3; ++j) top.push_back("w" + std::to_string(rng.index(V)));
    inputs.push_back(encoder::build_input(sent, tgt, top, vocab));
    gold.push_back(corpus::label_from_index(i % 3));
  }
  std::vector<const encoder::EncoderInput*> batch;
  for (const auto& in : inputs) batch.push_back(&in);
  Matrix z(4, static_cast<Eigen::Index>(K));
  for (int r = 0; r < 4; ++r) z.row(r) = random_simplex(rng, K).transpose();

  auto loss_fn = [&](bool mutual_term) {
    return [&, mutual_term](bool with_gradient) {
      nn::Tape tape;
      nn::Var h = enc.encode(tape, batch);
      nn::Var l = encoder::cross_entropy_loss(enc.logits(tape, h), gold);
      if (mutual_term)
        l = nn::add(l, nn::scale(mutual::mutual_term(head.project(tape, h), tape.constant(z)), 0.1));
      if (with_gradient) {
        enc.params().zero_grad();
        head.params().zero_grad();
        tape.backward(l);
      }
      return tape.item(l);
    };
  };
  record(nn::grad_check(enc.params(), loss_fn(false), 200, 1e-4, 10));
  record(nn::grad_check(enc.params(), loss_fn(true), 200, 1e-4, 11));
  record(nn::grad_check(head.params(), loss_fn(true), 200, 1e-4, 12));
  return check(ok, "max relative error " + fmt(worst) + " over 4 checks of 200 coordinates (tolerance 1e-4)");
}

// ---------------------------------------------------------------- 2

Outcome planted_topics() {
  auto pc = testkit::make_planted_corpus(200, 5, 2000, 50, 0.1, 11, 0.8);
  ntm::NtmConfig cfg;
  cfg.vocab_size = 200;
  cfg.num_topics = 5;
  ntm::NeuralTopicModel m(cfg, ntm::compute_log_freq(pc.bows), 1);
  nn::Optimizer opt({nn::OptimizerKind::adam, 3e-3});
  nn::Rng rng(101);
  std::vector<double> neg_elbo;
  for (std::size_t e = 0; e < 45; ++e)
    neg_elbo.push_back(ntm::train_ntm_epoch(m, pc.bows, opt, 32, rng, ntm::kl_warmup_weight(e, 10)).neg_elbo);
  std::vector<std::vector<corpus::WordId>> learned;
  for (std::size_t k = 0; k < 5; ++k) learned.push_back(m.top_words(k, 10));
  const double overlap = testkit::greedy_mean_overlap(learned, pc.planted_top);
  const auto windows = testkit::window_means3(neg_elbo);
  std::size_t rises = 0;
  for (std::size_t i = 1; i < windows.size(); ++i) rises += windows[i] > windows[i - 1];
  return check(overlap >= 6.0 && rises == 0, "mean overlap " + fmt(overlap) + "/10, " + std::to_string(rises) +
                                                 " increases across " + std::to_string(windows.size()) +
                                                 " three-epoch window means");
}

// ---------------------------------------------------------------- 3

Outcome topic_extraction() {
  nn::Rng rng(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t K = 1 + rng.index(5), V = 2 + rng.index(40);
    Matrix T(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
    for (Eigen::Index i = 0; i < T.size(); ++i) T.data()[i] = static_cast<double>(static_cast<int>(rng.index(7)) - 3);
    std::set<std::size_t> masked;
    const std::size_t n_masked = rng.index(V);
    while (masked.size() < n_masked) masked.insert(rng.index(V));
    const std::size_t n = 1 + rng.index(V - masked.size());
    auto mask = testkit::mask_columns(K, V, masked);
    auto lists = topics::filter_topics(T, mask, n);
    for (std::size_t k = 0; k < K; ++k)
      mismatches += testkit::ids_of(lists.lists[k]) != testkit::brute_force_top(T, mask, static_cast<Eigen::Index>(k), n);
  }

  // Real masks from target tokens: no extracted term may be a target token.
  int collisions = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t V = 30, K = 4;
    auto vocab = testkit::numbered_vocab(V);
    std::vector<std::string> target{"w" + std::to_string(rng.index(V)), "w" + std::to_string(rng.index(V))};
    Matrix T = rng.normal_matrix(K, V);
    for (const auto& w : target) T.col(*vocab.id(w)).array() += 10.0;  // target words dominate every topic
    auto lists = topics::filter_topics(T, topics::build_target_mask(target, vocab, K), 5);
    auto got = topics::extract_topics(lists, vocab, topics::EmbeddingTable(vocab.words(), rng.normal_matrix(V, 6)),
                                      target, 0.5);
    for (const auto& w : got.words) collisions += std::find(target.begin(), target.end(), w) != target.end();
  }

  // Constructed nearest neighbour: one topic's words sit close to the target vectors.
  int hits = 0;
  const std::size_t K = 6, N = 10, d = 24, V = 200;
  for (int trial = 0; trial < 100; ++trial) {
    nn::Rng r(1000 + static_cast<std::uint64_t>(trial));
    auto vocab = testkit::numbered_vocab(V);
    Matrix E = r.normal_matrix(V, d);
    const std::size_t chosen = r.index(K);
    topics::KeyTermLists lists;
    std::size_t next = 2;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<topics::KeyTerm> list;
      for (std::size_t i = 0; i < N; ++i, ++next) {
        if (k == chosen)
          E.row(static_cast<Eigen::Index>(next)) =
              E.row(static_cast<Eigen::Index>(i % 2)) + 0.2 * r.normal_matrix(1, static_cast<Eigen::Index>(d));
        list.push_back({static_cast<corpus::WordId>(next), 1.0 / static_cast<double>(i + 1)});
      }
      lists.lists.push_back(list);
    }
    hits += topics::extract_topics(lists, vocab, topics::EmbeddingTable(vocab.words(), E), {"w0", "w1"}, 0.5)
                .topic_index == chosen;
  }
  return check(mismatches == 0 && collisions == 0 && hits == 100,
               std::to_string(mismatches) + " oracle mismatches in 1000 instances, " + std::to_string(collisions) +
                   " target-token collisions, nearest topic chosen " + std::to_string(hits) + "/100");
}

// ---------------------------------------------------------------- 4

Outcome mutual_algebra() {
  nn::Rng rng(3);
  double self_err = 0.0, sym_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector u = random_simplex(rng, 7), z = random_simplex(rng, 7);
    self_err = std::max(self_err, std::abs(mutual::similarity_O(nn::as_span(u), nn::as_span(u)) - 1.0));
    sym_err = std::max(sym_err, std::abs(mutual::similarity_O(nn::as_span(u), nn::as_span(z)) -
                                         mutual::similarity_O(nn::as_span(z), nn::as_span(u))));
  }
  // (a, 1-a) against (1-a, a) has both KLs equal to (2a-1) ln(a/(1-a)); solve for 1.
  double lo = 0.5 + 1e-9, hi = 1.0 - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((2 * mid - 1) * std::log(mid / (1 - mid)) < 1.0 ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  const std::vector<double> u{a, 1 - a}, z{1 - a, a};
  const double unit = mutual::similarity_O(u, z, 0.0);

  int not_decreasing = 0;
  for (int i = 0; i < 100; ++i) {
    const Vector uu = random_simplex(rng, 6), zz = random_simplex(rng, 6);
    double prev = mutual::mutual_loss({{uu, zz}});
    for (int s = 1; s <= 20; ++s) {
      const double t = s / 20.0;
      const double cur = mutual::mutual_loss({{uu, Vector((1 - t) * zz + t * uu)}});
      not_decreasing += !(cur < prev);
      prev = cur;
    }
  }
  return check(self_err <= 1e-9 && sym_err <= 1e-12 && std::abs(unit - 2.0 / 3.0) <= 1e-6 && not_decreasing == 0,
               "|O(u,u)-1| " + fmt(self_err) + ", asymmetry " + fmt(sym_err) + ", A=B=1 gives " + fmt(unit, 10) +
                   ", " + std::to_string(not_decreasing) + " non-decreasing steps on 100 mixture paths");
}

// ---------------------------------------------------------------- 5, 6

mutual::TeamConfig small_team_config(std::uint64_t seed) {
  mutual::TeamConfig c;
  c.num_topics = 4;
  c.latent_dim = 8;
  c.ntm_hidden_dim = 16;
  c.embed_dim = 12;
  c.hidden_dim = 16;
  c.topic_terms = 5;
  c.classifier_learning_rate = 1e-2;
  c.schedule.max_iterations = 3;
  c.schedule.seed = seed;
  return c;
}

std::pair<std::vector<corpus::ArgumentExample>, std::vector<corpus::ArgumentExample>> stance_data(
    std::size_t per_target, std::uint64_t seed) {
  std::vector<corpus::ArgumentExample> train, held_out;
  for (const auto& ex : corpus::to_examples(testkit::make_stance_corpus({"solar power", "school uniforms"}, per_target, seed)))
    (ex.split == corpus::SplitTag::train ? train : held_out).push_back(ex);
  return {train, held_out};
}

Outcome ablations() {
  auto [train, val] = stance_data(60, 5);
  auto on = small_team_config(21), off = small_team_config(21);
  on.mutual.gamma = 0.0;
  off.mutual_enabled = false;
  auto a = mutual::TeamModel::from_examples(on, train), b = mutual::TeamModel::from_examples(off, train);
  auto ra = mutual::train_alternating(a, train, val), rb = mutual::train_alternating(b, train, val);
  bool same = a.ntm().params() == b.ntm().params() && a.encoder().params() == b.encoder().params() &&
              ra.history.size() == rb.history.size();
  for (std::size_t i = 0; same && i < ra.history.size(); ++i)
    same = ra.history[i].elbo == rb.history[i].elbo && ra.history[i].kl == rb.history[i].kl &&
           ra.history[i].cross_entropy == rb.history[i].cross_entropy;

  auto nt = small_team_config(22);
  nt.use_topics = false;
  auto m = mutual::TeamModel::from_examples(nt, train);
  mutual::train_alternating(m, train, val);
  std::size_t other = 0;
  for (const auto& in : m.inputs_for(train)) other += in.segment_count() != 2;
  return check(same && other == 0, std::string(same ? "gamma=0 trajectories bitwise equal to disabled runs"
                                                    : "gamma=0 trajectories differ from disabled runs") +
                                       ", " + std::to_string(other) + " no-topics inputs without exactly 2 segments");
}

Outcome end_to_end() {
  auto [train, held_out] = stance_data(150, 7);
  auto c = small_team_config(33);
  c.schedule.classifier_epochs_per_iteration = 5;
  auto m = mutual::TeamModel::from_examples(c, train);
  mutual::train_alternating(m, train);
  std::vector<corpus::Label> gt, gv;
  for (const auto& ex : train) gt.push_back(ex.label);
  for (const auto& ex : held_out) gv.push_back(ex.label);
  const double f_train = eval::macro_f1(gt, m.predict_labels(train));
  const double f_val = eval::macro_f1(gv, m.predict_labels(held_out));
  return check(f_train >= 0.95 && f_val >= 0.80,
               "training macro F1 " + fmt(f_train) + " on " + std::to_string(train.size()) +
                   " sentences, held-out macro F1 " + fmt(f_val) + " on " + std::to_string(held_out.size()));
}

// ---------------------------------------------------------------- 7

Outcome metrics() {
  using corpus::Label;
  const std::vector<Label> gold{Label::support, Label::support, Label::oppose, Label::none};
  const std::vector<Label> pred{Label::support, Label::oppose, Label::oppose, Label::none};
  const auto hand = eval::metric_report(eval::confusion(gold, pred));
  // The hand computation, carried out in doubles: per-class F1 then the mean.
  const double f1_support = 2 * 1.0 * 0.5 / (1.0 + 0.5), f1_oppose = 2 * 0.5 * 1.0 / (0.5 + 1.0);
  const double by_hand = (f1_support + f1_oppose + 1.0) / 3;
  const bool exact = hand.precision_support == 1.0 && hand.recall_support == 0.5 && hand.precision_oppose == 0.5 &&
                     hand.recall_oppose == 1.0 && hand.macro_f1 == by_hand;
  const double ulps = std::abs(hand.macro_f1 - 7.0 / 9.0) / (std::nextafter(7.0 / 9.0, 1.0) - 7.0 / 9.0);
  nn::Rng rng(77);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Label> g, p;
    const std::size_t n = rng.index(40);
    for (std::size_t i = 0; i < n; ++i) {
      g.push_back(corpus::label_from_index(rng.index(3)));
      p.push_back(corpus::label_from_index(rng.index(3)));
    }
    const auto got = eval::metric_report(eval::confusion(g, p)), want = testkit::brute_force_report(g, p);
    bool ok = std::abs(got.macro_f1 - want.macro_f1) <= 1e-12 &&
              std::abs(got.precision_support - want.precision_support) <= 1e-12 &&
              std::abs(got.precision_oppose - want.precision_oppose) <= 1e-12 &&
              std::abs(got.recall_support - want.recall_support) <= 1e-12 &&
              std::abs(got.recall_oppose - want.recall_oppose) <= 1e-12;
    mismatches += !ok;
  }
  return check(exact && mismatches == 0, "four-example macro F1 " + fmt(hand.macro_f1, 17) + " (" +
                                             (exact ? "equals" : "differs from") + " the hand computation, " +
                                             fmt(ulps, 2) + " ulp from the double nearest 7/9), " + std::to_string(mismatches) +
                                             " mismatches on 1000 random cases");
}

// ---------------------------------------------------------------- 8

Outcome protocols() {
  auto records = testkit::make_stance_corpus({"solar power", "school uniforms", "gun control", "cloning"}, 30, 9);
  // Leakage: a spy model inspects every split it is handed.
  std::size_t runs = 0, leaks = 0;
  eval::TrainAndPredict spy = [&](const corpus::DatasetSplit& s, const eval::RunContext&) {
    ++runs;
    for (const auto* part : {&s.train, &s.val})
      for (const auto& ex : *part) leaks += s.held_out_target && ex.target == *s.held_out_target;
    return std::vector<corpus::Label>(s.test.size(), corpus::Label::none);
  };
  eval::run_cross_target(records, spy);
  corpus::DatasetSplit leaky = corpus::make_cross_target_split(records, corpus::TargetId("cloning"));
  leaky.train.push_back(leaky.test.front());
  bool guard = false;
  try {
    corpus::assert_no_leakage(leaky);
  } catch (const std::logic_error&) {
    guard = true;
  }

  // Partition: tag every example with a unique token and count appearances.
  auto examples = corpus::to_examples(records);
  for (std::size_t i = 0; i < examples.size(); ++i) examples[i].tokens.push_back("id" + std::to_string(i));
  const auto folds = corpus::make_in_target_folds(examples, 10, 4);
  std::map<std::string, int> in_test;
  bool partitions = true;
  for (const auto& f : folds) {
    std::set<std::string> seen;
    for (const auto* part : {&f.train, &f.val, &f.test})
      for (const auto& ex : *part) partitions = seen.insert(ex.tokens.back()).second && partitions;
    partitions = partitions && seen.size() == examples.size();
    for (const auto& ex : f.test) ++in_test[ex.tokens.back()];
  }
  for (const auto& [_, n] : in_test) partitions = partitions && n == 1;
  partitions = partitions && in_test.size() == examples.size();

  // Reproducibility: full training runs, twice, for both protocols.
  auto cfg = small_team_config(41);
  cfg.schedule.max_iterations = 1;
  auto csv = [&](bool cross) {
    std::ostringstream os;
    eval::write_protocol_csv(os, cross ? eval::run_cross_target(records, mutual::team_trainer(cfg), {}, 5)
                                       : eval::run_in_target(corpus::to_examples(records), mutual::team_trainer(cfg), 10, 5));
    return os.str();
  };
  const bool repro = csv(true) == csv(true) && csv(false) == csv(false);
  return check(runs == 4 && leaks == 0 && guard && partitions && repro,
               std::to_string(runs) + " cross-target runs with " + std::to_string(leaks) + " leaked examples, guard " +
                   (guard ? "rejects" : "misses") + " a leaky split, folds " +
                   (partitions ? "partition" : "do not partition") + " the data, reruns " +
                   (repro ? "byte-identical" : "differ"));
}

// ---------------------------------------------------------------- 9

struct TargetCounts {
  const char* name;
  std::size_t none, support, oppose;
};

const std::vector<TargetCounts>& ukp_counts() {
  static const std::vector<TargetCounts> t = {
      {"abortion", 2427, 680, 822},           {"cloning", 1494, 706, 839},
      {"death penalty", 2083, 457, 1111},     {"gun control", 1889, 787, 665},
      {"marijuana legalization", 1262, 587, 626}, {"minimum wage", 1346, 576, 551},
      {"nuclear energy", 2118, 606, 852},     {"school uniforms", 1734, 545, 729}};
  return t;
}

std::string compare_counts(const corpus::CorpusStats& s) {
  std::string diff;
  auto expect = [&](const std::string& what, std::size_t got, std::size_t want) {
    if (got != want) diff += " " + what + "=" + std::to_string(got) + " (want " + std::to_string(want) + ")";
  };
  expect("total", s.total, 25492);
  expect("none", s.per_label[2], 14353);
  expect("support", s.per_label[0], 4944);
  expect("oppose", s.per_label[1], 6195);
  for (const auto& t : ukp_counts()) {
    const corpus::TargetId id(t.name);
    const auto it = s.per_target_label.find(id);
    const std::array<std::size_t, 3> got = it == s.per_target_label.end() ? std::array<std::size_t, 3>{} : it->second;
    expect(std::string(t.name) + "/none", got[2], t.none);
    expect(std::string(t.name) + "/support", got[0], t.support);
    expect(std::string(t.name) + "/oppose", got[1], t.oppose);
  }
  expect("targets", s.per_target.size(), 8);
  return diff;
}

Outcome corpus_counts() {
  // The counting path, checked on a synthetic file with the published counts.
  const auto path = std::filesystem::temp_directory_path() / "team_acceptance_replica.tsv";
  {
    std::ofstream os(path);
    os << "topic\tretrievedUrl\tarchivedUrl\tsentenceHash\tsentence\tannotation\tset\n";
    std::size_t line = 0;
    for (const auto& t : ukp_counts())
      for (auto [ann, n] : {std::pair{"NoArgument", t.none}, {"Argument_for", t.support}, {"Argument_against", t.oppose}})
        for (std::size_t i = 0; i < n; ++i, ++line)
          os << t.name << "\tu\ta\th" << line << "\tsentence " << line << '\t' << ann << '\t'
             << (line % 10 < 7 ? "train" : line % 10 < 8 ? "val" : "test") << '\n';
  }
  const std::string replica = compare_counts(corpus::corpus_stats(corpus::load_corpus(path).records));
  std::filesystem::remove(path);

  const char* data = std::getenv("TEAM_UKP_DATA");
  if (!data || !*data)
    return {replica.empty() ? Outcome::skip : Outcome::fail,
            "TEAM_UKP_DATA not set, genuine corpus not checked; counting path on a synthetic replica of the "
            "published counts: " +
                (replica.empty() ? std::string("exact") : "mismatch" + replica)};
  const auto loaded = corpus::load_corpus(data);
  const std::string diff = compare_counts(corpus::corpus_stats(loaded.records));
  return check(diff.empty() && replica.empty(),
               diff.empty() ? "25,492 examples; labels and all 8 targets match exactly" : "mismatch:" + diff);
}

// ---------------------------------------------------------------- 10

Outcome coherence() {
  const std::vector<std::vector<std::string>> perfect_docs = {{"x", "a", "b", "y"}, {"z", "w"}, {"b", "q", "a"}, {"u"}};
  const double perfect = eval::npmi({"a", "b"}, perfect_docs, 10, 2).value;

  nn::Rng rng(5);
  std::vector<std::vector<std::string>> docs;
  for (int d = 0; d < 100000; ++d) {
    std::vector<std::string> doc(10, "filler");
    if (rng.uniform(0.0, 1.0) < 0.3) doc[rng.index(5)] = "alpha";
    if (rng.uniform(0.0, 1.0) < 0.4) doc[5 + rng.index(5)] = "beta";
    docs.push_back(std::move(doc));
  }
  eval::WindowCounts wc({"alpha", "beta"}, docs, 10);
  const double independent = wc.npmi(0, 1);

  // Window 3: "a b c" and "b e e" are one window each, "a d" is a short document.
  // p(a) = p(b) = 2/3, p(a,b) = 1/3, so NPMI = ln(0.75) / ln(3).
  eval::WindowCounts tiny({"a", "b", "c"}, {{"a", "b", "c"}, {"a", "d"}, {"b", "e", "e"}}, 3);
  const double hand = std::log((1.0 / 3 + eval::kNpmiEpsilon) / (4.0 / 9)) / -std::log(1.0 / 3 + eval::kNpmiEpsilon);
  const double tiny_err = std::abs(tiny.npmi(0, 1) - hand);
  return check(std::abs(perfect - 1.0) <= 1e-6 && std::abs(independent) <= 0.05 && wc.windows() == 100000 &&
                   tiny_err <= 1e-9,
               "co-occurring pair " + fmt(perfect, 10) + ", independent pair " + fmt(independent) + " over " +
                   std::to_string(wc.windows()) + " windows, hand-counted error " + fmt(tiny_err));
}

}  // namespace

int main() {
  run(1, "gradient correctness", 120, gradients);
  run(2, "planted-topic recovery", 300, planted_topics);
  run(3, "topic extraction", 600, topic_extraction);
  run(4, "mutual-learning algebra", 600, mutual_algebra);
  run(5, "ablation consistency", 600, ablations);
  run(6, "end-to-end overfit", 300, end_to_end);
  run(7, "metric oracle", 600, metrics);
  run(8, "protocol integrity", 600, protocols);
  run(9, "corpus counts", 600, corpus_counts);
  run(10, "NPMI sanity", 600, coherence);
  std::cout << (failures == 0 ? "all criteria passed or skipped" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

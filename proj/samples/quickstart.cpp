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

// Trains a small model on generated arguments about two targets, then prints
// the learned topics, the topic picked for each target and a few predictions.

#include "team/team.hpp"

#include <iomanip>
#include <iostream>

using namespace team;

int main() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> pools = {
      {"nuclear energy", {"reactor", "uranium", "radiation", "plant", "waste", "carbon", "grid", "fuel"}},
      {"school uniforms", {"students", "dress", "clothing", "classroom", "parents", "code", "bullying", "identity"}}};
  const std::vector<std::vector<std::string>> cues = {
      {"benefits", "improves", "cheaper", "safer"}, {"dangerous", "harms", "expensive", "restricts"}, {"reported", "yesterday"}};
  const char* annotations[] = {"Argument_for", "Argument_against", "NoArgument"};

  // Deterministic toy corpus: content words from the target's pool plus stance cues.
  std::vector<corpus::RawRecord> records;
  nn::Rng rng(3);
  for (const auto& [target, pool] : pools)
    for (int i = 0; i < 60; ++i) {
      const std::size_t label = rng.index(3);
      corpus::RawRecord r;
      r.target = corpus::TargetId(target);
      r.target_name = target;
      r.annotation = annotations[label];
      for (int w = 0; w < 5; ++w) r.sentence += pool[rng.index(pool.size())] + " ";
      r.sentence += "the " + cues[label][rng.index(cues[label].size())];
      r.split = i % 5 == 0 ? corpus::SplitTag::val : corpus::SplitTag::train;
      records.push_back(r);
    }

  std::vector<corpus::ArgumentExample> train, val;
  for (const auto& ex : corpus::to_examples(records)) (ex.split == corpus::SplitTag::val ? val : train).push_back(ex);

  mutual::TeamConfig config;
  config.num_topics = 4;
  config.latent_dim = 16;
  config.ntm_hidden_dim = 32;
  config.embed_dim = 16;
  config.hidden_dim = 32;
  config.topic_terms = 5;
  config.classifier_learning_rate = 1e-2;
  config.schedule.max_iterations = 5;
  config.ntm_learning_rate = 1e-2;
  config.schedule.ntm_epochs_per_iteration = 40;
  config.schedule.classifier_epochs_per_iteration = 3;
  config.schedule.seed = 1;

  auto model = mutual::TeamModel::from_examples(config, train);
  // Embeddings learned from 100 sentences say little about which topic fits a
  // target, so topic selection uses a small hand-made vector file instead.
  model.use_embeddings(std::make_shared<const topics::EmbeddingTable>(
      topics::EmbeddingTable::load(TEAM_SAMPLES_DIR "/toy_vectors.txt")));
  const auto result = mutual::train_alternating(model, train, val);
  std::cout << "iterations run: " << result.iterations_run << ", best validation macro F1: " << std::setprecision(3)
            << result.best_val_macro_f1.value_or(0.0) << "\n\n";

  for (std::size_t k = 0; k < config.num_topics; ++k) {
    std::cout << "topic " << k << ":";
    for (auto id : model.ntm().top_words(k, 6)) std::cout << ' ' << model.ntm_vocab().word(id);
    std::cout << '\n';
  }
  std::cout << '\n';

  for (const auto& [target, _] : pools) {
    const auto& t = model.topics_for(corpus::TargetId(target));
    std::cout << target << " -> topic " << t.topic_index << ":";
    for (const auto& w : t.words) std::cout << ' ' << w;
    std::cout << '\n';
  }
  std::cout << '\n';

  const auto preds = model.predict(val);
  for (std::size_t i = 0; i < 5 && i < val.size(); ++i) {
    std::cout << corpus::to_string(preds[i].predicted) << " (gold " << corpus::to_string(val[i].label) << "):";
    for (const auto& w : val[i].tokens) std::cout << ' ' << w;
    std::cout << '\n';
  }
}

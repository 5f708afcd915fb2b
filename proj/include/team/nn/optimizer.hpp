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

#include "team/nn/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace team::nn {

enum class OptimizerKind { adam, adamw };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;  // adamw only
};

class NonFiniteGradient : public std::runtime_error {
 public:
  explicit NonFiniteGradient(const std::string& param)
      : std::runtime_error("non-finite gradient in parameter '" + param + "'"), param_(param) {}
  const std::string& param() const { return param_; }

 private:
  std::string param_;
};

/// Adam / AdamW with bias correction. AdamW applies decoupled decay
/// p <- p - lr * wd * p before the moment update.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  const OptimizerConfig& config() const { return config_; }
  std::int64_t steps() const { return step_; }

  /// Applies one update from the gradients stored in `params`. Non-trainable
  /// parameters are skipped. Gradients are checked before anything is modified.
  void step(ParameterSet& params) {
    for (const auto& e : params.entries())
      if (e.param.trainable && !e.param.grad.allFinite()) throw NonFiniteGradient(e.name);

    ++step_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    const double lr = config_.learning_rate;

    for (auto& e : params.entries()) {
      Parameter& p = e.param;
      if (!p.trainable) continue;
      auto& st = moments_[e.name];
      if (st.m.size() == 0) {
        st.m = Matrix::Zero(p.value.rows(), p.value.cols());
        st.v = Matrix::Zero(p.value.rows(), p.value.cols());
      }
      if (config_.kind == OptimizerKind::adamw && config_.weight_decay != 0.0)
        p.value *= (1.0 - lr * config_.weight_decay);
      st.m = b1 * st.m + (1.0 - b1) * p.grad;
      st.v = b2 * st.v + (1.0 - b2) * p.grad.cwiseProduct(p.grad);
      p.value.array() -= lr * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + config_.eps);
    }
  }

  struct Moments {
    Matrix m;
    Matrix v;
  };

  const std::unordered_map<std::string, Moments>& moments() const { return moments_; }
  void restore(std::int64_t step, std::unordered_map<std::string, Moments> moments) {
    step_ = step;
    moments_ = std::move(moments);
  }

 private:
  OptimizerConfig config_;
  std::int64_t step_ = 0;
  std::unordered_map<std::string, Moments> moments_;
};

}  // namespace team::nn

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

// Value-level versions of the losses and normalisers. The tape ops in
// autograd.hpp compute the same quantities for training.

#include "team/nn/tensor.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace team::nn {

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  double mx = logits[0];
  for (double x : logits) mx = std::max(mx, x);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

/// -ln(max(predicted[gold], eps)).
inline double cross_entropy(std::span<const double> predicted, std::size_t gold,
                            double eps = kProbFloor) {
  if (gold >= predicted.size())
    throw std::out_of_range("cross_entropy: gold index " + std::to_string(gold) +
                            " out of range for " + std::to_string(predicted.size()) + " classes");
  return -std::log(std::max(predicted[gold], eps));
}

inline double kl_categorical(std::span<const double> p, std::span<const double> q,
                             double eps = kProbFloor) {
  if (p.size() != q.size())
    throw ShapeError("kl_categorical: length mismatch " + std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log((p[i] + eps) / (q[i] + eps));
  return s;
}

/// KL(N(mu, exp(logvar)) || N(0, I)) in closed form.
inline double gaussian_kl(std::span<const double> mu, std::span<const double> logvar) {
  if (mu.size() != logvar.size()) throw ShapeError("gaussian_kl: mu/logvar length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    s += std::exp(logvar[i]) + mu[i] * mu[i] - 1.0 - logvar[i];
  return 0.5 * s;
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace team::nn

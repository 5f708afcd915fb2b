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

#include "team/nn/autograd.hpp"
#include "team/nn/tensor.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace team::nn {

enum class Activation { identity, relu, tanh, softplus };
enum class OutputActivation { identity, softmax };

/// widths = {input, hidden..., output}; one activation per hidden layer.
struct MlpSpec {
  std::vector<Eigen::Index> widths;
  std::vector<Activation> hidden_activations;
  OutputActivation output = OutputActivation::identity;

  std::size_t layers() const { return widths.empty() ? 0 : widths.size() - 1; }

  void validate() const {
    if (widths.size() < 2) throw std::invalid_argument("MlpSpec: needs at least one layer");
    for (auto w : widths)
      if (w < 1) throw std::invalid_argument("MlpSpec: widths must be >= 1");
    if (hidden_activations.size() != widths.size() - 2)
      throw std::invalid_argument("MlpSpec: one activation per hidden layer required");
  }

  /// Single affine layer, no hidden activation.
  static MlpSpec affine(Eigen::Index in, Eigen::Index out,
                        OutputActivation o = OutputActivation::identity) {
    return {{in, out}, {}, o};
  }
};

inline Var activate(Var x, Activation a) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::relu: return relu(x);
    case Activation::tanh: return tanh(x);
    case Activation::softplus: return softplus(x);
  }
  return x;
}

/// Registers "<prefix>.w<i>" (in x out) and "<prefix>.b<i>" (1 x out).
/// Weights are Glorot-uniform, biases zero.
inline void init_mlp(ParameterSet& params, const std::string& prefix, const MlpSpec& spec,
                     Rng& rng) {
  spec.validate();
  for (std::size_t l = 0; l < spec.layers(); ++l) {
    params.add(prefix + ".w" + std::to_string(l),
               glorot_uniform(spec.widths[l], spec.widths[l + 1], rng));
    params.add(prefix + ".b" + std::to_string(l), Matrix::Zero(1, spec.widths[l + 1]));
  }
}

inline Var mlp_forward(Tape& tape, const MlpSpec& spec, ParameterSet& params,
                       const std::string& prefix, Var input) {
  spec.validate();
  const Matrix& x = tape.value(input);
  if (x.cols() != spec.widths.front())
    throw ShapeError("mlp_forward(" + prefix + "): input width " + std::to_string(x.cols()) +
                     " != " + std::to_string(spec.widths.front()));
  Var h = input;
  for (std::size_t l = 0; l < spec.layers(); ++l) {
    Var w = tape.param(params.at(prefix + ".w" + std::to_string(l)));
    Var b = tape.param(params.at(prefix + ".b" + std::to_string(l)));
    h = add_row(matmul(h, w), b);
    if (l + 1 < spec.layers()) h = activate(h, spec.hidden_activations[l]);
  }
  if (spec.output == OutputActivation::softmax) h = softmax(h);
  return h;
}

/// Inference-only convenience: evaluates the MLP on a batch of rows.
inline Matrix mlp_forward(const MlpSpec& spec, ParameterSet& params, const std::string& prefix,
                          const Matrix& input) {
  Tape tape;
  return tape.value(mlp_forward(tape, spec, params, prefix, tape.constant(input)));
}

}  // namespace team::nn

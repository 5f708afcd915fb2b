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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace team::nn {

/// Evaluates the scalar loss at the current parameter values. When
/// `with_gradient` is true it must also back-propagate into the params' grads.
using LossFn = std::function<double(bool with_gradient)>;

struct GradProbe {
  std::string param;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradProbe> probes;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps round-off on near-zero
/// gradients from reading as a large relative error.
inline double relative_error(double analytic, double numeric, double floor = 1e-3) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares analytic gradients with central differences on `samples`
/// randomly chosen trainable coordinates.
inline GradCheckReport grad_check(ParameterSet& params, const LossFn& loss, std::size_t samples,
                                  double tolerance, std::uint64_t seed = 0, double step = 1e-5) {
  params.zero_grad();
  loss(true);

  struct Slot {
    ParameterSet::Entry* entry;
    Eigen::Index size;
  };
  std::vector<Slot> slots;
  Eigen::Index total = 0;
  for (auto& e : params.entries()) {
    if (!e.param.trainable || e.param.value.size() == 0) continue;
    slots.push_back({&e, e.param.value.size()});
    total += e.param.value.size();
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  if (total == 0) {
    report.passed = true;
    return report;
  }

  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    auto flat = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(total)));
    std::size_t k = 0;
    while (flat >= slots[k].size) flat -= slots[k++].size;
    Parameter& p = slots[k].entry->param;
    double& x = p.value.data()[flat];
    const double saved = x;
    x = saved + step;
    const double up = loss(false);
    x = saved - step;
    const double down = loss(false);
    x = saved;

    GradProbe probe;
    probe.param = slots[k].entry->name;
    probe.index = flat;
    probe.analytic = p.grad.data()[flat];
    probe.numeric = (up - down) / (2.0 * step);
    probe.relative_error = relative_error(probe.analytic, probe.numeric);
    report.max_relative_error = std::max(report.max_relative_error, probe.relative_error);
    report.probes.push_back(std::move(probe));
  }
  report.passed = report.max_relative_error <= tolerance;
  return report;
}

}  // namespace team::nn

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

#include "team/cli/run_config.hpp"
#include "team/corpus/splits.hpp"
#include "team/corpus/tokenizer.hpp"
#include "team/corpus/tsv.hpp"
#include "team/corpus/types.hpp"
#include "team/corpus/vocabulary.hpp"
#include "team/encoder/encoder.hpp"
#include "team/eval/coherence.hpp"
#include "team/eval/metrics.hpp"
#include "team/eval/protocols.hpp"
#include "team/mutual/mutual.hpp"
#include "team/nn/autograd.hpp"
#include "team/nn/checkpoint.hpp"
#include "team/nn/functional.hpp"
#include "team/nn/grad_check.hpp"
#include "team/nn/mlp.hpp"
#include "team/nn/optimizer.hpp"
#include "team/nn/tensor.hpp"
#include "team/ntm/ntm.hpp"
#include "team/topics/topics.hpp"

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

// Text checkpoint container. Values are written as hexadecimal floats so a
// save/load cycle reproduces every parameter bit for bit.
//
//   team-checkpoint 1
//   meta <key> <value to end of line>
//   counter <name> <int64>
//   rng <name> <engine state to end of line>
//   param <name> <rows> <cols> <trainable>
//   <row-major values, one matrix row per line>
//   end

#include "team/nn/optimizer.hpp"
#include "team/nn/tensor.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace team::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ParameterSet params;
  std::map<std::string, std::string> meta;
  std::map<std::string, std::int64_t> counters;
  std::map<std::string, std::string> rng_states;

  void add_params(const std::string& prefix, const ParameterSet& set) {
    for (const auto& e : set.entries())
      params.add(prefix + e.name, e.param.value, e.param.trainable);
  }

  /// Copies values back into `set`, which must already have the same layout.
  void restore_params(const std::string& prefix, ParameterSet& set) const {
    for (auto& e : set.entries()) {
      const std::string key = prefix + e.name;
      if (!params.contains(key)) throw CheckpointError("checkpoint lacks parameter " + key);
      const Parameter& src = params.at(key);
      if (src.value.rows() != e.param.value.rows() || src.value.cols() != e.param.value.cols())
        throw CheckpointError("shape mismatch for " + key + ": " + shape_str(src.value) +
                              " vs " + shape_str(e.param.value));
      e.param.value = src.value;
    }
  }

  void add_optimizer(const std::string& name, const Optimizer& opt) {
    counters["opt." + name + ".steps"] = opt.steps();
    for (const auto& [pname, mo] : opt.moments()) {
      params.add("opt." + name + ".m." + pname, mo.m, false);
      params.add("opt." + name + ".v." + pname, mo.v, false);
    }
  }

  void restore_optimizer(const std::string& name, Optimizer& opt,
                         const ParameterSet& model) const {
    auto it = counters.find("opt." + name + ".steps");
    if (it == counters.end()) throw CheckpointError("checkpoint lacks optimizer " + name);
    std::unordered_map<std::string, Optimizer::Moments> moments;
    for (const auto& e : model.entries()) {
      const std::string mk = "opt." + name + ".m." + e.name;
      if (!params.contains(mk)) continue;
      moments[e.name] = {params.at(mk).value, params.at("opt." + name + ".v." + e.name).value};
    }
    opt.restore(it->second, std::move(moments));
  }
};

namespace detail {

inline void check_token(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(" \t\r\n") != std::string::npos)
    throw CheckpointError(std::string("checkpoint ") + what + " must be a non-empty token: '" +
                          s + "'");
}

inline std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
  os << "team-checkpoint 1\n";
  for (const auto& [k, v] : ck.meta) {
    detail::check_token(k, "meta key");
    if (v.find('\n') != std::string::npos) throw CheckpointError("meta value contains newline");
    os << "meta " << k << ' ' << v << '\n';
  }
  for (const auto& [k, v] : ck.counters) {
    detail::check_token(k, "counter name");
    os << "counter " << k << ' ' << v << '\n';
  }
  for (const auto& [k, v] : ck.rng_states) {
    detail::check_token(k, "rng name");
    os << "rng " << k << ' ' << v << '\n';
  }
  for (const auto& e : ck.params.entries()) {
    detail::check_token(e.name, "parameter name");
    const Matrix& m = e.param.value;
    os << "param " << e.name << ' ' << m.rows() << ' ' << m.cols() << ' '
       << (e.param.trainable ? 1 : 0) << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) os << ' ';
        os << detail::hexfloat(m(r, c));
      }
      os << '\n';
    }
  }
  os << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> CheckpointError {
    return CheckpointError("checkpoint line " + std::to_string(lineno) + ": " + msg);
  };
  if (!std::getline(is, line) || line != "team-checkpoint 1")
    throw CheckpointError("not a team checkpoint (bad header)");
  ++lineno;

  Checkpoint ck;
  bool ended = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "end") {
      ended = true;
      break;
    }
    std::string name;
    ls >> name;
    if (name.empty()) throw fail("missing name");
    if (kind == "meta" || kind == "rng") {
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      (kind == "meta" ? ck.meta : ck.rng_states)[name] = rest;
    } else if (kind == "counter") {
      std::int64_t v = 0;
      if (!(ls >> v)) throw fail("bad counter value");
      ck.counters[name] = v;
    } else if (kind == "param") {
      Eigen::Index rows = 0, cols = 0;
      int trainable = 1;
      if (!(ls >> rows >> cols >> trainable) || rows < 0 || cols < 0) throw fail("bad param header");
      Matrix m(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (!std::getline(is, line)) throw fail("truncated values for " + name);
        ++lineno;
        const char* p = line.c_str();
        for (Eigen::Index c = 0; c < cols; ++c) {
          char* endp = nullptr;
          m(r, c) = std::strtod(p, &endp);
          if (endp == p) throw fail("bad value in " + name);
          p = endp;
        }
      }
      ck.params.add(name, std::move(m), trainable != 0);
    } else {
      throw fail("unknown record '" + kind + "'");
    }
  }
  if (!ended) throw CheckpointError("checkpoint truncated (no end marker)");
  return ck;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream os(path);
  if (!os) throw CheckpointError("cannot write " + path.string());
  write_checkpoint(os, ck);
  if (!os) throw CheckpointError("write failed: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw CheckpointError("cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace team::nn

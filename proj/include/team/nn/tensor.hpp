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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace team::nn {

/// Row-major dense matrix. Batched activations are laid out one example per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Floor applied inside every log and KL ratio.
inline constexpr double kProbFloor = 1e-8;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string shape_str(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

/// Seeded random source. Identical seeds give identical draw sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double normal() { return normal_(engine_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::uint64_t next() { return engine_(); }

  template <typename It>
  void shuffle(It first, It last) {
    std::shuffle(first, last, engine_);
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal();
    return m;
  }

  /// Derives an independent child stream; used to give each component its own seed.
  Rng split(std::uint64_t salt) {
    std::seed_seq seq{seed_, salt, next()};
    std::uint64_t s = 0;
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    s = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return Rng(s);
  }

  std::string state() const {
    std::ostringstream os;
    os << seed_ << ' ' << engine_ << ' ' << normal_;
    return os.str();
  }

  void restore(const std::string& state) {
    std::istringstream is(state);
    is >> seed_ >> engine_ >> normal_;
    if (!is) throw std::invalid_argument("Rng::restore: malformed state");
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Parameter {
  Matrix value;
  Matrix grad;
  bool trainable = true;
};

/// Named parameters in insertion order. Entries are never removed, and their
/// addresses stay valid until the next add().
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    Parameter param;
  };

  Parameter& add(const std::string& name, Matrix init, bool trainable = true) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
    index_.emplace(name, entries_.size());
    Parameter p;
    p.grad = Matrix::Zero(init.rows(), init.cols());
    p.value = std::move(init);
    p.trainable = trainable;
    entries_.push_back({name, std::move(p)});
    return entries_.back().param;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Parameter& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return entries_[it->second].param;
  }
  const Parameter& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return entries_[it->second].param;
  }

  void zero_grad() {
    for (auto& e : entries_) e.param.grad.setZero();
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += static_cast<std::size_t>(e.param.value.size());
    return n;
  }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  bool operator==(const ParameterSet& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& a = entries_[i];
      const auto& b = other.entries_[i];
      if (a.name != b.name || a.param.value.rows() != b.param.value.rows() ||
          a.param.value.cols() != b.param.value.cols())
        return false;
      // Bitwise comparison; distinguishes -0.0 from 0.0 and compares NaN payloads.
      if (std::memcmp(a.param.value.data(), b.param.value.data(),
                      sizeof(double) * static_cast<std::size_t>(a.param.value.size())) != 0)
        return false;
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Glorot-uniform initialisation: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
inline Matrix glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-a, a);
  return m;
}

}  // namespace team::nn

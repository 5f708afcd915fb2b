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

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace team::corpus {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label : std::size_t { support = 0, oppose = 1, none = 2 };
inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels{Label::support, Label::oppose,
                                                          Label::none};

inline std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }
inline Label label_from_index(std::size_t i) {
  if (i >= kNumLabels) throw std::out_of_range("label index " + std::to_string(i));
  return static_cast<Label>(i);
}

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::support: return "support";
    case Label::oppose: return "oppose";
    case Label::none: return "none";
  }
  return "none";
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "support") return Label::support;
  if (s == "oppose") return Label::oppose;
  if (s == "none") return Label::none;
  return std::nullopt;
}

/// Argument_for -> support, Argument_against -> oppose, NoArgument -> none.
inline std::optional<Label> label_from_annotation(std::string_view annotation) {
  if (annotation == "Argument_for") return Label::support;
  if (annotation == "Argument_against") return Label::oppose;
  if (annotation == "NoArgument") return Label::none;
  return std::nullopt;
}

enum class SplitTag { train, val, test };

inline std::optional<SplitTag> parse_split_tag(std::string_view s) {
  if (s == "train") return SplitTag::train;
  if (s == "val" || s == "validation" || s == "dev") return SplitTag::val;
  if (s == "test") return SplitTag::test;
  return std::nullopt;
}

inline std::string_view to_string(SplitTag t) {
  switch (t) {
    case SplitTag::train: return "train";
    case SplitTag::val: return "val";
    case SplitTag::test: return "test";
  }
  return "train";
}

inline std::string trim(std::string_view s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && ws(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && ws(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Canonical target name: trimmed, ASCII-lowercased, inner whitespace collapsed.
class TargetId {
 public:
  TargetId() = default;
  explicit TargetId(std::string_view name) {
    std::string t = trim(name);
    bool space = false;
    for (char c : t) {
      const auto uc = static_cast<unsigned char>(c);
      if (std::isspace(uc)) {
        space = true;
        continue;
      }
      if (space && !name_.empty()) name_ += ' ';
      space = false;
      name_ += static_cast<char>(std::tolower(uc));
    }
  }
  const std::string& str() const { return name_; }
  bool empty() const { return name_.empty(); }
  auto operator<=>(const TargetId&) const = default;

 private:
  std::string name_;
};

struct RawRecord {
  TargetId target;
  std::string target_name;  // as written in the file
  std::string sentence;
  std::string annotation;
  SplitTag split = SplitTag::train;
  std::size_t line = 0;
};

struct ArgumentExample {
  TargetId target;
  std::vector<std::string> tokens;  // encoder-mode tokens of the sentence
  Label label = Label::none;
  SplitTag split = SplitTag::train;
};

struct DatasetSplit {
  std::vector<ArgumentExample> train;
  std::vector<ArgumentExample> val;
  std::vector<ArgumentExample> test;
  std::optional<TargetId> held_out_target;
};

}  // namespace team::corpus

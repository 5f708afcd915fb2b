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

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace team::corpus {

enum class TokenizeMode {
  ntm,      // stopwords and tokens shorter than two characters removed
  encoder,  // every token kept
};

using StopwordSet = std::unordered_set<std::string>;

/// Built-in English stopword list used for topic-model preprocessing.
inline const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
      "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
      "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
      "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
      "for", "with", "about", "against", "between", "into", "through", "during", "before",
      "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
      "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
      "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
      "just", "don", "dont", "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain",
      "aren", "couldn", "didn", "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn",
      "mustn", "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn", "also", "would",
      "could", "may", "might", "must", "shall", "one", "us", "many", "much", "even", "like",
      "get", "make", "said", "say", "says"};
  return words;
}

namespace detail {

/// Length in code points of a UTF-8 string.
inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

enum class CharClass { word, separator, drop };

/// Classifies the code point starting at s[i] and reports its byte length.
inline CharClass classify(std::string_view s, std::size_t i, std::size_t& len) {
  const auto c0 = static_cast<unsigned char>(s[i]);
  len = 1;
  if (c0 < 0x80) {
    if (c0 == '\'') return CharClass::drop;
    if (std::isalnum(c0)) return CharClass::word;
    return CharClass::separator;  // whitespace, ASCII punctuation, control
  }
  if ((c0 & 0xE0) == 0xC0) len = 2;
  else if ((c0 & 0xF0) == 0xE0) len = 3;
  else if ((c0 & 0xF8) == 0xF0) len = 4;
  if (i + len > s.size()) {
    len = s.size() - i;
    return CharClass::separator;
  }
  const auto c1 = static_cast<unsigned char>(s[i + 1]);
  if (len == 2 && c0 == 0xC2) {
    // U+00A0..U+00BF: no-break space, Latin-1 punctuation and symbols
    if (c1 >= 0xA0 && c1 <= 0xBF) return CharClass::separator;
  }
  if (len == 2 && c0 == 0xC3 && (c1 == 0x97 || c1 == 0xB7)) return CharClass::separator;  // × ÷
  if (len == 3 && c0 == 0xE2 && (c1 == 0x80 || c1 == 0x81)) {
    const auto c2 = static_cast<unsigned char>(s[i + 2]);
    // U+2018/U+2019 single quotes behave like the ASCII apostrophe
    if (c1 == 0x80 && (c2 == 0x98 || c2 == 0x99)) return CharClass::drop;
    return CharClass::separator;  // U+2000..U+207F general punctuation
  }
  if (len == 3 && c0 == 0xE3 && c1 == 0x80) return CharClass::separator;  // CJK punctuation
  return CharClass::word;
}

}  // namespace detail

/// Lowercases, strips punctuation and splits on whitespace. Apostrophes are
/// deleted ("don't" -> "dont"); every other punctuation mark separates tokens.
inline std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode,
                                         const StopwordSet& stopwords = default_stopwords()) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (mode == TokenizeMode::ntm &&
        (detail::utf8_length(cur) < 2 || stopwords.count(cur) != 0)) {
      cur.clear();
      return;
    }
    tokens.push_back(std::move(cur));
    cur.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    switch (detail::classify(text, i, len)) {
      case detail::CharClass::word:
        if (len == 1)
          cur += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        else
          cur.append(text.substr(i, len));
        break;
      case detail::CharClass::separator: flush(); break;
      case detail::CharClass::drop: break;
    }
    i += len;
  }
  flush();
  return tokens;
}

/// NTM-mode filter applied to tokens that were already produced in encoder mode.
inline std::vector<std::string> ntm_filter(const std::vector<std::string>& encoder_tokens,
                                           const StopwordSet& stopwords = default_stopwords()) {
  std::vector<std::string> out;
  for (const auto& t : encoder_tokens)
    if (detail::utf8_length(t) >= 2 && stopwords.count(t) == 0) out.push_back(t);
  return out;
}

}  // namespace team::corpus

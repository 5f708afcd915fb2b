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

#include "team/corpus/types.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace team::corpus {

struct LoadResult {
  std::vector<RawRecord> records;
  std::size_t rejected_annotation = 0;  // rows whose annotation is not a known label
  std::size_t rejected_empty = 0;       // rows whose sentence is blank after trimming
};

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

/// Reads an argument-mining TSV with a header row naming at least the columns
/// topic, sentence, annotation and set. Extra columns are ignored.
inline LoadResult load_tsv(std::istream& is, const std::string& source = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw CorpusError(source + ": empty file (no header row)");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_tabs(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(trim(header[i]), i);
  constexpr std::string_view required[] = {"topic", "sentence", "annotation", "set"};
  std::size_t idx[4];
  for (std::size_t r = 0; r < 4; ++r) {
    auto it = column.find(std::string(required[r]));
    if (it == column.end())
      throw CorpusError(source + ": missing required column '" + std::string(required[r]) + "'");
    idx[r] = it->second;
  }
  const std::size_t min_fields = *std::max_element(idx, idx + 4) + 1;

  LoadResult result;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < min_fields)
      throw CorpusError(source + ":" + std::to_string(lineno) + ": malformed row: expected at least " +
                        std::to_string(min_fields) + " fields, found " +
                        std::to_string(fields.size()));
    RawRecord rec;
    rec.line = lineno;
    rec.target_name = trim(fields[idx[0]]);
    rec.target = TargetId(rec.target_name);
    rec.sentence = trim(fields[idx[1]]);
    rec.annotation = trim(fields[idx[2]]);
    const auto tag = parse_split_tag(trim(fields[idx[3]]));
    if (!tag)
      throw CorpusError(source + ":" + std::to_string(lineno) + ": malformed row: unknown set '" +
                        std::string(fields[idx[3]]) + "'");
    if (rec.target.empty())
      throw CorpusError(source + ":" + std::to_string(lineno) + ": malformed row: empty topic");
    rec.split = *tag;
    if (!label_from_annotation(rec.annotation)) {
      ++result.rejected_annotation;
      continue;
    }
    if (rec.sentence.empty()) {
      ++result.rejected_empty;
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

inline LoadResult load_tsv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorpusError("cannot open corpus file: " + path.string());
  return load_tsv(is, path.string());
}

/// Loads one file, or every *.tsv in a directory (sorted by file name).
inline LoadResult load_corpus(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return load_tsv(path);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path))
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw CorpusError("no .tsv files in " + path.string());
  LoadResult all;
  for (const auto& f : files) {
    auto part = load_tsv(f);
    all.rejected_annotation += part.rejected_annotation;
    all.rejected_empty += part.rejected_empty;
    for (auto& r : part.records) all.records.push_back(std::move(r));
  }
  return all;
}

}  // namespace team::corpus

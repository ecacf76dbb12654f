// Copyright 2026 The vpjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VPJOIN_ADULT_HPP_
#define VPJOIN_ADULT_HPP_

#include <array>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "vpjoin/dataset.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/predicate.hpp"

namespace vpjoin {

// Column layout of the UCI adult.data training file (no header row).
inline constexpr std::array<std::string_view, 15> kAdultColumns = {
    "age",          "workclass",      "fnlwgt",       "education",
    "education-num", "marital-status", "occupation",   "relationship",
    "race",          "sex",            "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income"};

inline constexpr std::array<bool, 15> kAdultNumeric = {
    true, false, true,  false, true,  false, false, false,
    false, false, true, true,  true,  false, false};

inline std::size_t adult_column(std::string_view name) {
  for (std::size_t i = 0; i < kAdultColumns.size(); ++i) {
    if (kAdultColumns[i] == name) return i;
  }
  throw SchemaError("unknown adult attribute '" + std::string(name) + "'");
}

// Splits the table into one provider per attribute group. Record ids are
// row indices. Blank lines are skipped; "?" fields load as missing.
inline std::vector<ProviderDataset> load_adult(
    std::istream& in, const std::vector<std::vector<std::string>>& groups) {
  if (groups.empty()) throw ConfigError("load_adult: no attribute groups");
  std::vector<std::vector<std::size_t>> cols(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw ConfigError("load_adult: empty group");
    for (const auto& name : groups[g]) cols[g].push_back(adult_column(name));
  }

  std::vector<std::vector<Record>> records(groups.size());
  std::string line;
  std::size_t line_no = 0;
  RecordId next_id = 0;
  std::array<Value, 15> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t field = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      if (field >= row.size()) {
        throw IngestionError("expected 15 columns, found more", line_no);
      }
      auto text = trim(std::string_view(line).substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (text == "?") {
        row[field] = std::monostate{};
      } else if (kAdultNumeric[field]) {
        Value v = parse_value(text);
        if (!std::holds_alternative<std::int64_t>(v)) {
          throw IngestionError("column '" + std::string(kAdultColumns[field]) +
                                   "' is not an integer",
                               line_no);
        }
        row[field] = std::move(v);
      } else {
        row[field] = std::string(text);
      }
      ++field;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (field != row.size()) {
      throw IngestionError(
          "expected 15 columns, found " + std::to_string(field), line_no);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      Record r;
      r.id = next_id;
      r.values.reserve(cols[g].size());
      for (auto c : cols[g]) r.values.push_back(row[c]);
      records[g].push_back(std::move(r));
    }
    ++next_id;
  }
  if (next_id == 0) throw IngestionError("no data rows");

  std::vector<ProviderDataset> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.emplace_back(static_cast<int>(g), groups[g], std::move(records[g]));
  }
  return out;
}

inline std::vector<ProviderDataset> load_adult(
    const std::string& path,
    const std::vector<std::vector<std::string>>& groups) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  return load_adult(in, groups);
}

inline std::vector<std::string> adult_all_columns() {
  return {kAdultColumns.begin(), kAdultColumns.end()};
}

}  // namespace vpjoin

#endif  // VPJOIN_ADULT_HPP_

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

#ifndef VPJOIN_DATASET_HPP_
#define VPJOIN_DATASET_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "vpjoin/error.hpp"
#include "vpjoin/id_set.hpp"

namespace vpjoin {

// Scalar attribute value. std::monostate marks a missing field ("?").
using Value =
    std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Record {
  RecordId id = 0;
  // Positional; names live in the owning dataset's schema.
  std::vector<Value> values;
};

// One provider's vertical slice. Immutable after construction.
class ProviderDataset {
 public:
  ProviderDataset(int provider_id, std::vector<std::string> schema,
                  std::vector<Record> records)
      : provider_id_(provider_id),
        schema_(std::move(schema)),
        records_(std::move(records)) {
    dense_ = true;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (records_[i].values.size() != schema_.size()) {
        throw SchemaError("record " + std::to_string(records_[i].id) +
                          " has " + std::to_string(records_[i].values.size()) +
                          " values, schema has " +
                          std::to_string(schema_.size()));
      }
      if (records_[i].id != i) dense_ = false;
    }
    if (!dense_) {
      index_.reserve(records_.size());
      for (std::size_t i = 0; i < records_.size(); ++i) {
        if (!index_.emplace(records_[i].id, i).second) {
          throw SchemaError("duplicate record id " +
                            std::to_string(records_[i].id));
        }
      }
    }
  }

  int provider_id() const { return provider_id_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<std::string>& schema() const { return schema_; }
  const std::vector<Record>& records() const { return records_; }
  const Record& operator[](std::size_t row) const { return records_[row]; }

  // Column index of an attribute; throws SchemaError if absent.
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      if (schema_[i] == name) return i;
    }
    throw SchemaError("unknown attribute '" + name + "' for provider " +
                      std::to_string(provider_id_));
  }

  // Row holding the id, or nullptr.
  const Record* find(RecordId id) const {
    if (dense_) return id < records_.size() ? &records_[id] : nullptr;
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  IdSet ids() const {
    std::vector<RecordId> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.id);
    return IdSet::from_unsorted(std::move(out));
  }

 private:
  int provider_id_;
  std::vector<std::string> schema_;
  std::vector<Record> records_;
  bool dense_ = false;
  std::unordered_map<RecordId, std::size_t> index_;
};

inline void write_value(std::ostream& os, const Value& v) {
  std::visit(
      [&os](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          os << '?';
        } else if constexpr (std::is_same_v<T, bool>) {
          os << (x ? 1 : 0);
        } else {
          os << x;
        }
      },
      v);
}

// CSV with header "id,<schema...>".
inline void write_dataset_csv(std::ostream& os, const ProviderDataset& ds) {
  os << "id";
  for (const auto& name : ds.schema()) os << ',' << name;
  os << '\n';
  for (const auto& r : ds.records()) {
    os << r.id;
    for (const auto& v : r.values) {
      os << ',';
      write_value(os, v);
    }
    os << '\n';
  }
}

}  // namespace vpjoin

#endif  // VPJOIN_DATASET_HPP_

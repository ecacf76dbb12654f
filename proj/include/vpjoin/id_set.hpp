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

#ifndef VPJOIN_ID_SET_HPP_
#define VPJOIN_ID_SET_HPP_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <span>
#include <vector>

#include "vpjoin/error.hpp"

namespace vpjoin {

// The shared identifier w. Dense 0..N-1 for synthetic data, row index for
// ingested tables.
using RecordId = std::uint64_t;

// Sorted, duplicate-free set of record ids.
class IdSet {
 public:
  using const_iterator = std::vector<RecordId>::const_iterator;

  IdSet() = default;
  IdSet(std::initializer_list<RecordId> ids) : ids_(ids) { normalize(); }

  static IdSet from_unsorted(std::vector<RecordId> ids) {
    IdSet s;
    s.ids_ = std::move(ids);
    s.normalize();
    return s;
  }

  // Caller guarantees ids are strictly increasing.
  static IdSet from_sorted_unique(std::vector<RecordId> ids) {
    IdSet s;
    s.ids_ = std::move(ids);
    return s;
  }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const_iterator begin() const { return ids_.begin(); }
  const_iterator end() const { return ids_.end(); }
  std::span<const RecordId> view() const { return ids_; }

  bool contains(RecordId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }

  IdSet intersect(const IdSet& other) const {
    IdSet out;
    out.ids_.reserve(std::min(size(), other.size()));
    std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(),
                          other.ids_.end(), std::back_inserter(out.ids_));
    return out;
  }

  bool is_subset_of(const IdSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(),
                         ids_.end());
  }

  friend bool operator==(const IdSet&, const IdSet&) = default;

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::vector<RecordId> ids_;
};

// Intersection of all sets. Folds from the smallest set upward.
inline IdSet exact_intersection(std::span<const IdSet> sets) {
  if (sets.empty()) throw DomainError("exact_intersection: no sets given");
  std::vector<const IdSet*> order;
  order.reserve(sets.size());
  for (const auto& s : sets) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const IdSet* a, const IdSet* b) {
    return a->size() < b->size();
  });
  IdSet acc = *order.front();
  for (std::size_t i = 1; i < order.size() && !acc.empty(); ++i) {
    acc = acc.intersect(*order[i]);
  }
  return acc;
}

}  // namespace vpjoin

#endif  // VPJOIN_ID_SET_HPP_

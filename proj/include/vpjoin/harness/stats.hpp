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

#ifndef VPJOIN_HARNESS_STATS_HPP_
#define VPJOIN_HARNESS_STATS_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vpjoin/error.hpp"
#include "vpjoin/ledger.hpp"

namespace vpjoin::harness {

// Grouping columns of one output row. Unset optionals are written empty.
struct GroupKey {
  std::string experiment;
  std::string algorithm;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::optional<double> r;
  std::optional<double> sample_ratio;
  std::optional<std::uint64_t> m;
  std::optional<std::uint64_t> datasets_intersected;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

// One observed value of one run.
struct Measurement {
  GroupKey key;
  double value = 0.0;
  CostLedger ledger;
};

struct StatRow {
  GroupKey key;
  double mean = 0.0;
  double std = 0.0;  // unbiased; 0 for a single run
  std::size_t repeats = 0;
  bool single_run = false;
  double predicate_evaluations = 0.0;
  double records_transferred = 0.0;
  double messages = 0.0;
  double ciphertext_operations = 0.0;
};

namespace detail {

// Sum in sorted order so that the result does not depend on input order.
inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline double mean_of(std::vector<double> v) {
  const double n = static_cast<double>(v.size());
  return sorted_sum(std::move(v)) / n;
}

}  // namespace detail

inline StatRow summarize_group(const GroupKey& key,
                               std::span<const Measurement> runs) {
  if (runs.empty()) throw DomainError("summarize: empty group");
  StatRow row;
  row.key = key;
  row.repeats = runs.size();
  row.single_run = runs.size() == 1;
  std::vector<double> values, pe, rt, msg, ct;
  for (const auto& r : runs) {
    values.push_back(r.value);
    pe.push_back(static_cast<double>(r.ledger.predicate_evaluations()));
    rt.push_back(static_cast<double>(r.ledger.records_transferred()));
    msg.push_back(static_cast<double>(r.ledger.messages()));
    ct.push_back(static_cast<double>(r.ledger.ciphertext_operations()));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  // Constant groups report their value and std 0 without rounding residue.
  row.mean = *lo == *hi ? *lo : detail::mean_of(values);
  if (*lo != *hi) {
    std::vector<double> sq;
    for (double v : values) sq.push_back((v - row.mean) * (v - row.mean));
    row.std = std::sqrt(detail::sorted_sum(std::move(sq)) /
                        static_cast<double>(values.size() - 1));
  }
  row.predicate_evaluations = detail::mean_of(std::move(pe));
  row.records_transferred = detail::mean_of(std::move(rt));
  row.messages = detail::mean_of(std::move(msg));
  row.ciphertext_operations = detail::mean_of(std::move(ct));
  return row;
}

// Mean and std per group key, rows ordered by key.
inline std::vector<StatRow> summarize(std::span<const Measurement> runs) {
  if (runs.empty()) throw DomainError("summarize: no measurements");
  std::map<GroupKey, std::vector<Measurement>> groups;
  for (const auto& r : runs) groups[r.key].push_back(r);
  std::vector<StatRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    out.push_back(summarize_group(key, members));
  }
  return out;
}

// Shortest round-trip decimal, fixed notation for ordinary magnitudes.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[128];
  const double a = std::abs(v);
  const auto fmt = a >= 1e-5 && a < 1e15 ? std::chars_format::fixed
                                        : std::chars_format::scientific;
  auto res = std::to_chars(buf, buf + sizeof(buf), v, fmt);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::uint64_t v) { return std::to_string(v); }

template <class T>
std::string format_optional(const std::optional<T>& v) {
  return v ? format_number(*v) : std::string();
}

inline constexpr const char* kStatHeader =
    "experiment,algorithm,N,k,r,sample_ratio,m,datasets_intersected,mean,std,"
    "repeats,predicate_evaluations,records_transferred,messages,"
    "ciphertext_operations";

inline void write_stat_csv(std::ostream& os, std::span<const StatRow> rows) {
  os << kStatHeader << '\n';
  for (const auto& r : rows) {
    os << r.key.experiment << ',' << r.key.algorithm << ','
       << format_number(r.key.n) << ',' << format_number(r.key.k) << ','
       << format_optional(r.key.r) << ',' << format_optional(r.key.sample_ratio)
       << ',' << format_optional(r.key.m) << ','
       << format_optional(r.key.datasets_intersected) << ','
       << format_number(r.mean) << ',' << format_number(r.std) << ','
       << r.repeats << ',' << format_number(r.predicate_evaluations) << ','
       << format_number(r.records_transferred) << ','
       << format_number(r.messages) << ','
       << format_number(r.ciphertext_operations) << '\n';
  }
}

}  // namespace vpjoin::harness

#endif  // VPJOIN_HARNESS_STATS_HPP_

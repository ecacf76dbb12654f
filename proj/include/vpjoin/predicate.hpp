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

#ifndef VPJOIN_PREDICATE_HPP_
#define VPJOIN_PREDICATE_HPP_

#include <charconv>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vpjoin/dataset.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/id_set.hpp"

namespace vpjoin {

enum class CompareOp { kLess, kLessEqual, kEqual, kGreaterEqual, kGreater };

// True when the boolean attribute is set.
struct LabelPredicate {
  std::string attribute = "label";
};

struct Comparison {
  std::string attribute;
  CompareOp op = CompareOp::kEqual;
  Value constant;
};

struct Conjunction {
  std::vector<Comparison> terms;
};

using Predicate = std::variant<LabelPredicate, Comparison, Conjunction>;

namespace detail {

inline std::optional<std::partial_ordering> compare_values(const Value& lhs,
                                                           const Value& rhs) {
  auto as_int = [](const Value& v) -> std::optional<std::int64_t> {
    if (auto* b = std::get_if<bool>(&v)) return *b ? 1 : 0;
    if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
    return std::nullopt;
  };
  auto as_real = [&](const Value& v) -> std::optional<double> {
    if (auto* d = std::get_if<double>(&v)) return *d;
    if (auto i = as_int(v)) return static_cast<double>(*i);
    return std::nullopt;
  };
  if (std::holds_alternative<std::monostate>(lhs) ||
      std::holds_alternative<std::monostate>(rhs)) {
    return std::nullopt;
  }
  auto* ls = std::get_if<std::string>(&lhs);
  auto* rs = std::get_if<std::string>(&rhs);
  if (ls && rs) return *ls <=> *rs;
  if (ls || rs) return std::nullopt;
  auto li = as_int(lhs);
  auto ri = as_int(rhs);
  if (li && ri) return *li <=> *ri;
  return *as_real(lhs) <=> *as_real(rhs);
}

inline bool apply(CompareOp op, std::partial_ordering c) {
  switch (op) {
    case CompareOp::kLess: return c < 0;
    case CompareOp::kLessEqual: return c <= 0;
    case CompareOp::kEqual: return c == 0;
    case CompareOp::kGreaterEqual: return c >= 0;
    case CompareOp::kGreater: return c > 0;
  }
  return false;
}

}  // namespace detail

// Missing fields and type mismatches compare false.
inline bool compare(const Value& attribute, CompareOp op,
                    const Value& constant) {
  auto c = detail::compare_values(attribute, constant);
  return c && detail::apply(op, *c);
}

// A predicate resolved against one dataset's schema.
class BoundPredicate {
 public:
  BoundPredicate(const ProviderDataset& dataset, const Predicate& predicate) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, LabelPredicate>) {
            terms_.push_back({dataset.column(p.attribute), CompareOp::kEqual,
                              Value(true)});
          } else if constexpr (std::is_same_v<T, Comparison>) {
            terms_.push_back({dataset.column(p.attribute), p.op, p.constant});
          } else {
            for (const auto& t : p.terms) {
              terms_.push_back({dataset.column(t.attribute), t.op, t.constant});
            }
          }
        },
        predicate);
  }

  bool operator()(const Record& r) const {
    for (const auto& t : terms_) {
      if (!compare(r.values[t.column], t.op, t.constant)) return false;
    }
    return true;
  }

 private:
  struct Term {
    std::size_t column;
    CompareOp op;
    Value constant;
  };
  std::vector<Term> terms_;
};

inline IdSet evaluate_predicate(const ProviderDataset& dataset,
                                const Predicate& predicate) {
  BoundPredicate bound(dataset, predicate);
  std::vector<RecordId> out;
  for (const auto& r : dataset.records()) {
    if (bound(r)) out.push_back(r.id);
  }
  return IdSet::from_unsorted(std::move(out));
}

// |p(D)| / |D|
inline double predicate_ratio(const ProviderDataset& dataset,
                              const Predicate& predicate) {
  if (dataset.empty()) throw DomainError("predicate_ratio: empty dataset");
  return static_cast<double>(evaluate_predicate(dataset, predicate).size()) /
         static_cast<double>(dataset.size());
}

// Parses a scalar literal: true/false, integer, real, else a string token.
inline Value parse_value(std::string_view text) {
  if (text == "true") return Value(true);
  if (text == "false") return Value(false);
  std::int64_t i = 0;
  auto [ip, iec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (iec == std::errc() && ip == text.data() + text.size()) return Value(i);
  double d = 0;
  auto [dp, dec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (dec == std::errc() && dp == text.data() + text.size()) return Value(d);
  return Value(std::string(text));
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Grammar: term ('&' term)*, term = attr op constant | attr.
// A bare attribute name is a label predicate.
inline Predicate parse_predicate(std::string_view text) {
  std::vector<Comparison> terms;
  std::optional<LabelPredicate> label;
  std::size_t pos = 0;
  while (true) {
    const auto amp = text.find('&', pos);
    const auto part = trim(text.substr(
        pos, amp == std::string_view::npos ? std::string_view::npos
                                           : amp - pos));
    if (part.empty()) throw ConfigError("empty predicate term in '" +
                                        std::string(text) + "'");
    const auto op_pos = part.find_first_of("<>=");
    if (op_pos == std::string_view::npos) {
      if (label || !terms.empty() || amp != std::string_view::npos) {
        throw ConfigError("label predicate cannot be combined: '" +
                          std::string(text) + "'");
      }
      label = LabelPredicate{std::string(part)};
    } else {
      Comparison c;
      c.attribute = std::string(trim(part.substr(0, op_pos)));
      std::size_t op_len = 1;
      const char a = part[op_pos];
      const char b = op_pos + 1 < part.size() ? part[op_pos + 1] : '\0';
      if (a == '<' && b == '=') {
        c.op = CompareOp::kLessEqual, op_len = 2;
      } else if (a == '>' && b == '=') {
        c.op = CompareOp::kGreaterEqual, op_len = 2;
      } else if (a == '<') {
        c.op = CompareOp::kLess;
      } else if (a == '>') {
        c.op = CompareOp::kGreater;
      } else {
        c.op = CompareOp::kEqual;
        if (b == '=') op_len = 2;
      }
      const auto rhs = trim(part.substr(op_pos + op_len));
      if (c.attribute.empty() || rhs.empty()) {
        throw ConfigError("malformed predicate term '" + std::string(part) +
                          "'");
      }
      c.constant = parse_value(rhs);
      terms.push_back(std::move(c));
    }
    if (amp == std::string_view::npos) break;
    pos = amp + 1;
  }
  if (label) return *label;
  if (terms.size() == 1) return terms.front();
  return Conjunction{std::move(terms)};
}

}  // namespace vpjoin

#endif  // VPJOIN_PREDICATE_HPP_

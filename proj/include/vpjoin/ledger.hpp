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

#ifndef VPJOIN_LEDGER_HPP_
#define VPJOIN_LEDGER_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace vpjoin {

// Chargeable work of one protocol run. predicate_evaluations stands in for
// CPU time, records_transferred for network traffic (one id or one
// ciphertext is one unit). Counters only grow.
class CostLedger {
 public:
  std::uint64_t predicate_evaluations() const { return predicate_evaluations_; }
  std::uint64_t records_transferred() const { return records_transferred_; }
  std::uint64_t messages() const { return messages_; }
  std::uint64_t ciphertext_operations() const { return ciphertext_operations_; }

  void add_predicate_evaluations(std::uint64_t n) { predicate_evaluations_ += n; }
  void add_records_transferred(std::uint64_t n) { records_transferred_ += n; }
  void add_messages(std::uint64_t n) { messages_ += n; }
  void add_ciphertext_operations(std::uint64_t n) { ciphertext_operations_ += n; }

  friend bool operator==(const CostLedger&, const CostLedger&) = default;

 private:
  std::uint64_t predicate_evaluations_ = 0;
  std::uint64_t records_transferred_ = 0;
  std::uint64_t messages_ = 0;
  std::uint64_t ciphertext_operations_ = 0;
};

// Optional audit log of simulated messages.
struct TranscriptEntry {
  std::string from;
  std::string to;
  std::string type;
  std::uint64_t payload_size = 0;
};

class Transcript {
 public:
  void record(std::string from, std::string to, std::string type,
              std::uint64_t payload_size) {
    entries_.push_back(
        {std::move(from), std::move(to), std::move(type), payload_size});
  }
  const std::vector<TranscriptEntry>& entries() const { return entries_; }

 private:
  std::vector<TranscriptEntry> entries_;
};

}  // namespace vpjoin

#endif  // VPJOIN_LEDGER_HPP_

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

#ifndef VPJOIN_PRIVACY_COMMUTATIVE_HPP_
#define VPJOIN_PRIVACY_COMMUTATIVE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vpjoin/error.hpp"
#include "vpjoin/id_set.hpp"
#include "vpjoin/ledger.hpp"
#include "vpjoin/privacy/bigint.hpp"
#include "vpjoin/random.hpp"

namespace vpjoin::privacy {

// Quadratic residues modulo a safe prime p = 2q + 1: a group of prime order
// q in which x -> x^e commutes across keys (Pohlig-Hellman style).
class CommutativeGroup {
 public:
  explicit CommutativeGroup(BigInt safe_prime)
      : p_(std::move(safe_prime)), q_((p_ - 1) / 2) {
    if (mpz_probab_prime_p(p_.get_mpz_t(), 30) == 0 ||
        mpz_probab_prime_p(q_.get_mpz_t(), 30) == 0) {
      throw ConfigError("commutative group modulus is not a safe prime");
    }
  }

  // RFC 2409 Oakley groups 1 (768-bit) and 2 (1024-bit).
  static CommutativeGroup modp(std::size_t bits) {
    if (bits == 768) {
      return CommutativeGroup(BigInt(
          "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
          "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
          "4FE1356D6D51C245E485B576625E7EC6F44C42E9A63A3620FFFFFFFFFFFFFFFF",
          16));
    }
    if (bits == 1024) {
      return CommutativeGroup(BigInt(
          "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
          "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
          "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
          "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE65381FFFFFFFFFFFFFFFF",
          16));
    }
    throw ConfigError("no built-in group with " + std::to_string(bits) +
                      " bits (use 768 or 1024)");
  }

  const BigInt& modulus() const { return p_; }
  const BigInt& order() const { return q_; }

  // Hash of the id into the QR subgroup: expand the id to |p| bits with a
  // counter-mode mix, reduce, square. Degenerate elements (0, +-1) are
  // rejected and rehashed with the next counter.
  BigInt embed(RecordId id) const {
    const std::size_t bits = bit_length(p_) + 64;
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
      BigInt h = 0;
      std::uint64_t counter = 0;
      for (std::size_t have = 0; have < bits; have += 64) {
        h <<= 64;
        h += from_u64(mix64(mix64(id) ^ mix64(attempt * 0x10001ULL + counter++)));
      }
      h = mod(h, p_);
      if (h <= 1 || h == p_ - 1) continue;
      BigInt g = mod(h * h, p_);
      if (g != 1) return g;
    }
    throw EncodingError("cannot embed id " + std::to_string(id));
  }

 private:
  BigInt p_;
  BigInt q_;
};

// Secret exponent in [2, q - 1]; E_e(x) = x^e mod p.
class CommutativeKey {
 public:
  static CommutativeKey generate(const CommutativeGroup& group, Rng& rng) {
    BigInt e;
    do {
      e = random_below(group.order(), rng);
    } while (e < 2);
    return CommutativeKey(group, std::move(e));
  }

  BigInt encrypt(const BigInt& x) const { return powm(x, e_, group_->modulus()); }

 private:
  CommutativeKey(const CommutativeGroup& group, BigInt e)
      : group_(&group), e_(std::move(e)) {}

  const CommutativeGroup* group_;
  BigInt e_;
};

namespace detail {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

}  // namespace detail

// Round-robin commutative-encryption intersection cardinality. Provider i
// embeds and encrypts its ids, then the ciphertext set travels through
// providers i+1, ..., i+k-1 (mod k), each re-encrypting and shuffling. The
// client receives k fully encrypted sets and counts elements common to all,
// never seeing plaintext ids.
inline std::uint64_t commutative_intersection_size(
    std::span<const IdSet> id_sets, const CommutativeGroup& group,
    std::span<const CommutativeKey> keys, Rng& rng, CostLedger& ledger,
    Transcript* transcript = nullptr) {
  const std::size_t k = id_sets.size();
  if (k < 2) throw DomainError("commutative intersection needs >= 2 providers");
  if (keys.size() != k) throw DomainError("need one key per provider");

  std::vector<std::vector<BigInt>> final_sets;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<BigInt> cts;
    cts.reserve(id_sets[i].size());
    for (RecordId id : id_sets[i]) cts.push_back(keys[i].encrypt(group.embed(id)));
    ledger.add_ciphertext_operations(cts.size());
    detail::shuffle(cts, rng);
    for (std::size_t hop = 1; hop < k; ++hop) {
      const std::size_t j = (i + hop) % k;
      ledger.add_records_transferred(cts.size());
      ledger.add_messages(1);
      if (transcript) {
        transcript->record("P" + std::to_string((i + hop - 1) % k),
                           "P" + std::to_string(j), "ciphertext-set",
                           cts.size());
      }
      for (auto& c : cts) c = keys[j].encrypt(c);
      ledger.add_ciphertext_operations(cts.size());
      detail::shuffle(cts, rng);
    }
    ledger.add_records_transferred(cts.size());
    ledger.add_messages(1);
    if (transcript) {
      transcript->record("P" + std::to_string((i + k - 1) % k), "client",
                         "ciphertext-set", cts.size());
    }
    std::sort(cts.begin(), cts.end());
    final_sets.push_back(std::move(cts));
  }

  std::vector<BigInt> common = final_sets[0];
  for (std::size_t i = 1; i < k; ++i) {
    std::vector<BigInt> next;
    std::set_intersection(common.begin(), common.end(), final_sets[i].begin(),
                          final_sets[i].end(), std::back_inserter(next));
    common = std::move(next);
  }
  return common.size();
}

}  // namespace vpjoin::privacy

#endif  // VPJOIN_PRIVACY_COMMUTATIVE_HPP_

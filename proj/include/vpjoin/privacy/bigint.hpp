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

#ifndef VPJOIN_PRIVACY_BIGINT_HPP_
#define VPJOIN_PRIVACY_BIGINT_HPP_

#include <gmpxx.h>

#include <cstdint>

#include "vpjoin/random.hpp"

namespace vpjoin::privacy {

using BigInt = mpz_class;

inline BigInt from_u64(std::uint64_t v) {
  BigInt out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

// Uniform in [0, 2^bits).
inline BigInt random_bits(std::size_t bits, Rng& rng) {
  BigInt out = 0;
  std::size_t have = 0;
  while (have < bits) {
    out <<= 64;
    out += from_u64(rng.next_u64());
    have += 64;
  }
  if (have > bits) out >>= static_cast<mp_bitcnt_t>(have - bits);
  return out;
}

// Uniform in [0, bound) by rejection.
inline BigInt random_below(const BigInt& bound, Rng& rng) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  while (true) {
    BigInt x = random_bits(bits, rng);
    if (x < bound) return x;
  }
}

// Uniform in [1, bound).
inline BigInt random_nonzero_below(const BigInt& bound, Rng& rng) {
  while (true) {
    BigInt x = random_below(bound, rng);
    if (x != 0) return x;
  }
}

inline BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

inline BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt out;
  mpz_mod(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return out;
}

inline std::size_t bit_length(const BigInt& a) {
  return a == 0 ? 0 : mpz_sizeinbase(a.get_mpz_t(), 2);
}

// Random prime with exactly `bits` bits.
inline BigInt random_prime(std::size_t bits, Rng& rng) {
  BigInt x = random_bits(bits, rng);
  mpz_setbit(x.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 1));
  BigInt p;
  mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
  if (bit_length(p) != bits) return random_prime(bits, rng);
  return p;
}

}  // namespace vpjoin::privacy

#endif  // VPJOIN_PRIVACY_BIGINT_HPP_

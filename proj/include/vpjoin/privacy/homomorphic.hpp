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

#ifndef VPJOIN_PRIVACY_HOMOMORPHIC_HPP_
#define VPJOIN_PRIVACY_HOMOMORPHIC_HPP_

#include <concepts>
#include <cstdint>
#include <numeric>

#include "vpjoin/error.hpp"
#include "vpjoin/privacy/bigint.hpp"
#include "vpjoin/random.hpp"

namespace vpjoin::privacy {

// Additively homomorphic public-key scheme over Z_M:
//   decrypt(add(enc(a), enc(b))) == a + b  (mod M)
//   decrypt(scale(enc(a), c))   == c * a  (mod M)
template <class S>
concept AdditiveHomomorphic = requires(const S& s, const BigInt& pt,
                                       const typename S::Ciphertext& ct,
                                       Rng& rng) {
  { s.plaintext_modulus() } -> std::convertible_to<const BigInt&>;
  { s.encrypt(pt, rng) } -> std::same_as<typename S::Ciphertext>;
  { s.decrypt(ct) } -> std::same_as<BigInt>;
  { s.add(ct, ct) } -> std::same_as<typename S::Ciphertext>;
  { s.scale(ct, pt) } -> std::same_as<typename S::Ciphertext>;
  { S::name() } -> std::convertible_to<const char*>;
};

// Insecure stand-in: the "ciphertext" is the plaintext mod a prime. Keeps
// protocol logic and operation counts identical to the real scheme.
class PlainScheme {
 public:
  struct Ciphertext {
    BigInt value;
  };

  // 2^127 - 1
  PlainScheme() : modulus_((BigInt(1) << 127) - 1) {}
  explicit PlainScheme(BigInt modulus) : modulus_(std::move(modulus)) {}

  static const char* name() { return "plain"; }
  const BigInt& plaintext_modulus() const { return modulus_; }

  Ciphertext encrypt(const BigInt& m, Rng&) const { return {mod(m, modulus_)}; }
  BigInt decrypt(const Ciphertext& c) const { return c.value; }
  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const {
    return {mod(a.value + b.value, modulus_)};
  }
  Ciphertext scale(const Ciphertext& a, const BigInt& k) const {
    return {mod(a.value * k, modulus_)};
  }

 private:
  BigInt modulus_;
};

// Paillier with g = n + 1.
class PaillierScheme {
 public:
  struct Ciphertext {
    BigInt value;
  };

  static PaillierScheme generate(std::size_t modulus_bits, Rng& rng) {
    if (modulus_bits < 64 || modulus_bits % 2 != 0) {
      throw ConfigError("paillier modulus bits must be even and >= 64");
    }
    while (true) {
      BigInt p = random_prime(modulus_bits / 2, rng);
      BigInt q = random_prime(modulus_bits / 2, rng);
      if (p == q) continue;
      BigInt n = p * q;
      BigInt phi = (p - 1) * (q - 1);
      BigInt g;
      mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
      if (g != 1 || bit_length(n) != modulus_bits) continue;
      return PaillierScheme(p, q);
    }
  }

  static const char* name() { return "paillier"; }
  const BigInt& plaintext_modulus() const { return n_; }
  const BigInt& ciphertext_modulus() const { return n2_; }

  Ciphertext encrypt(const BigInt& m, Rng& rng) const {
    BigInt r;
    BigInt g;
    do {
      r = random_nonzero_below(n_, rng);
      mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t());
    } while (g != 1);
    // (1 + m n) r^n mod n^2
    BigInt c = mod(1 + mod(m, n_) * n_, n2_);
    c = mod(c * powm(r, n_, n2_), n2_);
    return {c};
  }

  BigInt decrypt(const Ciphertext& c) const {
    BigInt u = powm(c.value, lambda_, n2_);
    BigInt l = (u - 1) / n_;
    return mod(l * mu_, n_);
  }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const {
    return {mod(a.value * b.value, n2_)};
  }

  Ciphertext scale(const Ciphertext& a, const BigInt& k) const {
    return {powm(a.value, mod(k, n_), n2_)};
  }

 private:
  PaillierScheme(const BigInt& p, const BigInt& q) : n_(p * q) {
    n2_ = n_ * n_;
    BigInt pm1 = p - 1;
    BigInt qm1 = q - 1;
    mpz_lcm(lambda_.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    // With g = n + 1, L(g^lambda mod n^2) = lambda mod n.
    if (mpz_invert(mu_.get_mpz_t(), lambda_.get_mpz_t(), n_.get_mpz_t()) == 0) {
      throw ConfigError("paillier: lambda not invertible mod n");
    }
  }

  BigInt n_;
  BigInt n2_;
  BigInt lambda_;
  BigInt mu_;
};

static_assert(AdditiveHomomorphic<PlainScheme>);
static_assert(AdditiveHomomorphic<PaillierScheme>);

}  // namespace vpjoin::privacy

#endif  // VPJOIN_PRIVACY_HOMOMORPHIC_HPP_

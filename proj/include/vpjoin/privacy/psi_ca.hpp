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

#ifndef VPJOIN_PRIVACY_PSI_CA_HPP_
#define VPJOIN_PRIVACY_PSI_CA_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vpjoin/error.hpp"
#include "vpjoin/id_set.hpp"
#include "vpjoin/ledger.hpp"
#include "vpjoin/privacy/bigint.hpp"
#include "vpjoin/privacy/commutative.hpp"
#include "vpjoin/privacy/homomorphic.hpp"
#include "vpjoin/privacy/laplace.hpp"
#include "vpjoin/random.hpp"

namespace vpjoin::privacy {

// The "0+" marker: a decrypted value whose low `bits` bits are all zero.
// A blinded non-root hits it with probability 2^-bits.
struct ZeroMarker {
  std::size_t bits = 64;

  static ZeroMarker for_modulus(const BigInt& modulus) {
    return {std::min<std::size_t>(64, bit_length(modulus) - 1)};
  }

  bool matches(const BigInt& plaintext) const {
    if (plaintext == 0) return true;
    return mpz_scan1(plaintext.get_mpz_t(), 0) >= bits;
  }
};

struct PsiOptions {
  // Largest polynomial degree / evaluated set accepted.
  std::size_t max_set_size = 4096;
  std::optional<ZeroMarker> marker;
  // Both sides pad their transferred sets to at least this many elements.
  std::uint64_t pad_to = 0;
};

// Coefficients of prod (x - r_i) mod M, lowest degree first.
inline std::vector<BigInt> polynomial_from_roots(std::span<const BigInt> roots,
                                                 const BigInt& modulus) {
  std::vector<BigInt> c{BigInt(1)};
  for (const auto& r : roots) {
    std::vector<BigInt> next(c.size() + 1, BigInt(0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= c[j] * r;
    }
    for (auto& x : next) x = mod(x, modulus);
    c = std::move(next);
  }
  return c;
}

inline std::vector<BigInt> multiply_polynomials(std::span<const BigInt> a,
                                                std::span<const BigInt> b,
                                                const BigInt& modulus) {
  std::vector<BigInt> out(a.size() + b.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  for (auto& x : out) x = mod(x, modulus);
  return out;
}

inline BigInt evaluate_polynomial(std::span<const BigInt> coefficients,
                                  const BigInt& x, const BigInt& modulus) {
  BigInt acc = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = mod(acc * x + *it, modulus);
  }
  return acc;
}

template <AdditiveHomomorphic S>
struct EncryptedPolynomial {
  std::vector<typename S::Ciphertext> coefficients;  // lowest degree first

  std::size_t degree() const { return coefficients.size() - 1; }
};

template <AdditiveHomomorphic S>
EncryptedPolynomial<S> encrypt_polynomial(const S& scheme,
                                          std::span<const BigInt> coefficients,
                                          Rng& rng, CostLedger& ledger) {
  EncryptedPolynomial<S> out;
  out.coefficients.reserve(coefficients.size());
  for (const auto& c : coefficients) {
    out.coefficients.push_back(scheme.encrypt(c, rng));
  }
  ledger.add_ciphertext_operations(coefficients.size());
  return out;
}

// Enc(r * P(y) + 0): Horner evaluation, blinding by a fresh nonzero r and
// re-randomization by adding a fresh encryption of the zero tag.
template <AdditiveHomomorphic S>
typename S::Ciphertext evaluate_blinded(const S& scheme,
                                        const EncryptedPolynomial<S>& poly,
                                        const BigInt& y, Rng& rng,
                                        CostLedger& ledger) {
  const auto& cs = poly.coefficients;
  auto acc = cs.back();
  for (std::size_t j = cs.size() - 1; j-- > 0;) {
    acc = scheme.add(scheme.scale(acc, y), cs[j]);
  }
  const BigInt r = random_nonzero_below(scheme.plaintext_modulus(), rng);
  acc = scheme.add(scheme.scale(acc, r), scheme.encrypt(BigInt(0), rng));
  ledger.add_ciphertext_operations(2 * (cs.size() - 1) + 3);
  return acc;
}

namespace detail {

inline void check_capacity(std::size_t n, const PsiOptions& opt) {
  if (n > opt.max_set_size) {
    throw CapacityError("set of " + std::to_string(n) +
                        " elements exceeds PSI capacity " +
                        std::to_string(opt.max_set_size));
  }
}

inline BigInt encode_id(RecordId id, const BigInt& modulus) {
  BigInt x = from_u64(id);
  if (x >= modulus) throw EncodingError("id does not fit the plaintext space");
  return x;
}

// Dummies live in [2^64, 2^65): outside every id. The parity separates the
// root side (even) from the evaluating side (odd) so dummies never match.
inline BigInt dummy_value(bool evaluator, Rng& rng) {
  BigInt x = from_u64(rng.next_u64() & ~1ULL);
  if (evaluator) x += 1;
  return x + (BigInt(1) << 64);
}

struct PartyInput {
  std::vector<BigInt> elements;  // real ids plus dummies and filler
};

inline PartyInput pad(const IdSet& ids, std::uint64_t dummies,
                      std::uint64_t target, bool evaluator,
                      const BigInt& modulus, Rng& rng) {
  PartyInput p;
  for (RecordId id : ids) p.elements.push_back(encode_id(id, modulus));
  for (std::uint64_t i = 0; i < dummies; ++i) {
    p.elements.push_back(dummy_value(evaluator, rng));
  }
  while (p.elements.size() < target) {
    p.elements.push_back(dummy_value(evaluator, rng));
  }
  return p;
}

// Core counting protocol among t >= 2 parties. Party 0 holds the key and
// counts; parties 1..t-2 add their root polynomials masked by random
// polynomials (sum_i R_i P_i keeps exactly the common roots); party t-1
// evaluates the summed encrypted polynomial on its elements and appends
// fake_matches encryptions of the zero tag. Returns the marker count.
template <AdditiveHomomorphic S>
std::uint64_t count_common_roots(const S& scheme,
                                 std::span<const PartyInput> roots_side,
                                 const PartyInput& evaluator,
                                 std::uint64_t fake_matches,
                                 const ZeroMarker& marker, Rng& rng,
                                 CostLedger& ledger, Transcript* transcript) {
  const BigInt& M = scheme.plaintext_modulus();
  std::size_t degree = 0;
  for (const auto& p : roots_side) degree = std::max(degree, p.elements.size());

  std::optional<EncryptedPolynomial<S>> sum;
  for (std::size_t i = 0; i < roots_side.size(); ++i) {
    auto coeffs = polynomial_from_roots(roots_side[i].elements, M);
    if (roots_side.size() > 1) {
      std::vector<BigInt> mask(degree - roots_side[i].elements.size() + 1);
      for (auto& c : mask) c = random_below(M, rng);
      mask.back() = random_nonzero_below(M, rng);
      coeffs = multiply_polynomials(coeffs, mask, M);
    }
    auto enc = encrypt_polynomial(scheme, coeffs, rng, ledger);
    ledger.add_records_transferred(enc.coefficients.size());
    ledger.add_messages(1);
    if (transcript) {
      transcript->record("party" + std::to_string(i),
                         roots_side.size() > 1 ? "client" : "evaluator",
                         "encrypted-polynomial", enc.coefficients.size());
    }
    if (!sum) {
      sum = std::move(enc);
    } else {
      for (std::size_t j = 0; j < sum->coefficients.size(); ++j) {
        sum->coefficients[j] =
            scheme.add(sum->coefficients[j], enc.coefficients[j]);
      }
      ledger.add_ciphertext_operations(sum->coefficients.size());
    }
  }
  if (roots_side.size() > 1) {
    ledger.add_records_transferred(sum->coefficients.size());
    ledger.add_messages(1);
    if (transcript) {
      transcript->record("client", "evaluator", "encrypted-polynomial",
                         sum->coefficients.size());
    }
  }

  std::vector<typename S::Ciphertext> replies;
  replies.reserve(evaluator.elements.size() + fake_matches);
  for (const auto& y : evaluator.elements) {
    replies.push_back(evaluate_blinded(scheme, *sum, y, rng, ledger));
  }
  for (std::uint64_t i = 0; i < fake_matches; ++i) {
    replies.push_back(scheme.encrypt(BigInt(0), rng));
  }
  ledger.add_ciphertext_operations(fake_matches);
  vpjoin::privacy::detail::shuffle(replies, rng);
  ledger.add_records_transferred(replies.size());
  ledger.add_messages(1);
  if (transcript) {
    transcript->record("evaluator", "party0", "blinded-evaluations",
                       replies.size());
  }

  std::uint64_t count = 0;
  for (const auto& c : replies) count += marker.matches(scheme.decrypt(c)) ? 1 : 0;
  ledger.add_ciphertext_operations(replies.size());
  return count;
}

}  // namespace detail

// |set_a cap set_b| revealed to A only. A sends the encrypted polynomial
// with roots set_a; B returns Enc(r_y P(y) + 0) for each y, shuffled; A
// counts decryptions carrying the zero marker.
template <AdditiveHomomorphic S>
std::uint64_t psi_ca(const IdSet& set_a, const IdSet& set_b, const S& scheme,
                     Rng& rng, CostLedger& ledger, const PsiOptions& opt = {},
                     Transcript* transcript = nullptr) {
  if (set_a.empty() || set_b.empty()) {
    throw DomainError("psi_ca: sets must be nonempty");
  }
  detail::check_capacity(std::max(set_a.size(), set_b.size()), opt);
  const BigInt& M = scheme.plaintext_modulus();
  const ZeroMarker marker = opt.marker.value_or(ZeroMarker::for_modulus(M));
  std::vector<detail::PartyInput> roots{
      detail::pad(set_a, 0, opt.pad_to, false, M, rng)};
  auto eval = detail::pad(set_b, 0, opt.pad_to, true, M, rng);
  detail::check_capacity(std::max(roots[0].elements.size(), eval.elements.size()),
                         opt);
  return detail::count_common_roots(scheme, roots, eval, 0, marker, rng, ledger,
                                    transcript);
}

// Outcome of a noisy PSI-CA. A holds `noisy` (true + B's dummy matches);
// B holds `noise_record` (its dummy-match count). The public offset is the
// center of the dummy law, so estimate() is unbiased.
struct BnPsiCaResult {
  NoisyCount noisy;
  std::uint64_t noise_record = 0;
  std::int64_t offset = 0;
  std::uint64_t padded_roots = 0;
  std::uint64_t padded_evaluations = 0;

  double estimate() const {
    return static_cast<double>(noisy.value) - static_cast<double>(offset);
  }
};

// Noisy PSI-CA among parties[0] (key holder, learns the noisy count),
// parties[1..t-2] (contribute masked root polynomials) and parties[t-1]
// (evaluator, adds the noise). Root sides pad with non-matching dummies to
// max(pad_to, |set|) + max_dummies. The evaluator appends d fake matches,
// d drawn from the truncated discrete Laplace law, and pads its reply to the
// same width so the reply size does not reveal d.
template <AdditiveHomomorphic S>
BnPsiCaResult bn_psi_ca_multi(std::span<const IdSet> parties,
                              const PrivacyParams& params, const S& scheme,
                              Rng& rng, CostLedger& ledger,
                              const PsiOptions& opt = {},
                              Transcript* transcript = nullptr) {
  params.validate();
  if (parties.size() < 2) throw DomainError("bn_psi_ca: need >= 2 parties");
  const BigInt& M = scheme.plaintext_modulus();
  const ZeroMarker marker = opt.marker.value_or(ZeroMarker::for_modulus(M));

  std::vector<detail::PartyInput> roots;
  for (std::size_t i = 0; i + 1 < parties.size(); ++i) {
    const std::uint64_t target =
        std::max<std::uint64_t>(opt.pad_to, parties[i].size()) +
        params.max_dummies;
    roots.push_back(detail::pad(parties[i], 0, target, false, M, rng));
  }
  const IdSet& last = parties.back();
  const auto noise = draw_dummy_count(params, rng);
  const std::uint64_t eval_target =
      std::max<std::uint64_t>(opt.pad_to, last.size()) + params.max_dummies;
  // Fake matches count toward the padded reply size.
  auto eval = detail::pad(last, 0, eval_target - noise.count, true, M, rng);

  std::size_t widest = eval.elements.size() + noise.count;
  for (const auto& r : roots) widest = std::max(widest, r.elements.size());
  detail::check_capacity(widest, opt);

  BnPsiCaResult out;
  out.noise_record = noise.count;
  out.offset = static_cast<std::int64_t>(params.max_dummies / 2);
  out.padded_roots = roots.front().elements.size();
  out.padded_evaluations = eval.elements.size() + noise.count;
  out.noisy.value = detail::count_common_roots(scheme, roots, eval, noise.count,
                                               marker, rng, ledger, transcript);
  out.noisy.epsilon_spent = params.epsilon;
  return out;
}

template <AdditiveHomomorphic S>
BnPsiCaResult bn_psi_ca(const IdSet& set_a, const IdSet& set_b,
                        const PrivacyParams& params, const S& scheme, Rng& rng,
                        CostLedger& ledger, const PsiOptions& opt = {},
                        Transcript* transcript = nullptr) {
  const IdSet parties[] = {set_a, set_b};
  return bn_psi_ca_multi(std::span<const IdSet>(parties), params, scheme, rng,
                         ledger, opt, transcript);
}

}  // namespace vpjoin::privacy

#endif  // VPJOIN_PRIVACY_PSI_CA_HPP_

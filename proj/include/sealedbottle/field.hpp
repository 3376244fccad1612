#pragma once

#include <gmpxx.h>

#include <optional>
#include <span>
#include <vector>

#include "sealedbottle/bytes.hpp"

namespace sbtl {

using Big = mpz_class;

Big big_from_bytes_be(std::span<const std::uint8_t> bytes);

// Fixed-width big-endian encoding; throws if the value does not fit.
void big_to_bytes_be(const Big& v, std::span<std::uint8_t> out);

template <std::size_t N>
Bytes<N> big_to_array_be(const Big& v) {
  Bytes<N> out{};
  big_to_bytes_be(v, std::span<std::uint8_t>(out.data(), N));
  return out;
}

// Prime field used to solve the hint system exactly. The default modulus is
// the smallest prime above 2^256 so every attribute hash embeds injectively.
struct Field {
  Big modulus;

  explicit Field(Big q) : modulus(std::move(q)) {}

  Big reduce(const Big& v) const {
    Big r = v % modulus;
    if (r < 0) r += modulus;
    return r;
  }
  Big add(const Big& a, const Big& b) const { return (a + b) % modulus; }
  Big sub(const Big& a, const Big& b) const { return reduce(a - b); }
  Big mul(const Big& a, const Big& b) const { return (a * b) % modulus; }
  // Multiplicative inverse; nullopt when v ≡ 0.
  std::optional<Big> inv(const Big& v) const;
};

// q = 2^256 + 297, the smallest prime exceeding 2^256.
extern const char kHashFieldModulusHex[];
const Field& hash_field();

// 2^256, the exclusive upper bound for values that decode to a Hash256.
const Big& hash_bound();

}  // namespace sbtl

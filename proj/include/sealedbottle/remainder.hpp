#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sealedbottle/bytes.hpp"

namespace sbtl {

// Deterministic Miller-Rabin for 32-bit inputs.
bool is_prime_u32(std::uint32_t n);

// 256-bit big-endian hash value mod p.
std::uint32_t residue_mod(const Hash256& hash, std::uint32_t p);

// Per-position residues of the request hashes mod a small prime p. A residue
// mismatch proves the hashes differ; agreement proves nothing.
struct RemainderVector {
  std::uint32_t prime = 0;
  std::vector<std::uint32_t> residues;  // one per request position

  std::uint16_t attr_count() const { return static_cast<std::uint16_t>(residues.size()); }
};

// Throws non_prime_modulus / modulus_too_small (requires p prime, p > m_t).
RemainderVector build_remainder_vector(std::span<const Hash256> request_order, std::uint32_t p);

// subsets[i] = indices x of the user's sorted hashes with hash[x] ≡ residues[i] (mod p).
std::vector<std::vector<std::uint32_t>> candidate_subsets(std::span<const Hash256> user_hashes,
                                                          const RemainderVector& rv);

}  // namespace sbtl

#include "sealedbottle/remainder.hpp"

#include "sealedbottle/errors.hpp"

namespace sbtl {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t small : {2u, 3u, 5u, 7u, 11u, 13u}) {
    if (n == small) return true;
    if (n % small == 0) return false;
  }
  std::uint32_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // bases {2, 7, 61} are a deterministic witness set below 2^32
  for (std::uint64_t a : {2ull, 7ull, 61ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint32_t residue_mod(const Hash256& hash, std::uint32_t p) {
  std::uint64_t r = 0;
  for (std::uint8_t byte : hash) r = (r * 256 + byte) % p;
  return static_cast<std::uint32_t>(r);
}

RemainderVector build_remainder_vector(std::span<const Hash256> request_order, std::uint32_t p) {
  if (!is_prime_u32(p)) throw Error(Errc::non_prime_modulus, "remainder modulus is not prime");
  if (p <= request_order.size()) {
    throw Error(Errc::modulus_too_small, "remainder modulus must exceed the attribute count");
  }
  RemainderVector rv;
  rv.prime = p;
  rv.residues.reserve(request_order.size());
  for (const auto& h : request_order) rv.residues.push_back(residue_mod(h, p));
  return rv;
}

std::vector<std::vector<std::uint32_t>> candidate_subsets(std::span<const Hash256> user_hashes,
                                                          const RemainderVector& rv) {
  std::vector<std::uint32_t> user_residues;
  user_residues.reserve(user_hashes.size());
  for (const auto& h : user_hashes) user_residues.push_back(residue_mod(h, rv.prime));

  std::vector<std::vector<std::uint32_t>> subsets(rv.residues.size());
  for (std::size_t i = 0; i < rv.residues.size(); ++i) {
    for (std::uint32_t x = 0; x < user_residues.size(); ++x) {
      if (user_residues[x] == rv.residues[i]) subsets[i].push_back(x);
    }
  }
  return subsets;
}

}  // namespace sbtl

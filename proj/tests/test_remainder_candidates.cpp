#include <algorithm>
#include <set>

#include "doctest.h"
#include "sealedbottle/candidates.hpp"
#include "sealedbottle/errors.hpp"
#include "sealedbottle/remainder.hpp"
#include "sealedbottle/rng.hpp"

using namespace sbtl;

namespace {

Hash256 hash_of(std::uint64_t v) {
  Hash256 h{};
  store_be64(h.data() + 24, v);
  return h;
}

// Independent oracle: brute force over every choice vector (any index or,
// at optional positions, UNKNOWN), then filter the candidate conditions.
std::vector<std::vector<std::uint32_t>> brute_force_assignments(
    const std::vector<std::vector<std::uint32_t>>& subsets, std::uint16_t alpha,
    std::uint16_t gamma, std::size_t user_size) {
  std::vector<std::vector<std::uint32_t>> result;
  std::vector<std::uint32_t> choice(subsets.size());
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == subsets.size()) {
      // all conditions checked here, independently of the implementation
      std::uint32_t unknowns = 0;
      std::set<std::uint32_t> used;
      std::uint32_t last_nec = 0;
      bool nec_seen = false;
      std::uint32_t last_opt = 0;
      bool opt_seen = false;
      for (std::size_t i = 0; i < choice.size(); ++i) {
        const std::uint32_t c = choice[i];
        if (c == kUnknownIndex) {
          if (i < alpha) return;
          ++unknowns;
          continue;
        }
        if (std::find(subsets[i].begin(), subsets[i].end(), c) == subsets[i].end()) return;
        if (used.count(c)) return;
        used.insert(c);
        if (i < alpha) {
          if (nec_seen && c <= last_nec) return;
          last_nec = c;
          nec_seen = true;
        } else {
          if (opt_seen && c <= last_opt) return;
          last_opt = c;
          opt_seen = true;
        }
      }
      if (unknowns > gamma) return;
      result.push_back(choice);
      return;
    }
    for (std::uint32_t x = 0; x < user_size; ++x) {
      choice[pos] = x;
      self(self, pos + 1);
    }
    choice[pos] = kUnknownIndex;
    self(self, pos + 1);
  };
  rec(rec, 0);
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

TEST_CASE("32-bit primality") {
  CHECK(is_prime_u32(2));
  CHECK(is_prime_u32(3));
  CHECK(is_prime_u32(11));
  CHECK(is_prime_u32(13));
  CHECK(is_prime_u32(4294967291u));
  CHECK(!is_prime_u32(0));
  CHECK(!is_prime_u32(1));
  CHECK(!is_prime_u32(9));
  CHECK(!is_prime_u32(4294967295u));
}

TEST_CASE("hash residues") {
  CHECK(residue_mod(hash_of(37), 11) == 4);
  CHECK(residue_mod(hash_of(0), 11) == 0);
  // Horner reduction agrees with small arithmetic on crafted values
  CHECK(residue_mod(hash_of((1ull << 40) + 3), 7) == ((1ull << 40) + 3) % 7);
}

TEST_CASE("remainder vector construction guards its modulus") {
  std::vector<Hash256> hashes = {hash_of(1), hash_of(2), hash_of(3)};
  const RemainderVector rv =
      build_remainder_vector(std::span<const Hash256>(hashes.data(), 3), 11);
  CHECK(rv.prime == 11);
  CHECK(rv.residues == std::vector<std::uint32_t>{1, 2, 3});

  CHECK_THROWS_AS(build_remainder_vector(std::span<const Hash256>(hashes.data(), 3), 9), Error);
  CHECK_THROWS_AS(build_remainder_vector(std::span<const Hash256>(hashes.data(), 3), 3), Error);
}

TEST_CASE("equal hashes give equal residues") {
  DetRng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const Hash256 h = rng.bytes<32>();
    const std::uint32_t p = 11;
    CHECK(residue_mod(h, p) == residue_mod(h, p));
    // contrapositive of the exclusion theorem: differing residues imply
    // differing hashes — here checked as residue equality for equal inputs
  }
}

TEST_CASE("candidate subsets collect residue-consistent positions") {
  // user residues (4, 7, 4) against request residue 4 -> positions {0, 2}
  std::vector<Hash256> user = {hash_of(4), hash_of(7), hash_of(15)};
  std::vector<Hash256> request = {hash_of(4)};
  const RemainderVector rv =
      build_remainder_vector(std::span<const Hash256>(request.data(), 1), 11);
  const auto subsets = candidate_subsets(std::span<const Hash256>(user.data(), 3), rv);
  REQUIRE(subsets.size() == 1);
  CHECK(subsets[0] == std::vector<std::uint32_t>{0, 2});

  std::vector<Hash256> no_match = {hash_of(5)};
  const RemainderVector rv2 =
      build_remainder_vector(std::span<const Hash256>(no_match.data(), 1), 11);
  CHECK(candidate_subsets(std::span<const Hash256>(user.data(), 3), rv2)[0].empty());
}

TEST_CASE("enumeration of the worked example") {
  // m_t=3, α=1, γ=1; request residues (2,5,9); user residues (2,5,3,9)
  const std::vector<std::vector<std::uint32_t>> subsets = {{0}, {1}, {3}};
  const auto assignments = enumerate_candidates(subsets, 1, 1);
  // the full assignment plus the two one-unknown variants γ=1 allows
  REQUIRE(assignments.size() == 3);
  CHECK(assignments[0].choice == std::vector<std::uint32_t>{0, 1, 3});
  CHECK(assignments[1].choice == std::vector<std::uint32_t>{0, 1, kUnknownIndex});
  CHECK(assignments[2].choice == std::vector<std::uint32_t>{0, kUnknownIndex, 3});
  CHECK(assignments[0].unknown_count() == 0);

  const auto oracle = brute_force_assignments(subsets, 1, 1, 4);
  CHECK(oracle.size() == 3);
}

TEST_CASE("an empty optional subset forces UNKNOWN there") {
  const std::vector<std::vector<std::uint32_t>> subsets = {{0}, {1}, {}};
  const auto assignments = enumerate_candidates(subsets, 1, 1);
  REQUIRE(assignments.size() == 1);
  CHECK(assignments[0].choice == std::vector<std::uint32_t>{0, 1, kUnknownIndex});
}

TEST_CASE("an empty necessary subset excludes the participant") {
  const std::vector<std::vector<std::uint32_t>> subsets = {{}, {1}, {2}};
  CHECK(enumerate_candidates(subsets, 1, 1).empty());
}

TEST_CASE("order is preserved: (0,1) is emitted, (1,0) never") {
  const std::vector<std::vector<std::uint32_t>> subsets = {{0, 1}, {0, 1}};
  const auto assignments = enumerate_candidates(subsets, 0, 0);
  REQUIRE(assignments.size() == 1);
  CHECK(assignments[0].choice == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("every emitted assignment is segment-monotone and injective") {
  DetRng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint16_t m_t = static_cast<std::uint16_t>(1 + rng.below(5));
    const std::uint16_t alpha = static_cast<std::uint16_t>(rng.below(m_t + 1));
    const std::uint16_t gamma =
        static_cast<std::uint16_t>(rng.below(static_cast<std::uint16_t>(m_t - alpha) + 1));
    const std::size_t user_size = 1 + rng.below(6);
    std::vector<std::vector<std::uint32_t>> subsets(m_t);
    for (auto& s : subsets) {
      for (std::uint32_t x = 0; x < user_size; ++x) {
        if (rng.below(3) == 0) s.push_back(x);
      }
    }
    const auto got = enumerate_candidates(subsets, alpha, gamma, 100000);
    std::vector<std::vector<std::uint32_t>> got_choices;
    for (const auto& a : got) {
      REQUIRE(a.choice.size() == m_t);
      // monotone inside each segment
      std::uint32_t last = 0;
      bool seen = false;
      for (std::uint16_t i = 0; i < alpha; ++i) {
        if (a.choice[i] == kUnknownIndex) continue;
        if (seen) CHECK(a.choice[i] > last);
        last = a.choice[i];
        seen = true;
      }
      last = 0;
      seen = false;
      for (std::uint16_t i = alpha; i < m_t; ++i) {
        if (a.choice[i] == kUnknownIndex) continue;
        if (seen) CHECK(a.choice[i] > last);
        last = a.choice[i];
        seen = true;
      }
      got_choices.push_back(a.choice);
    }
    // and the set equals the brute-force oracle
    std::sort(got_choices.begin(), got_choices.end());
    CHECK(got_choices == brute_force_assignments(subsets, alpha, gamma, user_size));
  }
}

TEST_CASE("emission order is lexicographic with UNKNOWN last") {
  const std::vector<std::vector<std::uint32_t>> subsets = {{0, 1}, {0, 1, 2}};
  auto assignments = enumerate_candidates(subsets, 0, 2);
  auto rank = [](const CandidateAssignment& a) { return a.choice; };
  for (std::size_t i = 1; i < assignments.size(); ++i) {
    CHECK(rank(assignments[i - 1]) < rank(assignments[i]));
  }
}

TEST_CASE("the enumeration limit trips on combinatorial profiles") {
  std::vector<std::uint32_t> everything;
  for (std::uint32_t x = 0; x < 20; ++x) everything.push_back(x);
  const std::vector<std::vector<std::uint32_t>> subsets(6, everything);
  CHECK_THROWS_AS(enumerate_candidates(subsets, 0, 0, 64), Error);
  try {
    enumerate_candidates(subsets, 0, 0, 64);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::limit_exceeded);
  }
  CHECK_THROWS_AS(enumerate_candidates(subsets, 0, 0, 0), Error);  // limit must be >= 1
}

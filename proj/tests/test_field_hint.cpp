#include <gmpxx.h>

#include <vector>

#include "doctest.h"
#include "sealedbottle/errors.hpp"
#include "sealedbottle/hint.hpp"
#include "sealedbottle/rng.hpp"

using namespace sbtl;

namespace {

const Field kToyField{Big(101)};

// Substitution oracle: recompute B rows directly from a complete solution.
bool satisfies_system(const HintMatrix& hm, const std::vector<Big>& values, const Field& f) {
  for (std::size_t row = 0; row < hm.gamma; ++row) {
    Big b = values[row];
    for (std::size_t col = 0; col < hm.beta; ++col) {
      b = f.add(b, f.mul(Big(hm.r_at(row, col)), values[hm.gamma + col]));
    }
    if (f.reduce(b) != hm.checksum[row]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("the hash field modulus is the smallest prime above 2^256") {
  const Big& q = hash_field().modulus;
  CHECK(q == Big(kHashFieldModulusHex, 16));
  CHECK(q > hash_bound());
  CHECK(q - hash_bound() == 297);
  CHECK(mpz_probab_prime_p(q.get_mpz_t(), 40) >= 1);
  // primality oracle over the whole gap: nothing prime strictly between
  for (Big c = hash_bound() + 1; c < q; ++c) {
    CAPTURE(c.get_str());
    CHECK(mpz_probab_prime_p(c.get_mpz_t(), 25) == 0);
  }
}

TEST_CASE("byte encode/decode of field values") {
  DetRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Hash256 h = rng.bytes<32>();
    const Big v = big_from_bytes_be(std::span<const std::uint8_t>(h.data(), 32));
    CHECK(big_to_array_be<32>(v) == h);
    CHECK(v < hash_bound());
  }
  CHECK_THROWS_AS(big_to_array_be<32>(hash_bound()), Error);  // needs 33 bytes
  CHECK(big_to_array_be<33>(hash_field().modulus - 1).size() == 33);
}

TEST_CASE("field inverse") {
  const Field& f = hash_field();
  CHECK(!f.inv(Big(0)));
  CHECK(f.mul(*f.inv(Big(7)), Big(7)) == 1);
  CHECK(*kToyField.inv(Big(7)) == 29);  // 7·29 = 203 = 2·101 + 1
}

TEST_CASE("toy hint matrix from the worked example") {
  // γ=1, β=2, q=101, optional hashes (9, 5, 6), R = [7, 3]
  HintMatrix hm;
  hm.gamma = 1;
  hm.beta = 2;
  hm.random_block = {7, 3};
  hm.checksum = {Big((9 + 7 * 5 + 3 * 6) % 101)};
  CHECK(hm.checksum[0] == 62);

  SUBCASE("unknown at the identity position") {
    std::vector<std::optional<Big>> values = {std::nullopt, Big(5), Big(6)};
    const HintSolution sol = solve_hint(values, hm, kToyField);
    REQUIRE(sol.status == HintSolveStatus::ok);
    CHECK(sol.optional_hashes[0] == 9);  // 62 - 35 - 18
    CHECK(satisfies_system(hm, sol.optional_hashes, kToyField));
  }
  SUBCASE("unknown at an R column") {
    std::vector<std::optional<Big>> values = {Big(9), std::nullopt, Big(6)};
    const HintSolution sol = solve_hint(values, hm, kToyField);
    REQUIRE(sol.status == HintSolveStatus::ok);
    CHECK(sol.optional_hashes[1] == 5);  // 7·h = 35, 7⁻¹ = 29 mod 101
  }
  SUBCASE("zero unknowns returns the knowns unchanged") {
    std::vector<std::optional<Big>> values = {Big(9), Big(5), Big(6)};
    const HintSolution sol = solve_hint(values, hm, kToyField);
    REQUIRE(sol.status == HintSolveStatus::ok);
    CHECK(sol.optional_hashes == std::vector<Big>{Big(9), Big(5), Big(6)});
  }
  SUBCASE("too many unknowns is a caller bug") {
    std::vector<std::optional<Big>> values = {std::nullopt, std::nullopt, Big(6)};
    CHECK_THROWS_AS(solve_hint(values, hm, kToyField), Error);
  }
}

TEST_CASE("building a hint matrix is deterministic and nonzero") {
  std::vector<Big> hashes = {Big(9), Big(5), Big(6)};
  DetRng rng1(10), rng2(10);
  const HintMatrix a =
      build_hint_matrix(std::span<const Big>(hashes.data(), 3), 1, kToyField, rng1);
  const HintMatrix b =
      build_hint_matrix(std::span<const Big>(hashes.data(), 3), 1, kToyField, rng2);
  CHECK(a == b);
  for (auto r : a.random_block) CHECK(r != 0);
  CHECK(satisfies_system(a, hashes, kToyField));
  DetRng rng3(1);
  CHECK_THROWS_AS(build_hint_matrix(std::span<const Big>(hashes.data(), 3), 0, kToyField, rng3),
                  Error);
}

TEST_CASE("singular random blocks are reported, not mis-solved") {
  // two proportional R columns make the unknown sub-matrix rank 1
  HintMatrix hm;
  hm.gamma = 2;
  hm.beta = 2;
  hm.random_block = {2, 4, 1, 2};  // rows (2,4) and (1,2)
  hm.checksum = {Big(50), Big(60)};
  std::vector<std::optional<Big>> values = {Big(3), Big(4), std::nullopt, std::nullopt};
  CHECK(solve_hint(values, hm, kToyField).status == HintSolveStatus::singular);
}

TEST_CASE("over-determined rows expose wrong candidates") {
  // γ=2, β=1: unknown only at the R column leaves one checking row
  std::vector<Big> hashes = {Big(9), Big(5), Big(6)};
  DetRng rng(4);
  const HintMatrix hm =
      build_hint_matrix(std::span<const Big>(hashes.data(), 3), 2, kToyField, rng);

  std::vector<std::optional<Big>> right = {Big(9), Big(5), std::nullopt};
  const HintSolution good = solve_hint(right, hm, kToyField);
  REQUIRE(good.status == HintSolveStatus::ok);
  CHECK(good.optional_hashes[2] == 6);

  std::vector<std::optional<Big>> wrong = {Big(9), Big(77), std::nullopt};
  CHECK(solve_hint(wrong, hm, kToyField).status == HintSolveStatus::inconsistent);
}

TEST_CASE("recovered values outside the hash range are rejected") {
  HintMatrix hm;
  hm.gamma = 1;
  hm.beta = 0;
  hm.checksum = {hash_field().modulus - 1};  // no 256-bit preimage
  RecoveryCheck check;
  check.prime = 11;
  check.optional_residues = {0};
  check.bound = hash_bound();
  std::vector<std::optional<Big>> values = {std::nullopt};
  CHECK(solve_hint(values, hm, hash_field(), &check).status ==
        HintSolveStatus::value_out_of_range);
}

TEST_CASE("recovered values must agree with the remainder vector") {
  HintMatrix hm;
  hm.gamma = 1;
  hm.beta = 0;
  hm.checksum = {Big(5)};
  RecoveryCheck check;
  check.prime = 11;
  check.bound = hash_bound();

  std::vector<std::optional<Big>> values = {std::nullopt};
  check.optional_residues = {5};
  CHECK(solve_hint(values, hm, hash_field(), &check).status == HintSolveStatus::ok);
  check.optional_residues = {6};
  CHECK(solve_hint(values, hm, hash_field(), &check).status ==
        HintSolveStatus::residue_mismatch);
}

TEST_CASE("random instances recover the original hashes exactly") {
  DetRng rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::uint16_t gamma = static_cast<std::uint16_t>(1 + rng.below(3));
    const std::uint16_t beta = static_cast<std::uint16_t>(1 + rng.below(4));
    const std::size_t cols = gamma + beta;
    std::vector<Big> hashes;
    for (std::size_t i = 0; i < cols; ++i) {
      const Hash256 h = rng.bytes<32>();
      hashes.push_back(big_from_bytes_be(std::span<const std::uint8_t>(h.data(), 32)));
    }
    const HintMatrix hm =
        build_hint_matrix(std::span<const Big>(hashes.data(), cols), gamma, hash_field(), rng);

    // a random unknown subset of size ≤ γ
    const std::size_t u = 1 + rng.below(gamma);
    std::vector<std::optional<Big>> values(hashes.begin(), hashes.end());
    std::size_t cleared = 0;
    while (cleared < u) {
      const std::size_t j = rng.below(cols);
      if (values[j]) {
        values[j] = std::nullopt;
        ++cleared;
      }
    }
    const HintSolution sol = solve_hint(values, hm, hash_field());
    REQUIRE(sol.status == HintSolveStatus::ok);
    CHECK(sol.optional_hashes == hashes);
  }
}

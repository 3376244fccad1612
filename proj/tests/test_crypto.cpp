#include <algorithm>

#include "doctest.h"
#include "sealedbottle/crypto.hpp"
#include "sealedbottle/errors.hpp"
#include "sealedbottle/sha256.hpp"

using namespace sbtl;

namespace {
DetRng fresh_rng(std::uint64_t seed) { return DetRng(seed); }
}  // namespace

TEST_CASE("keystream xor is a self-inverse stream") {
  DetRng rng = fresh_rng(1);
  const Hash256 key = rng.bytes<32>();
  const Nonce nonce = rng.bytes<16>();
  for (std::size_t len : {0u, 1u, 31u, 32u, 33u, 63u, 64u, 65u, 1000u, 4096u}) {
    std::vector<std::uint8_t> data(len);
    rng.fill(std::span<std::uint8_t>(data.data(), data.size()));
    const auto once = keystream_xor(key, nonce, data);
    CHECK(once.size() == len);
    CHECK(keystream_xor(key, nonce, once) == data);
    if (len > 0) CHECK(once != data);
  }
}

TEST_CASE("zero input exposes the raw keystream prefix") {
  DetRng rng = fresh_rng(2);
  const Hash256 key = rng.bytes<32>();
  const Nonce nonce = rng.bytes<16>();
  const std::vector<std::uint8_t> zeros(40, 0);
  const auto stream = keystream_xor(key, nonce, zeros);

  ByteWriter w;
  w.bytes(key);
  w.bytes(nonce);
  w.u64(0);
  const Hash256 block0 = sha256(w.view());
  CHECK(std::equal(block0.begin(), block0.end(), stream.begin()));
}

TEST_CASE("keystreams are deterministic per (key, nonce) and nonce-sensitive") {
  DetRng rng = fresh_rng(3);
  const Hash256 key = rng.bytes<32>();
  const Nonce n1 = rng.bytes<16>();
  Nonce n2 = n1;
  n2[0] ^= 1;
  const std::vector<std::uint8_t> zeros(64, 0);
  CHECK(keystream_xor(key, n1, zeros) == keystream_xor(key, n1, zeros));
  CHECK(keystream_xor(key, n1, zeros) != keystream_xor(key, n2, zeros));
}

TEST_CASE("wrong keys scramble the message") {
  DetRng rng = fresh_rng(4);
  const std::vector<std::uint8_t> message = {'h', 'e', 'l', 'l', 'o'};
  const Hash256 key = rng.bytes<32>();
  const Nonce nonce = rng.bytes<16>();
  const auto sealed = keystream_xor(key, nonce, message);
  int equal = 0;
  for (int i = 0; i < 10'000; ++i) {
    if (keystream_xor(rng.bytes<32>(), nonce, sealed) == message) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("sealing modes and payload sizes") {
  DetRng rng = fresh_rng(5);
  const ProfileKey key{rng.bytes<32>()};
  const Hash256 x = rng.bytes<32>();

  const SealedPayload confirmed = seal_request_payload(key, x, SealMode::with_confirmation, rng);
  CHECK(confirmed.ciphertext.size() == 48);
  const SealedPayload plain = seal_request_payload(key, x, SealMode::plain, rng);
  CHECK(plain.ciphertext.size() == 32);

  const OpenResult r1 = open_request_payload(key, confirmed, SealMode::with_confirmation);
  CHECK(r1.status == OpenStatus::confirmed);
  CHECK(*r1.x == x);
  const OpenResult r2 = open_request_payload(key, plain, SealMode::plain);
  CHECK(r2.status == OpenStatus::unverified);
  CHECK(*r2.x == x);

  CHECK_THROWS_AS(open_request_payload(key, confirmed, SealMode::plain), Error);
  CHECK_THROWS_AS(open_request_payload(key, plain, SealMode::with_confirmation), Error);
}

TEST_CASE("wrong keys are rejected only when a confirmation tag exists") {
  DetRng rng = fresh_rng(6);
  const ProfileKey key{rng.bytes<32>()};
  const Hash256 x = rng.bytes<32>();
  const SealedPayload confirmed = seal_request_payload(key, x, SealMode::with_confirmation, rng);
  const SealedPayload plain = seal_request_payload(key, x, SealMode::plain, rng);

  int false_confirms = 0;
  for (int i = 0; i < 5000; ++i) {
    const Hash256 wrong = rng.bytes<32>();
    if (open_request_payload(wrong, confirmed, SealMode::with_confirmation).status ==
        OpenStatus::confirmed) {
      ++false_confirms;
    }
    // the plain mode never rejects: garbage is indistinguishable locally
    const OpenResult r = open_request_payload(wrong, plain, SealMode::plain);
    CHECK(r.status == OpenStatus::unverified);
    CHECK(*r.x != x);
  }
  CHECK(false_confirms == 0);
}

TEST_CASE("ack round trip") {
  DetRng rng = fresh_rng(7);
  const Hash256 x = rng.bytes<32>();
  const Hash256 y = rng.bytes<32>();

  SUBCASE("a valid ack among garbage is found") {
    std::vector<SealedPayload> acks;
    for (int i = 0; i < 10; ++i) acks.push_back(make_ack(rng.bytes<32>(), rng.bytes<32>(), {}, rng));
    acks.insert(acks.begin() + 4, make_ack(x, y, {}, rng));
    const auto found = verify_ack(x, std::span<const SealedPayload>(acks.data(), acks.size()));
    REQUIRE(found.has_value());
    CHECK(found->y == y);
    CHECK(found->index == 4);
  }
  SUBCASE("empty ack list") {
    CHECK(!verify_ack(x, {}).has_value());
  }
  SUBCASE("first valid ack wins") {
    const Hash256 y2 = rng.bytes<32>();
    std::vector<SealedPayload> acks = {make_ack(x, y, {}, rng), make_ack(x, y2, {}, rng)};
    const auto found = verify_ack(x, std::span<const SealedPayload>(acks.data(), acks.size()));
    REQUIRE(found.has_value());
    CHECK(found->y == y);
    CHECK(found->index == 0);
  }
  SUBCASE("extra bytes ride along") {
    const std::vector<std::uint8_t> extra = {0x12, 0x34};
    std::vector<SealedPayload> acks = {
        make_ack(x, y, std::span<const std::uint8_t>(extra.data(), 2), rng)};
    const auto found = verify_ack(x, std::span<const SealedPayload>(acks.data(), acks.size()));
    REQUIRE(found.has_value());
    CHECK(found->extra == extra);
  }
  SUBCASE("acks sealed under garbage fail under the true x") {
    int hits = 0;
    for (int i = 0; i < 2000; ++i) {
      std::vector<SealedPayload> acks = {make_ack(rng.bytes<32>(), y, {}, rng)};
      if (verify_ack(x, std::span<const SealedPayload>(acks.data(), acks.size()))) ++hits;
    }
    CHECK(hits == 0);
  }
}

TEST_CASE("session and group keys") {
  DetRng rng = fresh_rng(8);
  const Hash256 x = rng.bytes<32>();
  const Hash256 y1 = rng.bytes<32>();

  // both sides compute the same thing from (x, y)
  CHECK(derive_session_key(x, y1) == derive_session_key(x, y1));
  CHECK(derive_group_key(x) == x);

  std::set<Hash256> keys;
  for (int i = 0; i < 1000; ++i) keys.insert(derive_session_key(x, rng.bytes<32>()));
  CHECK(keys.size() == 1000);

  // x ∥ y is order-sensitive
  CHECK(derive_session_key(x, y1) != derive_session_key(y1, x));
}

#include <algorithm>

#include "doctest.h"
#include "sealedbottle/codec.hpp"
#include "sealedbottle/errors.hpp"
#include "sealedbottle/rng.hpp"

using namespace sbtl;

namespace {

RequestPackage random_package(DetRng& rng) {
  RequestPackage pkg;
  pkg.request_id = rng.bytes<16>();
  pkg.protocol = static_cast<ProtocolId>(1 + rng.below(3));
  pkg.expiry = rng.next_u64();
  pkg.ttl = static_cast<std::uint8_t>(rng.below(256));

  const std::uint16_t m_t = static_cast<std::uint16_t>(1 + rng.below(12));
  const std::uint16_t alpha = static_cast<std::uint16_t>(rng.below(m_t + 1));
  const std::uint16_t rest = static_cast<std::uint16_t>(m_t - alpha);
  const std::uint16_t gamma = static_cast<std::uint16_t>(rng.below(rest + 1));
  const std::uint16_t beta = static_cast<std::uint16_t>(rest - gamma);

  pkg.remainder.prime = 1000003;  // large prime keeps residues diverse
  for (std::uint16_t i = 0; i < m_t; ++i) {
    pkg.remainder.residues.push_back(static_cast<std::uint32_t>(rng.below(pkg.remainder.prime)));
  }
  pkg.necessary_count = alpha;
  pkg.optional_required = beta;
  if (gamma > 0) {
    HintMatrix hm;
    hm.gamma = gamma;
    hm.beta = beta;
    for (std::size_t i = 0; i < static_cast<std::size_t>(gamma) * beta; ++i) {
      hm.random_block.push_back(static_cast<std::uint32_t>(rng.between(1, 0xffffffff)));
    }
    for (std::uint16_t i = 0; i < gamma; ++i) {
      const Hash256 h = rng.bytes<32>();
      Big v = big_from_bytes_be(std::span<const std::uint8_t>(h.data(), 32));
      if (rng.below(2) == 0) v += hash_bound();  // exercise full 257-bit values
      hm.checksum.push_back(hash_field().reduce(v));
    }
    pkg.hint = std::move(hm);
  }
  pkg.sealed.nonce = rng.bytes<16>();
  const std::size_t payload = pkg.protocol == ProtocolId::p1 ? 48 : 32;
  pkg.sealed.ciphertext.resize(payload);
  rng.fill(std::span<std::uint8_t>(pkg.sealed.ciphertext.data(), payload));
  return pkg;
}

}  // namespace

TEST_CASE("request encode/decode round trip and exact size formula") {
  DetRng rng(1001);
  for (int i = 0; i < 1000; ++i) {
    const RequestPackage pkg = random_package(rng);
    const auto bytes = encode_request(pkg);
    CHECK(bytes.size() == encoded_request_size(pkg.attr_count(), pkg.necessary_count,
                                               pkg.optional_required,
                                               pkg.sealed.ciphertext.size()));
    const RequestPackage back = decode_request(bytes);
    CHECK(back == pkg);
  }
}

TEST_CASE("truncation and corruption are reported with offsets") {
  DetRng rng(42);
  const RequestPackage pkg = random_package(rng);
  const auto bytes = encode_request(pkg);

  for (std::size_t cut : {1ul, 4ul, 20ul, bytes.size() - 1}) {
    CHECK_THROWS_AS(decode_request(std::span<const std::uint8_t>(bytes.data(), cut)), Error);
  }
  try {
    decode_request(std::span<const std::uint8_t>(bytes.data(), 10));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_package);
    CHECK(e.offset() != Error::kNoOffset);
  }

  auto corrupted = bytes;
  corrupted[0] = 'X';  // magic
  CHECK_THROWS_AS(decode_request(corrupted), Error);
  corrupted = bytes;
  corrupted[4] = 9;  // version
  CHECK_THROWS_AS(decode_request(corrupted), Error);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_request(trailing), Error);
}

TEST_CASE("the encoder refuses inconsistent packages") {
  DetRng rng(55);
  RequestPackage pkg = random_package(rng);
  if (pkg.hint) {
    pkg.hint.reset();  // gamma > 0 but no hint
    CHECK_THROWS_AS(encode_request(pkg), Error);
  } else {
    pkg.hint = HintMatrix{1, 0, {}, {Big(5)}};  // hint despite gamma == 0
    CHECK_THROWS_AS(encode_request(pkg), Error);
  }
}

TEST_CASE("reply encode/decode round trip") {
  DetRng rng(77);
  for (int i = 0; i < 200; ++i) {
    ReplyPackage reply;
    reply.request_id = rng.bytes<16>();
    const std::size_t n_acks = 1 + rng.below(5);
    for (std::size_t a = 0; a < n_acks; ++a) {
      SealedPayload sp;
      sp.nonce = rng.bytes<16>();
      sp.ciphertext.resize(48 + rng.below(4) * 2);
      rng.fill(std::span<std::uint8_t>(sp.ciphertext.data(), sp.ciphertext.size()));
      reply.acks.push_back(std::move(sp));
    }
    const auto bytes = encode_reply(reply);
    const ReplyPackage back = decode_reply(bytes, 7, 123);
    CHECK(back == reply);
    CHECK(back.replier_id == 7);
    CHECK(back.sent_at == 123);
  }

  ReplyPackage empty;
  empty.request_id = rng.bytes<16>();
  CHECK_THROWS_AS(encode_reply(empty), Error);

  ReplyPackage short_ct;
  short_ct.request_id = rng.bytes<16>();
  short_ct.acks.push_back(SealedPayload{rng.bytes<16>(), std::vector<std::uint8_t>(10)});
  CHECK_THROWS_AS(encode_reply(short_ct), Error);
}

TEST_CASE("reply decoding rejects malformed buffers") {
  DetRng rng(88);
  ReplyPackage reply;
  reply.request_id = rng.bytes<16>();
  SealedPayload sp;
  sp.nonce = rng.bytes<16>();
  sp.ciphertext.resize(50);
  reply.acks.push_back(sp);
  const auto bytes = encode_reply(reply);

  CHECK_THROWS_AS(decode_reply(std::span<const std::uint8_t>(bytes.data(), bytes.size() - 1)),
                  Error);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_reply(trailing), Error);
}

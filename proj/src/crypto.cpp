#include "sealedbottle/crypto.hpp"

#include <algorithm>
#include <cstring>

#include "sealedbottle/errors.hpp"
#include "sealedbottle/sha256.hpp"

namespace sbtl {

std::vector<std::uint8_t> keystream_xor(const Hash256& key, const Nonce& nonce,
                                        std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  std::uint8_t block_input[32 + 16 + 8];
  std::memcpy(block_input, key.data(), 32);
  std::memcpy(block_input + 32, nonce.data(), 16);
  std::uint64_t counter = 0;
  for (std::size_t off = 0; off < out.size(); off += 32, ++counter) {
    store_be64(block_input + 48, counter);
    const Hash256 block = sha256(std::span<const std::uint8_t>(block_input, sizeof block_input));
    const std::size_t n = std::min<std::size_t>(32, out.size() - off);
    for (std::size_t i = 0; i < n; ++i) out[off + i] ^= block[i];
  }
  return out;
}

SealedPayload seal_request_payload(const ProfileKey& key, const Hash256& x, SealMode mode,
                                   DetRng& rng) {
  std::vector<std::uint8_t> plaintext;
  if (mode == SealMode::with_confirmation) {
    plaintext.insert(plaintext.end(), kConfirmTag.begin(), kConfirmTag.end());
  }
  plaintext.insert(plaintext.end(), x.begin(), x.end());

  SealedPayload sp;
  sp.nonce = rng.bytes<16>();
  sp.ciphertext = keystream_xor(key.key, sp.nonce, plaintext);
  return sp;
}

OpenResult open_request_payload(const Hash256& key, const SealedPayload& payload, SealMode mode) {
  const std::size_t expected = mode == SealMode::with_confirmation ? 48 : 32;
  if (payload.ciphertext.size() != expected) {
    throw Error(Errc::length_mismatch, "sealed payload length does not match mode");
  }
  const auto plaintext = keystream_xor(key, payload.nonce, payload.ciphertext);

  OpenResult r;
  if (mode == SealMode::with_confirmation) {
    if (!std::equal(kConfirmTag.begin(), kConfirmTag.end(), plaintext.begin())) {
      r.status = OpenStatus::rejected;
      return r;
    }
    r.status = OpenStatus::confirmed;
    Hash256 x;
    std::memcpy(x.data(), plaintext.data() + 16, 32);
    r.x = x;
    return r;
  }
  r.status = OpenStatus::unverified;
  Hash256 x;
  std::memcpy(x.data(), plaintext.data(), 32);
  r.x = x;
  return r;
}

OpenResult open_request_payload(const ProfileKey& key, const SealedPayload& payload,
                                SealMode mode) {
  return open_request_payload(key.key, payload, mode);
}

SealedPayload make_ack(const Hash256& x_j, const Hash256& y, std::span<const std::uint8_t> extra,
                       DetRng& rng) {
  std::vector<std::uint8_t> plaintext;
  plaintext.reserve(48 + extra.size());
  plaintext.insert(plaintext.end(), kAckTag.begin(), kAckTag.end());
  plaintext.insert(plaintext.end(), y.begin(), y.end());
  plaintext.insert(plaintext.end(), extra.begin(), extra.end());

  SealedPayload sp;
  sp.nonce = rng.bytes<16>();
  sp.ciphertext = keystream_xor(x_j, sp.nonce, plaintext);
  return sp;
}

std::optional<AckContent> verify_ack(const Hash256& x, std::span<const SealedPayload> acks) {
  for (std::size_t i = 0; i < acks.size(); ++i) {
    if (acks[i].ciphertext.size() < 48) continue;
    const auto plaintext = keystream_xor(x, acks[i].nonce, acks[i].ciphertext);
    if (!std::equal(kAckTag.begin(), kAckTag.end(), plaintext.begin())) continue;
    AckContent c;
    std::memcpy(c.y.data(), plaintext.data() + 16, 32);
    c.extra.assign(plaintext.begin() + 48, plaintext.end());
    c.index = i;
    return c;
  }
  return std::nullopt;
}

Hash256 derive_session_key(const Hash256& x, const Hash256& y) {
  ByteWriter w;
  w.bytes(x);
  w.bytes(y);
  return sha256(w.view());
}

Hash256 derive_group_key(const Hash256& x) { return x; }

}  // namespace sbtl

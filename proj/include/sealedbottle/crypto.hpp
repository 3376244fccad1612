#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sealedbottle/bytes.hpp"
#include "sealedbottle/profile.hpp"
#include "sealedbottle/rng.hpp"

namespace sbtl {

// 16-byte public tags; "public predefined confirmation/ack information".
inline constexpr Bytes<16> kConfirmTag = {'S', 'E', 'A', 'L', 'E', 'D', 'B', 'O',
                                          'T', 'T', 'L', 'E', '-', 'C', 'N', 'F'};
inline constexpr Bytes<16> kAckTag = {'S', 'E', 'A', 'L', 'E', 'D', 'B', 'O',
                                      'T', 'T', 'L', 'E', '-', 'A', 'C', 'K'};

// Wire layout: nonce (16 bytes) ∥ ciphertext. Stream construction, no
// integrity tag: a wrong key yields plausible-looking bytes, which is what
// lets Protocol 2 keep decryption locally unverifiable.
struct SealedPayload {
  Nonce nonce{};
  std::vector<std::uint8_t> ciphertext;

  bool operator==(const SealedPayload&) const = default;
};

// XORs data with the keystream block_i = SHA-256(key ∥ nonce ∥ i_be64).
// Self-inverse.
std::vector<std::uint8_t> keystream_xor(const Hash256& key, const Nonce& nonce,
                                        std::span<const std::uint8_t> data);

enum class SealMode { with_confirmation, plain };

// WITH_CONFIRMATION plaintext: CONFIRM_TAG ∥ x (48 bytes); PLAIN: x (32).
SealedPayload seal_request_payload(const ProfileKey& key, const Hash256& x, SealMode mode,
                                   DetRng& rng);

enum class OpenStatus { confirmed, rejected, unverified };

struct OpenResult {
  OpenStatus status = OpenStatus::rejected;
  std::optional<Hash256> x;  // set unless rejected
};

// Throws length_mismatch when the payload length does not fit the mode.
OpenResult open_request_payload(const Hash256& key, const SealedPayload& payload, SealMode mode);
OpenResult open_request_payload(const ProfileKey& key, const SealedPayload& payload,
                                SealMode mode);

// plaintext: ACK_TAG ∥ y ∥ extra, sealed under x_j with a fresh nonce.
SealedPayload make_ack(const Hash256& x_j, const Hash256& y, std::span<const std::uint8_t> extra,
                       DetRng& rng);

struct AckContent {
  Hash256 y{};
  std::vector<std::uint8_t> extra;
  std::size_t index = 0;  // position in the ack list
};

// Opens each ack under x; the first whose tag matches wins.
std::optional<AckContent> verify_ack(const Hash256& x, std::span<const SealedPayload> acks);

// SessionKey = SHA-256(x ∥ y); GroupKey = x.
Hash256 derive_session_key(const Hash256& x, const Hash256& y);
Hash256 derive_group_key(const Hash256& x);

}  // namespace sbtl

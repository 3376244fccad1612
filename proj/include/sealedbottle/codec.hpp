#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sealedbottle/bytes.hpp"
#include "sealedbottle/crypto.hpp"
#include "sealedbottle/hint.hpp"
#include "sealedbottle/remainder.hpp"

namespace sbtl {

inline constexpr Bytes<4> kWireMagic = {'S', 'B', 'T', 'L'};
inline constexpr std::uint8_t kWireVersion = 1;

enum class ProtocolId : std::uint8_t { p1 = 1, p2 = 2, p3 = 3 };

// The broadcast unit. Wire layout (big-endian):
//   magic "SBTL"(4) ∥ version u8 ∥ protocol_id u8 ∥ request_id(16) ∥
//   expiry u64 ∥ ttl u8 ∥ pad u8 ∥ p u32 ∥ m_t u16 ∥ alpha u16 ∥ beta u16 ∥
//   residues m_t×u32 ∥ [γ>0: R γ·β×u32 ∥ B γ×33B] ∥ nonce(16) ∥
//   payload_len u16 ∥ payload
struct RequestPackage {
  RequestId request_id{};
  ProtocolId protocol = ProtocolId::p1;
  std::uint64_t expiry = 0;  // absolute sim-time, µs
  std::uint8_t ttl = 0;
  RemainderVector remainder;                // carries p and the residues
  std::uint16_t necessary_count = 0;        // α
  std::uint16_t optional_required = 0;      // β
  std::optional<HintMatrix> hint;           // present iff γ > 0
  SealedPayload sealed;

  std::uint16_t attr_count() const { return remainder.attr_count(); }
  std::uint16_t tolerated_unknowns() const {
    return static_cast<std::uint16_t>(attr_count() - necessary_count - optional_required);
  }
  bool operator==(const RequestPackage& o) const {
    return request_id == o.request_id && protocol == o.protocol && expiry == o.expiry &&
           ttl == o.ttl && remainder.prime == o.remainder.prime &&
           remainder.residues == o.remainder.residues && necessary_count == o.necessary_count &&
           optional_required == o.optional_required && hint == o.hint && sealed == o.sealed;
  }
};

// Fixed header (incl. payload_len) is 44 bytes; nonce adds 16.
std::size_t encoded_request_size(std::uint16_t m_t, std::uint16_t alpha, std::uint16_t beta,
                                 std::size_t payload_len);

std::vector<std::uint8_t> encode_request(const RequestPackage& pkg);
RequestPackage decode_request(std::span<const std::uint8_t> bytes);

// Reply wire layout: magic(4) ∥ request_id(16) ∥ ack_count u16 ∥ acks, each
// nonce(16) ∥ ciphertext(48) ∥ extra_len u16 ∥ extra. replier_id and sent_at
// are transport metadata, not wire fields.
struct ReplyPackage {
  RequestId request_id{};
  std::uint32_t replier_id = 0;
  std::uint64_t sent_at = 0;
  std::vector<SealedPayload> acks;  // non-empty; each ciphertext >= 48 bytes

  bool operator==(const ReplyPackage& o) const {
    return request_id == o.request_id && acks == o.acks;
  }
};

std::vector<std::uint8_t> encode_reply(const ReplyPackage& reply);
ReplyPackage decode_reply(std::span<const std::uint8_t> bytes, std::uint32_t replier_id = 0,
                          std::uint64_t sent_at = 0);

}  // namespace sbtl

#include "sealedbottle/codec.hpp"

#include "sealedbottle/errors.hpp"

namespace sbtl {

namespace {

void validate_request(const RequestPackage& pkg) {
  const std::uint16_t m_t = pkg.attr_count();
  if (m_t == 0) throw Error(Errc::invalid_argument, "request has no attributes");
  if (pkg.necessary_count + pkg.optional_required > m_t) {
    throw Error(Errc::invalid_argument, "alpha + beta exceeds attribute count");
  }
  const std::uint16_t gamma = pkg.tolerated_unknowns();
  if ((gamma > 0) != pkg.hint.has_value()) {
    throw Error(Errc::invalid_argument, "hint matrix must be present exactly when gamma > 0");
  }
  if (pkg.hint) {
    if (pkg.hint->gamma != gamma ||
        pkg.hint->beta + pkg.necessary_count + pkg.hint->gamma != m_t ||
        pkg.hint->random_block.size() !=
            static_cast<std::size_t>(pkg.hint->gamma) * pkg.hint->beta ||
        pkg.hint->checksum.size() != pkg.hint->gamma) {
      throw Error(Errc::invalid_argument, "hint matrix shape does not match header counts");
    }
  }
  if (pkg.sealed.ciphertext.size() > 0xffff) {
    throw Error(Errc::invalid_argument, "sealed payload too large");
  }
}

}  // namespace

std::size_t encoded_request_size(std::uint16_t m_t, std::uint16_t alpha, std::uint16_t beta,
                                 std::size_t payload_len) {
  const std::size_t gamma = m_t - alpha - beta;
  std::size_t size = 44 + 4 * static_cast<std::size_t>(m_t) + 16 + payload_len;
  if (gamma > 0) size += 4 * gamma * beta + 33 * gamma;
  return size;
}

std::vector<std::uint8_t> encode_request(const RequestPackage& pkg) {
  validate_request(pkg);
  ByteWriter w;
  w.bytes(kWireMagic);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(pkg.protocol));
  w.bytes(pkg.request_id);
  w.u64(pkg.expiry);
  w.u8(pkg.ttl);
  w.u8(0);  // pad
  w.u32(pkg.remainder.prime);
  w.u16(pkg.attr_count());
  w.u16(pkg.necessary_count);
  w.u16(pkg.optional_required);
  for (std::uint32_t r : pkg.remainder.residues) w.u32(r);
  if (pkg.hint) {
    for (std::uint32_t r : pkg.hint->random_block) w.u32(r);
    for (const Big& b : pkg.hint->checksum) {
      Bytes<33> enc = big_to_array_be<33>(b);
      w.bytes(enc);
    }
  }
  w.bytes(pkg.sealed.nonce);
  w.u16(static_cast<std::uint16_t>(pkg.sealed.ciphertext.size()));
  w.raw(pkg.sealed.ciphertext.data(), pkg.sealed.ciphertext.size());
  return w.take();
}

RequestPackage decode_request(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.bytes<4>();
  if (magic != kWireMagic) throw Error(Errc::malformed_package, "bad magic", 0);
  const std::uint8_t version = r.u8();
  if (version != kWireVersion) throw Error(Errc::malformed_package, "unsupported version", 4);
  const std::uint8_t proto = r.u8();
  if (proto < 1 || proto > 3) throw Error(Errc::malformed_package, "unknown protocol id", 5);

  RequestPackage pkg;
  pkg.protocol = static_cast<ProtocolId>(proto);
  pkg.request_id = r.bytes<16>();
  pkg.expiry = r.u64();
  pkg.ttl = r.u8();
  const std::uint8_t pad = r.u8();
  if (pad != 0) throw Error(Errc::malformed_package, "nonzero pad byte", r.offset() - 1);
  pkg.remainder.prime = r.u32();
  const std::uint16_t m_t = r.u16();
  pkg.necessary_count = r.u16();
  pkg.optional_required = r.u16();
  if (m_t == 0) throw Error(Errc::malformed_package, "zero attribute count", r.offset() - 6);
  if (pkg.necessary_count + pkg.optional_required > m_t) {
    throw Error(Errc::malformed_package, "alpha + beta exceeds attribute count", r.offset() - 4);
  }
  pkg.remainder.residues.reserve(m_t);
  for (std::uint16_t i = 0; i < m_t; ++i) pkg.remainder.residues.push_back(r.u32());

  const auto gamma = static_cast<std::uint16_t>(m_t - pkg.necessary_count - pkg.optional_required);
  if (gamma > 0) {
    HintMatrix hm;
    hm.gamma = gamma;
    hm.beta = pkg.optional_required;
    hm.random_block.reserve(static_cast<std::size_t>(gamma) * hm.beta);
    for (std::size_t i = 0; i < static_cast<std::size_t>(gamma) * hm.beta; ++i) {
      const std::size_t at = r.offset();
      const std::uint32_t v = r.u32();
      if (v == 0) throw Error(Errc::malformed_package, "zero entry in hint matrix", at);
      hm.random_block.push_back(v);
    }
    hm.checksum.reserve(gamma);
    for (std::uint16_t i = 0; i < gamma; ++i) {
      auto enc = r.bytes<33>();
      hm.checksum.push_back(big_from_bytes_be(std::span<const std::uint8_t>(enc.data(), 33)));
    }
    pkg.hint = std::move(hm);
  }

  pkg.sealed.nonce = r.bytes<16>();
  const std::uint16_t payload_len = r.u16();
  auto payload = r.take(payload_len);
  pkg.sealed.ciphertext.assign(payload.begin(), payload.end());
  if (!r.empty()) {
    throw Error(Errc::malformed_package, "trailing bytes after payload", r.offset());
  }
  return pkg;
}

std::vector<std::uint8_t> encode_reply(const ReplyPackage& reply) {
  if (reply.acks.empty()) throw Error(Errc::invalid_argument, "reply must carry acks");
  ByteWriter w;
  w.bytes(kWireMagic);
  w.bytes(reply.request_id);
  w.u16(static_cast<std::uint16_t>(reply.acks.size()));
  for (const auto& ack : reply.acks) {
    if (ack.ciphertext.size() < 48 || ack.ciphertext.size() - 48 > 0xffff) {
      throw Error(Errc::invalid_argument, "ack ciphertext must be 48 bytes plus extra");
    }
    w.bytes(ack.nonce);
    w.raw(ack.ciphertext.data(), 48);
    w.u16(static_cast<std::uint16_t>(ack.ciphertext.size() - 48));
    w.raw(ack.ciphertext.data() + 48, ack.ciphertext.size() - 48);
  }
  return w.take();
}

ReplyPackage decode_reply(std::span<const std::uint8_t> bytes, std::uint32_t replier_id,
                          std::uint64_t sent_at) {
  ByteReader r(bytes);
  const auto magic = r.bytes<4>();
  if (magic != kWireMagic) throw Error(Errc::malformed_package, "bad magic", 0);
  ReplyPackage reply;
  reply.replier_id = replier_id;
  reply.sent_at = sent_at;
  reply.request_id = r.bytes<16>();
  const std::uint16_t count = r.u16();
  if (count == 0) throw Error(Errc::malformed_package, "reply without acks", r.offset() - 2);
  reply.acks.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    SealedPayload sp;
    sp.nonce = r.bytes<16>();
    auto body = r.take(48);
    const std::uint16_t extra_len = r.u16();
    auto extra = r.take(extra_len);
    sp.ciphertext.assign(body.begin(), body.end());
    sp.ciphertext.insert(sp.ciphertext.end(), extra.begin(), extra.end());
    reply.acks.push_back(std::move(sp));
  }
  if (!r.empty()) throw Error(Errc::malformed_package, "trailing bytes after acks", r.offset());
  return reply;
}

}  // namespace sbtl

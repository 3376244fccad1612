#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace sbtl {

template <std::size_t N>
using Bytes = std::array<std::uint8_t, N>;

using Hash256 = Bytes<32>;
using Nonce = Bytes<16>;
using RequestId = Bytes<16>;

std::string to_hex(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> from_hex(std::string_view hex);

template <std::size_t N>
std::string to_hex(const Bytes<N>& b) {
  return to_hex(std::span<const std::uint8_t>(b.data(), b.size()));
}

inline void store_be16(std::uint8_t* out, std::uint16_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 8);
  out[1] = static_cast<std::uint8_t>(v);
}
inline void store_be32(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 24);
  out[1] = static_cast<std::uint8_t>(v >> 16);
  out[2] = static_cast<std::uint8_t>(v >> 8);
  out[3] = static_cast<std::uint8_t>(v);
}
inline void store_be64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
}
inline std::uint16_t load_be16(const std::uint8_t* in) {
  return static_cast<std::uint16_t>((in[0] << 8) | in[1]);
}
inline std::uint32_t load_be32(const std::uint8_t* in) {
  return (static_cast<std::uint32_t>(in[0]) << 24) | (static_cast<std::uint32_t>(in[1]) << 16) |
         (static_cast<std::uint32_t>(in[2]) << 8) | static_cast<std::uint32_t>(in[3]);
}
inline std::uint64_t load_be64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

// Append-only buffer used by the wire codecs and key derivation.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    std::uint8_t tmp[2];
    store_be16(tmp, v);
    raw(tmp, 2);
  }
  void u32(std::uint32_t v) {
    std::uint8_t tmp[4];
    store_be32(tmp, v);
    raw(tmp, 4);
  }
  void u64(std::uint64_t v) {
    std::uint8_t tmp[8];
    store_be64(tmp, v);
    raw(tmp, 8);
  }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void raw(std::span<const std::uint8_t> s) { raw(s.data(), s.size()); }
  template <std::size_t N>
  void bytes(const Bytes<N>& b) {
    raw(b.data(), N);
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }
  const std::vector<std::uint8_t>& view() const { return buf_; }
  std::size_t size() const { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Sequential reader over an immutable buffer. Overruns throw via the
// installed handler so the codec can report the exact offset.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool empty() const { return remaining() == 0; }

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() { return load_be16(take(2).data()); }
  std::uint32_t u32() { return load_be32(take(4).data()); }
  std::uint64_t u64() { return load_be64(take(8).data()); }
  std::span<const std::uint8_t> take(std::size_t n);
  template <std::size_t N>
  Bytes<N> bytes() {
    Bytes<N> out;
    auto s = take(N);
    std::memcpy(out.data(), s.data(), N);
    return out;
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace sbtl

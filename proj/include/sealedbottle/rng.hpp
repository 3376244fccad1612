#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "sealedbottle/bytes.hpp"

namespace sbtl {

// Deterministic random source. All sampling goes through explicit methods
// instead of std distributions so that a seed reproduces the same stream on
// any platform and standard library.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n) by rejection sampling.
  std::uint64_t below(std::uint64_t n);

  // Uniform in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  // Uniform in [0, 1) with 53 bits of precision.
  double unit_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  void fill(std::span<std::uint8_t> out);

  template <std::size_t N>
  Bytes<N> bytes() {
    Bytes<N> out;
    fill(std::span<std::uint8_t>(out.data(), N));
    return out;
  }

  // Independent child stream; deterministic function of (seed stream, id).
  DetRng fork(std::uint64_t stream_id);

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

 private:
  std::mt19937_64 gen_;
};

}  // namespace sbtl

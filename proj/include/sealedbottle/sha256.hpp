#pragma once

#include <span>

#include "sealedbottle/bytes.hpp"

namespace sbtl {

// SHA-256 of a single buffer.
Hash256 sha256(std::span<const std::uint8_t> data);

inline Hash256 sha256(const std::vector<std::uint8_t>& data) {
  return sha256(std::span<const std::uint8_t>(data.data(), data.size()));
}

}  // namespace sbtl

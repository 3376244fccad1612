#include "sealedbottle/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace sbtl {

Hash256 sha256(std::span<const std::uint8_t> data) {
  Hash256 out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

}  // namespace sbtl

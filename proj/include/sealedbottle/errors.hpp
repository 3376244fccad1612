#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbtl {

enum class Errc {
  empty_after_normalization,
  empty_vector,
  duplicate_hash,
  unknown_category,
  invalid_argument,
  non_prime_modulus,
  modulus_too_small,
  limit_exceeded,
  malformed_package,
  length_mismatch,
  config_mismatch,
  parse_error,
};

class Error : public std::runtime_error {
 public:
  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

  Error(Errc code, std::string message, std::size_t offset = kNoOffset)
      : std::runtime_error(std::move(message)), code_(code), offset_(offset) {}

  Errc code() const { return code_; }
  std::size_t offset() const { return offset_; }

 private:
  Errc code_;
  std::size_t offset_;
};

}  // namespace sbtl

#include "sealedbottle/field.hpp"

#include "sealedbottle/errors.hpp"

namespace sbtl {

const char kHashFieldModulusHex[] =
    "10000000000000000000000000000000000000000000000000000000000000129";

Big big_from_bytes_be(std::span<const std::uint8_t> bytes) {
  Big v;
  if (!bytes.empty()) {
    mpz_import(v.get_mpz_t(), bytes.size(), 1 /*msb first*/, 1, 1, 0, bytes.data());
  }
  return v;
}

void big_to_bytes_be(const Big& v, std::span<std::uint8_t> out) {
  if (v < 0) throw Error(Errc::invalid_argument, "negative value in byte encoding");
  const std::size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  const std::size_t need = v == 0 ? 0 : (bits + 7) / 8;
  if (need > out.size()) throw Error(Errc::invalid_argument, "value too large for field width");
  std::fill(out.begin(), out.end(), 0);
  if (need > 0) {
    std::size_t written = 0;
    mpz_export(out.data() + (out.size() - need), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
}

std::optional<Big> Field::inv(const Big& v) const {
  Big r;
  if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), modulus.get_mpz_t()) == 0) return std::nullopt;
  return r;
}

const Field& hash_field() {
  static const Field f{Big(kHashFieldModulusHex, 16)};
  return f;
}

const Big& hash_bound() {
  static const Big b = Big(1) << 256;
  return b;
}

}  // namespace sbtl

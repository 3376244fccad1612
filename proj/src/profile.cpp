#include "sealedbottle/profile.hpp"

#include <algorithm>
#include <numeric>

#include "sealedbottle/errors.hpp"
#include "sealedbottle/sha256.hpp"

namespace sbtl {

namespace {

constexpr std::uint8_t kSeparator = 0x1f;

// Folds a Unicode codepoint to zero or more lowercase ASCII letters/digits.
// Covers Latin-1 supplement and the common Latin Extended-A letters; anything
// unmapped is treated like punctuation and dropped.
void fold_codepoint(char32_t cp, std::string& out) {
  if (cp >= 'A' && cp <= 'Z') {
    out.push_back(static_cast<char>(cp - 'A' + 'a'));
    return;
  }
  if ((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9')) {
    out.push_back(static_cast<char>(cp));
    return;
  }
  struct Fold {
    char32_t lo, hi;
    const char* base;
  };
  static constexpr Fold kFolds[] = {
      {0x00c0, 0x00c5, "a"}, {0x00c6, 0x00c6, "ae"}, {0x00c7, 0x00c7, "c"},
      {0x00c8, 0x00cb, "e"}, {0x00cc, 0x00cf, "i"},  {0x00d0, 0x00d0, "d"},
      {0x00d1, 0x00d1, "n"}, {0x00d2, 0x00d6, "o"},  {0x00d8, 0x00d8, "o"},
      {0x00d9, 0x00dc, "u"}, {0x00dd, 0x00dd, "y"},  {0x00de, 0x00de, "th"},
      {0x00df, 0x00df, "ss"}, {0x00e0, 0x00e5, "a"}, {0x00e6, 0x00e6, "ae"},
      {0x00e7, 0x00e7, "c"}, {0x00e8, 0x00eb, "e"},  {0x00ec, 0x00ef, "i"},
      {0x00f0, 0x00f0, "d"}, {0x00f1, 0x00f1, "n"},  {0x00f2, 0x00f6, "o"},
      {0x00f8, 0x00f8, "o"}, {0x00f9, 0x00fc, "u"},  {0x00fd, 0x00fd, "y"},
      {0x00fe, 0x00fe, "th"}, {0x00ff, 0x00ff, "y"},
  };
  for (const auto& f : kFolds) {
    if (cp >= f.lo && cp <= f.hi) {
      out += f.base;
      return;
    }
  }
  // Latin Extended-A: base letter alternates with accents in a regular
  // pattern; map by stripping to the nearest ASCII letter.
  static constexpr struct {
    char32_t lo, hi;
    char base;
  } kExtA[] = {
      {0x0100, 0x0105, 'a'}, {0x0106, 0x010d, 'c'}, {0x010e, 0x0111, 'd'}, {0x0112, 0x011b, 'e'},
      {0x011c, 0x0123, 'g'}, {0x0124, 0x0127, 'h'}, {0x0128, 0x0131, 'i'}, {0x0134, 0x0135, 'j'},
      {0x0136, 0x0138, 'k'}, {0x0139, 0x0142, 'l'}, {0x0143, 0x0148, 'n'}, {0x014c, 0x0151, 'o'},
      {0x0154, 0x0159, 'r'}, {0x015a, 0x0161, 's'}, {0x0162, 0x0167, 't'}, {0x0168, 0x0173, 'u'},
      {0x0174, 0x0175, 'w'}, {0x0176, 0x0178, 'y'}, {0x0179, 0x017e, 'z'},
  };
  for (const auto& f : kExtA) {
    if (cp >= f.lo && cp <= f.hi) {
      out.push_back(f.base);
      return;
    }
  }
  // dropped
}

// Minimal UTF-8 decoder; malformed sequences are skipped byte-by-byte.
std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<std::uint8_t>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xf0) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xe0) {
      len = 3;
      cp = b0 & 0x0f;
    } else if (b0 >= 0xc0) {
      len = 2;
      cp = b0 & 0x1f;
    }
    if (i + len > s.size()) {
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto bk = static_cast<std::uint8_t>(s[i + k]);
      if ((bk & 0xc0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3f);
    }
    if (!ok) {
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace

std::string normalize_attribute(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char32_t cp : decode_utf8(raw)) fold_codepoint(cp, out);
  // plural folding: "...s" -> "..." unless the word ends in "ss"
  if (out.size() >= 1 && out.back() == 's' && !(out.size() >= 2 && out[out.size() - 2] == 's')) {
    out.pop_back();
  }
  if (out.empty()) {
    throw Error(Errc::empty_after_normalization, "attribute text empty after normalization");
  }
  return out;
}

Attribute make_attribute(std::string_view category, std::string_view value) {
  return Attribute{normalize_attribute(category), normalize_attribute(value)};
}

Profile Profile::from_attributes(std::vector<Attribute> attrs) {
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  if (attrs.empty()) throw Error(Errc::invalid_argument, "profile needs at least one attribute");
  if (attrs.size() > kMaxProfileAttributes) {
    throw Error(Errc::invalid_argument, "profile exceeds attribute limit");
  }
  return Profile{std::move(attrs)};
}

bool Profile::contains(const Attribute& a) const {
  return std::binary_search(attributes.begin(), attributes.end(), a);
}

Hash256 hash_attribute(const Attribute& attr, const std::optional<Hash256>& dynamic_salt) {
  ByteWriter w;
  w.raw(attr.category.data(), attr.category.size());
  w.u8(kSeparator);
  w.raw(attr.value.data(), attr.value.size());
  if (dynamic_salt) {
    w.u8(kSeparator);
    w.bytes(*dynamic_salt);
  }
  return sha256(w.view());
}

ProfileVector build_profile_vector(const Profile& profile,
                                   const std::optional<Hash256>& dynamic_salt) {
  ProfileVector v;
  v.hashes.reserve(profile.size());
  for (const auto& a : profile.attributes) v.hashes.push_back(hash_attribute(a, dynamic_salt));
  std::sort(v.hashes.begin(), v.hashes.end());
  if (std::adjacent_find(v.hashes.begin(), v.hashes.end()) != v.hashes.end()) {
    throw Error(Errc::duplicate_hash, "duplicate hash inside profile vector");
  }
  return v;
}

IndexedProfileVector build_indexed_vector(const Profile& profile,
                                          const std::optional<Hash256>& dynamic_salt) {
  std::vector<std::pair<Hash256, std::uint32_t>> pairs;
  pairs.reserve(profile.size());
  for (std::uint32_t i = 0; i < profile.size(); ++i) {
    pairs.emplace_back(hash_attribute(profile.attributes[i], dynamic_salt), i);
  }
  std::sort(pairs.begin(), pairs.end());
  IndexedProfileVector out;
  out.salt = dynamic_salt;
  out.hashes.reserve(pairs.size());
  out.attr_pos.reserve(pairs.size());
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (pairs[i].first == pairs[i + 1].first) {
      throw Error(Errc::duplicate_hash, "duplicate hash inside profile vector");
    }
  }
  for (auto& [h, idx] : pairs) {
    out.hashes.push_back(h);
    out.attr_pos.push_back(idx);
  }
  return out;
}

ProfileKey derive_profile_key(std::span<const Hash256> vector_entries) {
  if (vector_entries.empty()) throw Error(Errc::empty_vector, "empty profile vector");
  ByteWriter w;
  for (const auto& h : vector_entries) w.bytes(h);
  return ProfileKey{sha256(w.view())};
}

ProfileKey derive_profile_key(const ProfileVector& v) {
  return derive_profile_key(std::span<const Hash256>(v.hashes.data(), v.hashes.size()));
}

RequestSpec RequestSpec::make(std::vector<Attribute> necessary,
                              std::vector<Attribute> optional_attrs,
                              std::uint16_t optional_required) {
  std::sort(necessary.begin(), necessary.end());
  necessary.erase(std::unique(necessary.begin(), necessary.end()), necessary.end());
  std::sort(optional_attrs.begin(), optional_attrs.end());
  optional_attrs.erase(std::unique(optional_attrs.begin(), optional_attrs.end()),
                       optional_attrs.end());
  for (const auto& a : necessary) {
    if (std::binary_search(optional_attrs.begin(), optional_attrs.end(), a)) {
      throw Error(Errc::invalid_argument, "attribute listed as both necessary and optional");
    }
  }
  RequestSpec spec{std::move(necessary), std::move(optional_attrs), optional_required};
  const std::size_t m_t = spec.necessary.size() + spec.optional_attrs.size();
  if (m_t == 0 || m_t > kMaxProfileAttributes) {
    throw Error(Errc::invalid_argument, "request attribute count out of range");
  }
  if (optional_required > spec.optional_attrs.size()) {
    throw Error(Errc::invalid_argument, "optional_required exceeds optional attribute count");
  }
  if (spec.necessary.empty() && optional_required == 0) {
    throw Error(Errc::invalid_argument, "similarity threshold must be positive");
  }
  return spec;
}

RequestVectors build_request_vectors(const RequestSpec& spec,
                                     const std::optional<Hash256>& dynamic_salt) {
  RequestVectors rv;
  rv.necessary_hashes.reserve(spec.necessary.size());
  for (const auto& a : spec.necessary) rv.necessary_hashes.push_back(hash_attribute(a, dynamic_salt));
  std::sort(rv.necessary_hashes.begin(), rv.necessary_hashes.end());
  rv.optional_hashes.reserve(spec.optional_attrs.size());
  for (const auto& a : spec.optional_attrs) {
    rv.optional_hashes.push_back(hash_attribute(a, dynamic_salt));
  }
  std::sort(rv.optional_hashes.begin(), rv.optional_hashes.end());
  rv.request_order = rv.necessary_hashes;
  rv.request_order.insert(rv.request_order.end(), rv.optional_hashes.begin(),
                          rv.optional_hashes.end());
  for (std::size_t i = 0; i + 1 < rv.request_order.size(); ++i) {
    for (std::size_t j = i + 1; j < rv.request_order.size(); ++j) {
      if (rv.request_order[i] == rv.request_order[j]) {
        throw Error(Errc::duplicate_hash, "duplicate hash inside request vector");
      }
    }
  }
  rv.key = derive_profile_key(
      std::span<const Hash256>(rv.request_order.data(), rv.request_order.size()));
  return rv;
}

}  // namespace sbtl

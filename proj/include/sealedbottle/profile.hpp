#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sealedbottle/bytes.hpp"

namespace sbtl {

inline constexpr std::size_t kMaxProfileAttributes = 128;

// Lowercases, strips whitespace/punctuation, folds Latin accents to base
// letters and removes a trailing plural "s" (kept when the word ends in
// "ss"). Throws Errc::empty_after_normalization when nothing remains.
std::string normalize_attribute(std::string_view raw);

// A normalized (category, value) pair. Compared byte-wise.
struct Attribute {
  std::string category;
  std::string value;

  auto operator<=>(const Attribute&) const = default;
};

// Normalizes both fields.
Attribute make_attribute(std::string_view category, std::string_view value);

// A user's attribute set: unique, sorted, 1..kMaxProfileAttributes entries.
struct Profile {
  std::vector<Attribute> attributes;

  static Profile from_attributes(std::vector<Attribute> attrs);
  std::size_t size() const { return attributes.size(); }
  bool contains(const Attribute& a) const;
};

// SHA-256 over category ∥ 0x1F ∥ value, with ∥ 0x1F ∥ salt appended when a
// dynamic salt is present. The separator keeps the encoding prefix-free.
Hash256 hash_attribute(const Attribute& attr, const std::optional<Hash256>& dynamic_salt = {});

struct ProfileVector {
  std::vector<Hash256> hashes;  // strictly ascending

  std::size_t size() const { return hashes.size(); }
};

ProfileVector build_profile_vector(const Profile& profile,
                                   const std::optional<Hash256>& dynamic_salt = {});

// Profile vector plus the mapping from each sorted-hash position back to the
// attribute it came from; participants need it to reason about what a
// candidate assignment would expose.
struct IndexedProfileVector {
  std::optional<Hash256> salt;
  std::vector<Hash256> hashes;          // strictly ascending
  std::vector<std::uint32_t> attr_pos;  // hashes[i] == hash of profile.attributes[attr_pos[i]]
};

IndexedProfileVector build_indexed_vector(const Profile& profile,
                                          const std::optional<Hash256>& dynamic_salt = {});

struct ProfileKey {
  Hash256 key{};

  auto operator<=>(const ProfileKey&) const = default;
};

// Hash of the concatenated vector entries, in order.
ProfileKey derive_profile_key(std::span<const Hash256> vector_entries);
ProfileKey derive_profile_key(const ProfileVector& v);

// An initiator's request: α necessary attributes that a matching user must
// all own, plus optional attributes of which at least β must be owned.
struct RequestSpec {
  std::vector<Attribute> necessary;  // sorted
  std::vector<Attribute> optional_attrs;  // sorted
  std::uint16_t optional_required = 0;    // β

  static RequestSpec make(std::vector<Attribute> necessary, std::vector<Attribute> optional_attrs,
                          std::uint16_t optional_required);

  std::uint16_t necessary_count() const { return static_cast<std::uint16_t>(necessary.size()); }
  std::uint16_t attr_count() const {
    return static_cast<std::uint16_t>(necessary.size() + optional_attrs.size());
  }
  std::uint16_t tolerated_unknowns() const {
    return static_cast<std::uint16_t>(optional_attrs.size() - optional_required);
  }
  double threshold() const {
    return static_cast<double>(necessary.size() + optional_required) / attr_count();
  }
};

// The request-position hash layout: positions 0..α-1 carry the necessary
// hashes sorted ascending, positions α..m_t-1 the optional hashes sorted
// ascending. The profile key is the hash of the concatenation.
struct RequestVectors {
  std::vector<Hash256> necessary_hashes;
  std::vector<Hash256> optional_hashes;
  std::vector<Hash256> request_order;  // necessary ∥ optional
  ProfileKey key;
};

RequestVectors build_request_vectors(const RequestSpec& spec,
                                     const std::optional<Hash256>& dynamic_salt = {});

}  // namespace sbtl

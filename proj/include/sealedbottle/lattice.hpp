#pragma once

#include <cstdint>
#include <vector>

#include "sealedbottle/bytes.hpp"
#include "sealedbottle/profile.hpp"

namespace sbtl {

struct Vec2 {
  double x = 0;
  double y = 0;

  bool operator==(const Vec2&) const = default;
};

// Hexagonal lattice spanned by a1 = (d, 0) and a2 = (d/2, √3/2·d).
struct LatticeConfig {
  Vec2 origin{};
  double spacing = 1.0;  // d, the shortest distance between lattice points

  bool operator==(const LatticeConfig&) const = default;
};

struct LatticePoint {
  std::int64_t u1 = 0;
  std::int64_t u2 = 0;

  auto operator<=>(const LatticePoint&) const = default;
};

Vec2 lattice_to_cartesian(const LatticeConfig& cfg, const LatticePoint& p);

// Hop distance on the hexagonal lattice graph.
std::int64_t hex_distance(const LatticePoint& a, const LatticePoint& b);

// Nearest lattice point in Euclidean distance; ties go to the smaller
// (u1, u2) lexicographically. The quantization error is at most d/√3.
LatticePoint hash_location(const LatticeConfig& cfg, const Vec2& location);

// The hashed center plus every lattice point within K rings; size is the
// centered hexagonal number 3K(K+1)+1. Canonically ordered by (u1, u2).
struct VicinitySet {
  LatticeConfig config;
  std::uint32_t rings = 0;
  std::vector<LatticePoint> points;

  bool contains(const LatticePoint& p) const;
};

VicinitySet vicinity_set(const LatticeConfig& cfg, const Vec2& location, std::uint32_t rings);

// θ_k = |V_i ∩ V_k| / |V_k|. Throws config_mismatch when the lattices differ.
double vicinity_similarity(const VicinitySet& vi, const VicinitySet& vk);

// Lattice points as request attributes: category "geo", value "u1,u2".
// Feeding these into a RequestSpec with α = 0, β = ceil(Θ·|V|) turns vicinity
// search into fuzzy matching.
std::vector<Attribute> vicinity_request_attributes(const VicinitySet& v);

// One rendezvous salt per lattice point: SHA-256("geo-dyn" ∥ u1 ∥ u2), the
// coordinates as big-endian two's-complement 64-bit values.
Hash256 dynamic_key_for(const LatticePoint& p);
std::vector<Hash256> derive_dynamic_keys(const VicinitySet& v);

}  // namespace sbtl

#include "sealedbottle/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "sealedbottle/errors.hpp"
#include "sealedbottle/sha256.hpp"

namespace sbtl {

namespace {
constexpr double kSqrt3Half = 0.8660254037844386;
}

Vec2 lattice_to_cartesian(const LatticeConfig& cfg, const LatticePoint& p) {
  const double u1 = static_cast<double>(p.u1);
  const double u2 = static_cast<double>(p.u2);
  return Vec2{cfg.origin.x + cfg.spacing * (u1 + 0.5 * u2),
              cfg.origin.y + cfg.spacing * kSqrt3Half * u2};
}

std::int64_t hex_distance(const LatticePoint& a, const LatticePoint& b) {
  const std::int64_t d1 = a.u1 - b.u1;
  const std::int64_t d2 = a.u2 - b.u2;
  return (std::llabs(d1) + std::llabs(d2) + std::llabs(d1 + d2)) / 2;
}

LatticePoint hash_location(const LatticeConfig& cfg, const Vec2& location) {
  if (cfg.spacing <= 0) throw Error(Errc::invalid_argument, "lattice spacing must be positive");
  // invert the basis, then scan the surrounding points
  const double ry = (location.y - cfg.origin.y) / (cfg.spacing * kSqrt3Half);
  const double rx = (location.x - cfg.origin.x) / cfg.spacing - 0.5 * ry;
  const auto c1 = static_cast<std::int64_t>(std::llround(rx));
  const auto c2 = static_cast<std::int64_t>(std::llround(ry));

  LatticePoint best{};
  double best_dist = 0;
  bool first = true;
  for (std::int64_t du1 = -1; du1 <= 1; ++du1) {
    for (std::int64_t du2 = -1; du2 <= 1; ++du2) {
      const LatticePoint p{c1 + du1, c2 + du2};
      const Vec2 cart = lattice_to_cartesian(cfg, p);
      const double dx = cart.x - location.x;
      const double dy = cart.y - location.y;
      const double dist = dx * dx + dy * dy;
      if (first || dist < best_dist || (dist == best_dist && p < best)) {
        best = p;
        best_dist = dist;
        first = false;
      }
    }
  }
  return best;
}

bool VicinitySet::contains(const LatticePoint& p) const {
  return std::binary_search(points.begin(), points.end(), p);
}

VicinitySet vicinity_set(const LatticeConfig& cfg, const Vec2& location, std::uint32_t rings) {
  if (rings < 1) throw Error(Errc::invalid_argument, "vicinity needs at least one ring");
  const LatticePoint center = hash_location(cfg, location);
  VicinitySet v;
  v.config = cfg;
  v.rings = rings;
  const auto k = static_cast<std::int64_t>(rings);
  for (std::int64_t du1 = -k; du1 <= k; ++du1) {
    for (std::int64_t du2 = -k; du2 <= k; ++du2) {
      const LatticePoint p{center.u1 + du1, center.u2 + du2};
      if (hex_distance(p, center) <= k) v.points.push_back(p);
    }
  }
  std::sort(v.points.begin(), v.points.end());
  return v;
}

double vicinity_similarity(const VicinitySet& vi, const VicinitySet& vk) {
  if (!(vi.config == vk.config)) {
    throw Error(Errc::config_mismatch, "vicinity sets use different lattices");
  }
  if (vk.points.empty()) throw Error(Errc::invalid_argument, "empty vicinity set");
  std::size_t common = 0;
  auto a = vi.points.begin();
  auto b = vk.points.begin();
  while (a != vi.points.end() && b != vk.points.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++common;
      ++a;
      ++b;
    }
  }
  return static_cast<double>(common) / static_cast<double>(vk.points.size());
}

std::vector<Attribute> vicinity_request_attributes(const VicinitySet& v) {
  std::vector<Attribute> attrs;
  attrs.reserve(v.points.size());
  for (const auto& p : v.points) {
    attrs.push_back(
        Attribute{"geo", std::to_string(p.u1) + "," + std::to_string(p.u2)});
  }
  return attrs;
}

Hash256 dynamic_key_for(const LatticePoint& p) {
  ByteWriter w;
  w.raw("geo-dyn", 7);
  w.u64(static_cast<std::uint64_t>(p.u1));
  w.u64(static_cast<std::uint64_t>(p.u2));
  return sha256(w.view());
}

std::vector<Hash256> derive_dynamic_keys(const VicinitySet& v) {
  std::vector<Hash256> salts;
  salts.reserve(v.points.size());
  for (const auto& p : v.points) salts.push_back(dynamic_key_for(p));
  return salts;
}

}  // namespace sbtl

#pragma once

#include <cstdint>
#include <vector>

namespace sbtl {

inline constexpr std::uint32_t kUnknownIndex = UINT32_MAX;
inline constexpr std::size_t kDefaultEnumerationLimit = 4096;

// A mapping from request positions onto a participant's sorted profile
// vector. Optional positions may be UNKNOWN (recovered later via the hint
// system); necessary positions always carry an index.
struct CandidateAssignment {
  std::vector<std::uint32_t> choice;  // per position: index or kUnknownIndex

  std::uint32_t unknown_count() const {
    std::uint32_t n = 0;
    for (auto c : choice) n += (c == kUnknownIndex);
    return n;
  }
};

// Enumerates every assignment such that
//   - all necessary positions (the first `necessary_count`) carry an index,
//   - at most `tolerated_unknowns` positions are UNKNOWN,
//   - indices strictly increase inside the necessary segment and inside the
//     optional segment (both sides are hash-sorted, so a real match always
//     maps order-preservingly within each segment), and
//   - no index is used for two positions.
// Emission order is lexicographic over the choice vector with UNKNOWN
// sorting last. Throws limit_exceeded once more than `limit` assignments
// exist; such a profile is treated as dictionary-attacker-like upstream.
std::vector<CandidateAssignment> enumerate_candidates(
    const std::vector<std::vector<std::uint32_t>>& subsets, std::uint16_t necessary_count,
    std::uint16_t tolerated_unknowns, std::size_t limit = kDefaultEnumerationLimit);

}  // namespace sbtl

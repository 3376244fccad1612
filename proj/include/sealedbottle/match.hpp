#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sealedbottle/candidates.hpp"
#include "sealedbottle/hint.hpp"
#include "sealedbottle/profile.hpp"
#include "sealedbottle/remainder.hpp"

namespace sbtl {

enum class MatchVerdict { perfect, matching, non_matching };

struct MatchResult {
  MatchVerdict verdict = MatchVerdict::non_matching;
  std::size_t intersection = 0;  // |A_t ∩ A_m|

  bool is_match() const { return verdict != MatchVerdict::non_matching; }
};

// Ground truth by direct set operations; the independent oracle for every
// protocol-path test. Matching: necessary ⊆ profile and at least β optional
// attributes owned.
MatchResult oracle_match(const RequestSpec& spec, const Profile& profile);

// One key per distinct completed candidate vector (request order), first
// occurrence wins.
std::vector<ProfileKey> derive_candidate_keys(
    const std::vector<std::vector<Hash256>>& completed_vectors);

// ε(κ) = C(m_k, α+β) · p^-(α+β)
double expected_candidate_combinations(std::uint32_t m_k, std::uint32_t alpha_plus_beta,
                                       std::uint32_t p);

// Everything a participant derives from screening one request against one
// profile vector: the surviving assignments (post hint-solve), their
// completed vectors, and the deduplicated candidate key set.
struct CandidateKey {
  ProfileKey key;
  std::uint32_t min_unknowns = 0;  // fewest unknowns over assignments yielding this key
};

struct CandidateEvaluation {
  std::vector<CandidateAssignment> assignments;      // surviving only
  std::vector<std::vector<Hash256>> completed;       // parallel to assignments
  std::vector<CandidateKey> keys;                    // deduplicated
  std::size_t enumerated = 0;
  bool limit_exceeded = false;

  bool is_candidate() const { return !keys.empty(); }
};

struct RequestView {
  const RemainderVector* remainder = nullptr;
  const HintMatrix* hint = nullptr;  // null iff γ == 0
  std::uint16_t necessary_count = 0;
  std::uint16_t optional_required = 0;
};

CandidateEvaluation evaluate_candidate(std::span<const Hash256> user_hashes,
                                       const RequestView& request, const Field& field,
                                       std::size_t enumeration_limit = kDefaultEnumerationLimit);

}  // namespace sbtl

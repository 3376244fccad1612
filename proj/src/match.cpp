#include "sealedbottle/match.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sealedbottle/errors.hpp"

namespace sbtl {

MatchResult oracle_match(const RequestSpec& spec, const Profile& profile) {
  std::size_t necessary_owned = 0;
  for (const auto& a : spec.necessary) necessary_owned += profile.contains(a);
  std::size_t optional_owned = 0;
  for (const auto& a : spec.optional_attrs) optional_owned += profile.contains(a);

  MatchResult r;
  r.intersection = necessary_owned + optional_owned;
  if (necessary_owned == spec.necessary.size() && optional_owned == spec.optional_attrs.size()) {
    r.verdict = MatchVerdict::perfect;
  } else if (necessary_owned == spec.necessary.size() &&
             optional_owned >= spec.optional_required) {
    r.verdict = MatchVerdict::matching;
  } else {
    r.verdict = MatchVerdict::non_matching;
  }
  return r;
}

std::vector<ProfileKey> derive_candidate_keys(
    const std::vector<std::vector<Hash256>>& completed_vectors) {
  std::vector<ProfileKey> keys;
  for (const auto& vec : completed_vectors) {
    ProfileKey k = derive_profile_key(std::span<const Hash256>(vec.data(), vec.size()));
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  return keys;
}

double expected_candidate_combinations(std::uint32_t m_k, std::uint32_t alpha_plus_beta,
                                       std::uint32_t p) {
  if (alpha_plus_beta > m_k) {
    throw Error(Errc::invalid_argument, "expected combinations need m_k >= alpha+beta");
  }
  if (p < 2) throw Error(Errc::invalid_argument, "p must be >= 2");
  // binomial via logs is lossy; multiply incrementally instead
  double value = 1.0;
  for (std::uint32_t i = 1; i <= alpha_plus_beta; ++i) {
    value *= static_cast<double>(m_k - alpha_plus_beta + i) / static_cast<double>(i);
    value /= static_cast<double>(p);
  }
  return value;
}

CandidateEvaluation evaluate_candidate(std::span<const Hash256> user_hashes,
                                       const RequestView& request, const Field& field,
                                       std::size_t enumeration_limit) {
  const RemainderVector& rv = *request.remainder;
  const std::uint16_t m_t = rv.attr_count();
  const std::uint16_t alpha = request.necessary_count;
  const auto optional_count = static_cast<std::uint16_t>(m_t - alpha);
  const auto gamma = static_cast<std::uint16_t>(optional_count - request.optional_required);

  CandidateEvaluation eval;
  const auto subsets = candidate_subsets(user_hashes, rv);
  std::vector<CandidateAssignment> assignments;
  try {
    assignments = enumerate_candidates(subsets, alpha, gamma, enumeration_limit);
  } catch (const Error& e) {
    if (e.code() == Errc::limit_exceeded) {
      eval.limit_exceeded = true;
      return eval;
    }
    throw;
  }
  eval.enumerated = assignments.size();

  RecoveryCheck check;
  check.prime = rv.prime;
  check.optional_residues.assign(rv.residues.begin() + alpha, rv.residues.end());
  check.bound = hash_bound();

  std::map<ProfileKey, std::size_t> key_index;
  for (auto& assignment : assignments) {
    const std::uint32_t unknowns = assignment.unknown_count();
    std::vector<Hash256> completed(m_t);
    bool ok = true;
    for (std::uint16_t pos = 0; pos < alpha; ++pos) {
      completed[pos] = user_hashes[assignment.choice[pos]];
    }
    if (gamma == 0 || unknowns == 0) {
      for (std::uint16_t pos = alpha; pos < m_t; ++pos) {
        completed[pos] = user_hashes[assignment.choice[pos]];
      }
    } else {
      std::vector<std::optional<Big>> optional_values(optional_count);
      for (std::uint16_t j = 0; j < optional_count; ++j) {
        const std::uint32_t c = assignment.choice[alpha + j];
        if (c != kUnknownIndex) {
          optional_values[j] = big_from_bytes_be(
              std::span<const std::uint8_t>(user_hashes[c].data(), user_hashes[c].size()));
        }
      }
      HintSolution sol = solve_hint(optional_values, *request.hint, field, &check);
      if (sol.status != HintSolveStatus::ok) {
        ok = false;
      } else {
        for (std::uint16_t j = 0; j < optional_count; ++j) {
          completed[alpha + j] = big_to_array_be<32>(sol.optional_hashes[j]);
        }
      }
    }
    if (!ok) continue;

    ProfileKey key =
        derive_profile_key(std::span<const Hash256>(completed.data(), completed.size()));
    auto [it, inserted] = key_index.try_emplace(key, eval.keys.size());
    if (inserted) {
      eval.keys.push_back(CandidateKey{key, unknowns});
    } else {
      eval.keys[it->second].min_unknowns = std::min(eval.keys[it->second].min_unknowns, unknowns);
    }
    eval.assignments.push_back(std::move(assignment));
    eval.completed.push_back(std::move(completed));
  }
  return eval;
}

}  // namespace sbtl

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sealedbottle/codec.hpp"
#include "sealedbottle/entropy.hpp"
#include "sealedbottle/match.hpp"
#include "sealedbottle/profile.hpp"

namespace sbtl {

// Sim-time is in microseconds throughout.
inline constexpr std::uint64_t kMicrosPerSecond = 1'000'000;

struct RequestParams {
  std::uint32_t prime = 11;
  std::uint8_t ttl = 32;
  std::uint64_t expiry = UINT64_MAX;        // absolute
  std::uint64_t window = 60 * kMicrosPerSecond;  // T_w
  std::size_t kappa_max = 0;                // 0 = derive a default
  std::uint64_t seed = 1;
  std::optional<Hash256> dynamic_salt;      // geo rendezvous salt
};

// Reply-set cardinality ceiling: 4× the expected combination count for a
// well-stocked honest profile, floored at 8.
std::size_t default_kappa_max(std::uint16_t alpha_plus_beta, std::uint32_t p);

struct MatchRecord {
  std::uint32_t replier = 0;
  Hash256 y{};
  Hash256 session_key{};
  std::uint64_t at = 0;
  std::vector<std::uint8_t> extra;
};

struct InitiatorState {
  RequestSpec spec;
  RequestId request_id{};
  ProtocolId protocol = ProtocolId::p1;
  Hash256 x{};          // never serialized except sealed under the profile key
  ProfileKey profile_key;
  std::uint64_t created_at = 0;
  std::uint64_t window = 0;
  std::size_t kappa_max = 0;
  std::vector<MatchRecord> matches;

  bool has_match_with(std::uint32_t replier) const;
  Hash256 group_key() const { return x; }
};

std::pair<RequestPackage, InitiatorState> create_request(const RequestSpec& spec,
                                                         ProtocolId protocol,
                                                         const RequestParams& params,
                                                         std::uint64_t now);

// Filters the admissible replies (arrival within the window, ack count within
// kappa_max), verifies each under x and appends the survivors to
// state.matches. Returns the newly established matches.
std::vector<MatchRecord> collect_replies(InitiatorState& state,
                                         std::span<const ReplyPackage> replies,
                                         std::uint64_t now);

// Greedy φ-entropy selection: candidates join in ascending order of the
// entropy their categories would add to the running union, stopping before
// the budget is exceeded. φ = 0 discloses nothing.
std::vector<std::size_t> select_entropy_bounded(
    const std::vector<std::vector<Attribute>>& candidates, double phi,
    const PopulationStats& stats);

// Token bucket per origin; default one request per origin per 60 s.
class FrequencyLimiter {
 public:
  FrequencyLimiter(double capacity = 1.0, std::uint64_t refill_interval = 60 * kMicrosPerSecond)
      : capacity_(capacity), refill_interval_(refill_interval) {}

  bool allow(std::uint32_t origin, std::uint64_t now);

 private:
  struct Bucket {
    double tokens;
    std::uint64_t last;
  };
  double capacity_;
  std::uint64_t refill_interval_;
  std::map<std::uint32_t, Bucket> buckets_;
};

struct ParticipantConfig {
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
  std::optional<double> phi;       // entropy budget, Protocol 3 only
  bool stop_forward_on_match_p1 = true;
  double rate_capacity = 1.0;
  std::uint64_t rate_refill_interval = 60 * kMicrosPerSecond;
};

enum class DropReason { none, expired, duplicate, rate_limited };

struct Action {
  DropReason drop = DropReason::none;
  std::optional<RequestPackage> forward;  // ttl already decremented
  std::optional<ReplyPackage> reply;
  bool candidate = false;
  bool suspicious = false;         // enumeration limit exceeded
  std::size_t candidate_key_count = 0;
  std::vector<Hash256> reply_session_keys;  // what the replier could derive

  bool dropped() const { return drop != DropReason::none; }
};

struct ParticipantState {
  std::uint32_t id = 0;
  Profile profile;
  std::vector<IndexedProfileVector> vectors;  // static, plus dynamic variants
  const PopulationStats* stats = nullptr;     // needed for Protocol 3
  ParticipantConfig config;
  DetRng rng{0};
  FrequencyLimiter limiter;
  std::set<RequestId> seen;

  static ParticipantState make(std::uint32_t id, Profile profile, std::uint64_t seed,
                               ParticipantConfig config = {},
                               const PopulationStats* stats = nullptr);

  // Adds salted profile-vector variants for dynamic (location) screening.
  void add_dynamic_salts(std::span<const Hash256> salts);
};

Action handle_request(ParticipantState& state, const RequestPackage& pkg, std::uint64_t now,
                      std::uint32_t origin_id);

}  // namespace sbtl

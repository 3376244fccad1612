#include "sealedbottle/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "sealedbottle/errors.hpp"

namespace sbtl {

std::size_t default_kappa_max(std::uint16_t alpha_plus_beta, std::uint32_t p) {
  const std::uint32_t stocked_profile = 20;
  double expected = 0;
  if (alpha_plus_beta <= stocked_profile) {
    expected = expected_candidate_combinations(stocked_profile, alpha_plus_beta, p);
  }
  const double bound = std::ceil(4.0 * std::max(expected, 1.0));
  return std::max<std::size_t>(8, static_cast<std::size_t>(bound));
}

bool InitiatorState::has_match_with(std::uint32_t replier) const {
  return std::any_of(matches.begin(), matches.end(),
                     [&](const MatchRecord& m) { return m.replier == replier; });
}

std::pair<RequestPackage, InitiatorState> create_request(const RequestSpec& spec,
                                                         ProtocolId protocol,
                                                         const RequestParams& params,
                                                         std::uint64_t now) {
  DetRng rng(params.seed);
  const RequestVectors vectors = build_request_vectors(spec, params.dynamic_salt);

  RequestPackage pkg;
  pkg.protocol = protocol;
  pkg.request_id = rng.bytes<16>();
  pkg.expiry = params.expiry;
  pkg.ttl = params.ttl;
  pkg.remainder = build_remainder_vector(
      std::span<const Hash256>(vectors.request_order.data(), vectors.request_order.size()),
      params.prime);
  pkg.necessary_count = spec.necessary_count();
  pkg.optional_required = spec.optional_required;

  const std::uint16_t gamma = spec.tolerated_unknowns();
  if (gamma > 0) {
    std::vector<Big> optional_bigs;
    optional_bigs.reserve(vectors.optional_hashes.size());
    for (const auto& h : vectors.optional_hashes) {
      optional_bigs.push_back(big_from_bytes_be(std::span<const std::uint8_t>(h.data(), 32)));
    }
    pkg.hint = build_hint_matrix(
        std::span<const Big>(optional_bigs.data(), optional_bigs.size()), gamma, hash_field(), rng);
  }

  InitiatorState state;
  state.spec = spec;
  state.request_id = pkg.request_id;
  state.protocol = protocol;
  state.x = rng.bytes<32>();
  state.profile_key = vectors.key;
  state.created_at = now;
  state.window = params.window;
  state.kappa_max = params.kappa_max > 0
                        ? params.kappa_max
                        : default_kappa_max(
                              static_cast<std::uint16_t>(spec.necessary_count() +
                                                         spec.optional_required),
                              params.prime);

  const SealMode mode =
      protocol == ProtocolId::p1 ? SealMode::with_confirmation : SealMode::plain;
  pkg.sealed = seal_request_payload(vectors.key, state.x, mode, rng);
  return {std::move(pkg), std::move(state)};
}

std::vector<MatchRecord> collect_replies(InitiatorState& state,
                                         std::span<const ReplyPackage> replies,
                                         std::uint64_t now) {
  std::vector<MatchRecord> fresh;
  for (const auto& reply : replies) {
    if (reply.request_id != state.request_id) continue;
    if (now > state.created_at + state.window) continue;   // response window passed
    if (reply.acks.empty() || reply.acks.size() > state.kappa_max) continue;
    if (state.has_match_with(reply.replier_id)) continue;
    auto ack = verify_ack(state.x, std::span<const SealedPayload>(reply.acks.data(),
                                                                  reply.acks.size()));
    if (!ack) continue;
    MatchRecord rec;
    rec.replier = reply.replier_id;
    rec.y = ack->y;
    rec.session_key = derive_session_key(state.x, ack->y);
    rec.at = now;
    rec.extra = std::move(ack->extra);
    state.matches.push_back(rec);
    fresh.push_back(std::move(rec));
  }
  return fresh;
}

std::vector<std::size_t> select_entropy_bounded(
    const std::vector<std::vector<Attribute>>& candidates, double phi,
    const PopulationStats& stats) {
  if (phi < 0) throw Error(Errc::invalid_argument, "entropy budget must be >= 0");
  std::vector<std::size_t> selected;
  if (phi == 0) return selected;  // nothing may leak

  std::set<std::string> disclosed;
  double spent = 0;
  std::vector<char> taken(candidates.size(), 0);
  for (;;) {
    double best_increment = 0;
    std::size_t best = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      double increment = 0;
      std::set<std::string> fresh;
      for (const auto& a : candidates[i]) {
        if (!disclosed.count(a.category) && !fresh.count(a.category)) {
          increment += attribute_entropy(a.category, stats);
          fresh.insert(a.category);
        }
      }
      if (best == candidates.size() || increment < best_increment) {
        best = i;
        best_increment = increment;
      }
    }
    if (best == candidates.size()) break;
    if (spent + best_increment > phi) break;
    taken[best] = 1;
    spent += best_increment;
    for (const auto& a : candidates[best]) disclosed.insert(a.category);
    selected.push_back(best);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

bool FrequencyLimiter::allow(std::uint32_t origin, std::uint64_t now) {
  auto [it, inserted] = buckets_.try_emplace(origin, Bucket{capacity_, now});
  Bucket& b = it->second;
  if (!inserted) {
    const double refill =
        static_cast<double>(now - b.last) / static_cast<double>(refill_interval_);
    b.tokens = std::min(capacity_, b.tokens + refill);
    b.last = now;
  }
  if (b.tokens >= 1.0) {
    b.tokens -= 1.0;
    return true;
  }
  return false;
}

ParticipantState ParticipantState::make(std::uint32_t id, Profile profile, std::uint64_t seed,
                                        ParticipantConfig config, const PopulationStats* stats) {
  ParticipantState st;
  st.id = id;
  st.vectors.push_back(build_indexed_vector(profile));
  st.profile = std::move(profile);
  st.stats = stats;
  st.config = config;
  st.rng = DetRng(DetRng::mix(seed, id));
  st.limiter = FrequencyLimiter(config.rate_capacity, config.rate_refill_interval);
  return st;
}

void ParticipantState::add_dynamic_salts(std::span<const Hash256> salts) {
  for (const auto& salt : salts) vectors.push_back(build_indexed_vector(profile, salt));
}

namespace {

// Attributes a candidate assignment would put at risk: the ones behind its
// known positions.
std::vector<Attribute> exposed_attributes(const CandidateAssignment& assignment,
                                          const IndexedProfileVector& vec,
                                          const Profile& profile) {
  std::vector<Attribute> out;
  for (std::uint32_t c : assignment.choice) {
    if (c == kUnknownIndex) continue;
    out.push_back(profile.attributes[vec.attr_pos[c]]);
  }
  return out;
}

struct Screened {
  std::vector<CandidateKey> keys;  // deduplicated across variants
  bool limit_exceeded = false;
};

Screened screen_variants(ParticipantState& state, const RequestPackage& pkg) {
  RequestView view;
  view.remainder = &pkg.remainder;
  view.hint = pkg.hint ? &*pkg.hint : nullptr;
  view.necessary_count = pkg.necessary_count;
  view.optional_required = pkg.optional_required;

  Screened out;
  const bool entropy_bounded = pkg.protocol == ProtocolId::p3 && state.config.phi && state.stats;
  for (const auto& variant : state.vectors) {
    CandidateEvaluation eval =
        evaluate_candidate(std::span<const Hash256>(variant.hashes.data(), variant.hashes.size()),
                           view, hash_field(), state.config.enumeration_limit);
    if (eval.limit_exceeded) {
      out.limit_exceeded = true;
      continue;
    }
    std::vector<std::size_t> chosen(eval.assignments.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
    if (entropy_bounded) {
      std::vector<std::vector<Attribute>> exposures;
      exposures.reserve(eval.assignments.size());
      for (const auto& a : eval.assignments) {
        exposures.push_back(exposed_attributes(a, variant, state.profile));
      }
      chosen = select_entropy_bounded(exposures, *state.config.phi, *state.stats);
    }
    for (std::size_t i : chosen) {
      ProfileKey key = derive_profile_key(
          std::span<const Hash256>(eval.completed[i].data(), eval.completed[i].size()));
      const std::uint32_t unknowns = eval.assignments[i].unknown_count();
      auto it = std::find_if(out.keys.begin(), out.keys.end(),
                             [&](const CandidateKey& k) { return k.key == key; });
      if (it == out.keys.end()) {
        out.keys.push_back(CandidateKey{key, unknowns});
      } else {
        it->min_unknowns = std::min(it->min_unknowns, unknowns);
      }
    }
  }
  return out;
}

}  // namespace

Action handle_request(ParticipantState& state, const RequestPackage& pkg, std::uint64_t now,
                      std::uint32_t origin_id) {
  Action action;
  if (now >= pkg.expiry) {
    action.drop = DropReason::expired;
    return action;
  }
  if (state.seen.count(pkg.request_id)) {
    action.drop = DropReason::duplicate;
    return action;
  }
  if (!state.limiter.allow(origin_id, now)) {
    action.drop = DropReason::rate_limited;
    return action;
  }
  state.seen.insert(pkg.request_id);

  auto forwarded = [&]() -> std::optional<RequestPackage> {
    if (pkg.ttl == 0) return std::nullopt;
    RequestPackage copy = pkg;
    copy.ttl = static_cast<std::uint8_t>(pkg.ttl - 1);
    return copy;
  };

  Screened screened = screen_variants(state, pkg);
  action.suspicious = screened.limit_exceeded;
  action.candidate = !screened.keys.empty();
  action.candidate_key_count = screened.keys.size();
  if (screened.keys.empty()) {
    action.forward = forwarded();
    return action;
  }

  if (pkg.protocol == ProtocolId::p1) {
    for (const auto& ck : screened.keys) {
      OpenResult opened = open_request_payload(ck.key.key, pkg.sealed, SealMode::with_confirmation);
      if (opened.status != OpenStatus::confirmed) continue;
      const Hash256 y = state.rng.bytes<32>();
      // intersection cardinality rides along as documented extra content
      std::uint8_t extra[2];
      store_be16(extra, static_cast<std::uint16_t>(pkg.attr_count() - ck.min_unknowns));
      ReplyPackage reply;
      reply.request_id = pkg.request_id;
      reply.replier_id = state.id;
      reply.sent_at = now;
      reply.acks.push_back(
          make_ack(*opened.x, y, std::span<const std::uint8_t>(extra, 2), state.rng));
      action.reply = std::move(reply);
      action.reply_session_keys.push_back(derive_session_key(*opened.x, y));
      if (!state.config.stop_forward_on_match_p1) action.forward = forwarded();
      return action;
    }
    action.forward = forwarded();
    return action;
  }

  // Protocols 2 and 3: one y, one ack per candidate key; decryption stays
  // locally unverifiable, and the package is still relayed.
  const Hash256 y = state.rng.bytes<32>();
  ReplyPackage reply;
  reply.request_id = pkg.request_id;
  reply.replier_id = state.id;
  reply.sent_at = now;
  for (const auto& ck : screened.keys) {
    OpenResult opened = open_request_payload(ck.key.key, pkg.sealed, SealMode::plain);
    reply.acks.push_back(make_ack(*opened.x, y, {}, state.rng));
    action.reply_session_keys.push_back(derive_session_key(*opened.x, y));
  }
  action.reply = std::move(reply);
  action.forward = forwarded();
  return action;
}

}  // namespace sbtl

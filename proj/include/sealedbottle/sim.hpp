#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sealedbottle/population.hpp"
#include "sealedbottle/protocol.hpp"

namespace sbtl {

enum class TopologyKind { complete, random_geometric, ring, grid };

struct TopologyParams {
  std::uint64_t edge_delay = 10'000;  // µs per hop
  double radius = 0.25;               // random-geometric connection radius
  std::uint32_t rows = 0;             // grid rows; 0 = near-square
};

struct Topology {
  std::uint32_t n = 0;
  struct Edge {
    std::uint32_t to;
    std::uint64_t delay;
  };
  std::vector<std::vector<Edge>> adj;

  std::size_t edge_count() const;
  // Nodes reachable from start, and the hop-depth of the farthest one.
  std::pair<std::vector<std::uint32_t>, std::uint32_t> reachable_from(std::uint32_t start) const;
};

Topology build_topology(TopologyKind kind, std::uint32_t n, const TopologyParams& params,
                        std::uint64_t seed);

enum class SimEventType { send, receive, forward, reply, drop, match_established };

struct SimEvent {
  std::uint64_t t = 0;
  SimEventType type = SimEventType::send;
  std::uint32_t node = 0;
  std::int64_t peer = -1;
  std::size_t bytes = 0;
  std::string detail;  // "broadcast"/"unicast", drop reason, ...
};

struct SimTrace {
  std::vector<SimEvent> events;
  std::vector<std::vector<std::uint8_t>> transmissions;  // every frame, once
  std::vector<MatchRecord> matches;                      // the initiator's accepted set
  std::uint32_t reachable_nodes = 0;
  bool fully_connected = false;
};

struct Metrics {
  std::string protocol_name;
  std::uint32_t prime = 0;
  double theta = 0;
  std::uint16_t m_t = 0;
  std::uint64_t seed = 0;

  double candidate_fraction = 0;  // candidates among reachable, over n
  double matching_fraction = 0;   // oracle matchers among reachable, over n
  std::uint64_t replies = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t broadcasts = 0;
  std::uint64_t unicasts = 0;
  std::uint64_t matches = 0;
  std::uint64_t first_match_latency = 0;  // µs, 0 when no match
  std::vector<std::size_t> candidate_key_set_sizes;

  // privacy protection levels in the honest-but-curious model, in order
  // (A_I vs matcher, A_I vs unmatcher, A_M vs initiator, A_U vs initiator)
  std::array<int, 4> ppl{};

  bool oracle_agreement = true;      // accepted set == oracle ∩ reachable
  bool session_keys_agreed = true;   // both ends derived the same key
  std::uint64_t dropped_expired = 0;
  std::uint64_t dropped_duplicate = 0;
  std::uint64_t dropped_rate_limited = 0;
  std::uint64_t units_sent = 0;      // per-link delivery units
  std::uint64_t units_received = 0;
  std::uint64_t units_inflight = 0;  // unserved at max-time
};

struct ScenarioParams {
  RequestSpec spec;
  ProtocolId protocol = ProtocolId::p2;
  RequestParams request;            // window == 0 → 2 × diameter × hop delay
  std::uint32_t initiator = 0;
  std::uint64_t max_time = 0;       // 0 → 10 × diameter × hop delay
  std::uint64_t base_processing = 100;
  std::uint64_t per_candidate_delay = 1000;  // per candidate key
  ParticipantConfig participant;
  std::uint32_t repeat_requests = 1;  // >1 exercises the frequency limiter
  std::uint64_t seed = 1;
  bool capture_bytes = true;
  double theta_label = 0;  // echoed into metrics; 0 → derive from spec
};

std::pair<SimTrace, Metrics> run_scenario(const Population& pop, const Topology& topo,
                                          const ScenarioParams& params);

// Everything an on-path adversary hears, concatenated.
std::vector<std::uint8_t> eavesdropper_view(const SimTrace& trace);

// Dictionary profiling against the first request in the view: residues
// narrow each position to the dictionary entries that fit.
struct DictionaryAttackReport {
  bool found_request = false;
  std::vector<std::vector<std::size_t>> per_position;  // dictionary indices per position
  double log2_guess_space = 0;  // log2 of the product of the position counts
};

DictionaryAttackReport dictionary_attack(std::span<const std::uint8_t> view,
                                         std::span<const Attribute> dictionary,
                                         const std::optional<Hash256>& salt = {});

// (m/p)^{m_t} guesses, reported as log2.
double dictionary_guess_space_log2(double dictionary_size, double p, double m_t);

struct SweepGrid {
  std::vector<std::uint32_t> primes;
  std::vector<double> thetas;
  std::vector<ProtocolId> protocols;
  std::vector<std::uint64_t> seeds;
  std::uint32_t request_user = 0;  // its profile becomes the request, α = 0
};

std::vector<Metrics> sweep(const Population& pop, const Topology& topo,
                           const ScenarioParams& base, const SweepGrid& grid,
                           unsigned jobs = 1);

// A pure-optional request over a profile: α = 0, β = ceil(θ·m_t).
RequestSpec spec_from_profile(const Profile& profile, double theta);

std::string metrics_csv_header();
std::string metrics_csv_row(const Metrics& m);
void write_trace_jsonl(const SimTrace& trace, std::ostream& out);

}  // namespace sbtl

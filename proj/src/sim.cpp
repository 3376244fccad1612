#include "sealedbottle/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <future>
#include <ostream>
#include <queue>
#include <sstream>

#include "sealedbottle/errors.hpp"

namespace sbtl {

std::size_t Topology::edge_count() const {
  std::size_t degree_sum = 0;
  for (const auto& edges : adj) degree_sum += edges.size();
  return degree_sum / 2;
}

std::pair<std::vector<std::uint32_t>, std::uint32_t> Topology::reachable_from(
    std::uint32_t start) const {
  std::vector<std::uint32_t> depth(n, UINT32_MAX);
  std::deque<std::uint32_t> queue;
  depth[start] = 0;
  queue.push_back(start);
  std::vector<std::uint32_t> order;
  std::uint32_t max_depth = 0;
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    order.push_back(v);
    max_depth = std::max(max_depth, depth[v]);
    for (const auto& e : adj[v]) {
      if (depth[e.to] == UINT32_MAX) {
        depth[e.to] = depth[v] + 1;
        queue.push_back(e.to);
      }
    }
  }
  return {std::move(order), max_depth};
}

Topology build_topology(TopologyKind kind, std::uint32_t n, const TopologyParams& params,
                        std::uint64_t seed) {
  if (n < 2) throw Error(Errc::invalid_argument, "topology needs at least two nodes");
  Topology t;
  t.n = n;
  t.adj.resize(n);
  auto link = [&](std::uint32_t a, std::uint32_t b, std::uint64_t delay) {
    t.adj[a].push_back({b, delay});
    t.adj[b].push_back({a, delay});
  };
  switch (kind) {
    case TopologyKind::complete:
      for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) link(a, b, params.edge_delay);
      }
      break;
    case TopologyKind::ring:
      if (n == 2) {
        link(0, 1, params.edge_delay);
      } else {
        for (std::uint32_t a = 0; a < n; ++a) link(a, (a + 1) % n, params.edge_delay);
      }
      break;
    case TopologyKind::grid: {
      const auto rows = params.rows > 0
                            ? params.rows
                            : static_cast<std::uint32_t>(std::floor(std::sqrt(double(n))));
      const std::uint32_t cols = (n + rows - 1) / rows;
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t r = i / cols;
        if ((i % cols) + 1 < cols && i + 1 < n) link(i, i + 1, params.edge_delay);
        if ((r + 1) * cols + (i % cols) < n) link(i, i + cols, params.edge_delay);
      }
      break;
    }
    case TopologyKind::random_geometric: {
      DetRng rng(seed);
      std::vector<std::pair<double, double>> pos(n);
      for (auto& p : pos) {
        p.first = rng.unit_real();
        p.second = rng.unit_real();
      }
      const double r2 = params.radius * params.radius;
      for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) {
          const double dx = pos[a].first - pos[b].first;
          const double dy = pos[a].second - pos[b].second;
          if (dx * dx + dy * dy <= r2) link(a, b, params.edge_delay);
        }
      }
      break;
    }
  }
  for (auto& edges : t.adj) {
    std::sort(edges.begin(), edges.end(),
              [](const Topology::Edge& a, const Topology::Edge& b) { return a.to < b.to; });
  }
  return t;
}

namespace {

const char* event_name(SimEventType t) {
  switch (t) {
    case SimEventType::send: return "send";
    case SimEventType::receive: return "receive";
    case SimEventType::forward: return "forward";
    case SimEventType::reply: return "reply";
    case SimEventType::drop: return "drop";
    case SimEventType::match_established: return "match-established";
  }
  return "?";
}

struct Delivery {
  std::uint64_t t = 0;
  std::uint64_t seq = 0;
  enum Kind { request, reply } kind = request;
  std::uint32_t to = 0;
  std::uint32_t from = 0;
  std::uint32_t origin = 0;        // request creator
  std::uint32_t reply_source = 0;  // replier, for reply routing
  std::size_t frame = 0;           // index into trace.transmissions
};

struct DeliveryLater {
  bool operator()(const Delivery& a, const Delivery& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

const char* protocol_name(ProtocolId p) {
  switch (p) {
    case ProtocolId::p1: return "P1";
    case ProtocolId::p2: return "P2";
    case ProtocolId::p3: return "P3";
  }
  return "?";
}

std::array<int, 4> ppl_labels(ProtocolId p) {
  // HBC-model levels for (A_I,v_M), (A_I,v_U), (A_M,v_I), (A_U,v_I)
  if (p == ProtocolId::p1) return {1, 3, 2, 3};
  return {3, 3, 2, 3};
}

}  // namespace

std::pair<SimTrace, Metrics> run_scenario(const Population& pop, const Topology& topo,
                                          const ScenarioParams& params) {
  if (pop.size() != topo.n) {
    throw Error(Errc::invalid_argument, "population size must match topology size");
  }
  if (params.initiator >= topo.n) throw Error(Errc::invalid_argument, "initiator out of range");

  SimTrace trace;
  Metrics metrics;
  metrics.protocol_name = protocol_name(params.protocol);
  metrics.prime = params.request.prime;
  metrics.m_t = params.spec.attr_count();
  metrics.theta = params.theta_label > 0 ? params.theta_label : params.spec.threshold();
  metrics.seed = params.seed;
  metrics.ppl = ppl_labels(params.protocol);

  auto [reachable, depth] = topo.reachable_from(params.initiator);
  trace.reachable_nodes = static_cast<std::uint32_t>(reachable.size());
  trace.fully_connected = reachable.size() == topo.n;

  std::uint64_t max_edge_delay = 0;
  for (const auto& edges : topo.adj) {
    for (const auto& e : edges) max_edge_delay = std::max(max_edge_delay, e.delay);
  }
  const std::uint64_t diameter_delay =
      std::max<std::uint64_t>(1, depth) * std::max<std::uint64_t>(1, max_edge_delay);
  const std::uint64_t max_time = params.max_time > 0 ? params.max_time : 10 * diameter_delay;

  RequestParams request = params.request;
  if (request.window == 0) request.window = 2 * diameter_delay;
  if (request.ttl == 0) {
    request.ttl = static_cast<std::uint8_t>(std::min<std::uint32_t>(topo.n, 255));
  }

  std::vector<ParticipantState> nodes;
  nodes.reserve(topo.n);
  std::vector<char> oracle_matches(topo.n, 0);
  for (std::uint32_t i = 0; i < topo.n; ++i) {
    nodes.push_back(ParticipantState::make(i, pop.profiles[i], DetRng::mix(params.seed, 0x70),
                                           params.participant, &pop.stats));
    oracle_matches[i] = oracle_match(params.spec, pop.profiles[i]).is_match() ? 1 : 0;
  }
  std::vector<char> is_reachable(topo.n, 0);
  for (auto v : reachable) is_reachable[v] = 1;

  std::priority_queue<Delivery, std::vector<Delivery>, DeliveryLater> queue;
  std::uint64_t seq = 0;
  std::vector<std::int64_t> parent(topo.n, -1);
  std::vector<char> candidate(topo.n, 0);
  std::vector<std::size_t> key_counts(topo.n, 0);
  std::vector<std::vector<Hash256>> replier_session_keys(topo.n);

  auto add_frame = [&](std::vector<std::uint8_t> bytes) -> std::size_t {
    trace.transmissions.push_back(std::move(bytes));
    return trace.transmissions.size() - 1;
  };
  auto frame_size = [&](std::size_t frame) { return trace.transmissions[frame].size(); };
  auto edge_delay = [&](std::uint32_t from, std::uint32_t to) -> std::uint64_t {
    for (const auto& e : topo.adj[from]) {
      if (e.to == to) return e.delay;
    }
    return max_edge_delay;
  };

  auto broadcast = [&](std::uint32_t from, const RequestPackage& pkg, std::uint64_t at,
                       std::uint32_t origin, std::int64_t skip) {
    if (at > max_time) return;
    const std::size_t frame = add_frame(encode_request(pkg));
    metrics.broadcasts += 1;
    metrics.total_bytes += frame_size(frame);
    trace.events.push_back({at, SimEventType::send, from, -1, frame_size(frame), "broadcast"});
    for (const auto& e : topo.adj[from]) {
      if (static_cast<std::int64_t>(e.to) == skip) continue;
      queue.push(Delivery{at + e.delay, seq++, Delivery::request, e.to, from, origin, 0, frame});
      metrics.units_sent += 1;
    }
  };

  // send a reply one hop toward the initiator
  auto unicast_reply = [&](std::uint32_t from, std::uint32_t to, std::size_t frame,
                           std::uint32_t reply_source, std::uint64_t at, std::uint32_t origin) {
    if (at > max_time) return;
    metrics.unicasts += 1;
    metrics.total_bytes += frame_size(frame);
    trace.events.push_back({at, SimEventType::send, from, static_cast<std::int64_t>(to),
                            frame_size(frame), "unicast"});
    queue.push(Delivery{at + edge_delay(from, to), seq++, Delivery::reply, to, from, origin,
                        reply_source, frame});
    metrics.units_sent += 1;
  };

  auto first = create_request(params.spec, params.protocol, request, 0);
  RequestPackage first_pkg = std::move(first.first);
  InitiatorState initiator = std::move(first.second);
  nodes[params.initiator].seen.insert(first_pkg.request_id);
  broadcast(params.initiator, first_pkg, 0, params.initiator, -1);
  // repeated requests carry fresh ids; participants rate-limit per origin
  for (std::uint32_t rep = 1; rep < params.repeat_requests; ++rep) {
    RequestParams again = request;
    again.seed = DetRng::mix(request.seed, rep);
    auto extra = create_request(params.spec, params.protocol, again, 0);
    nodes[params.initiator].seen.insert(extra.first.request_id);
    broadcast(params.initiator, extra.first, rep, params.initiator, -1);
  }

  while (!queue.empty()) {
    const Delivery d = queue.top();
    if (d.t > max_time) break;
    queue.pop();
    metrics.units_received += 1;
    trace.events.push_back({d.t, SimEventType::receive, d.to, static_cast<std::int64_t>(d.from),
                            frame_size(d.frame),
                            d.kind == Delivery::request ? "request" : "reply"});

    if (d.kind == Delivery::reply) {
      if (d.to == params.initiator) {
        ReplyPackage reply = decode_reply(trace.transmissions[d.frame], d.reply_source, d.t);
        auto fresh = collect_replies(initiator, std::span<const ReplyPackage>(&reply, 1), d.t);
        for (const auto& m : fresh) {
          trace.events.push_back({d.t, SimEventType::match_established, d.to,
                                  static_cast<std::int64_t>(m.replier), 0, "match"});
          if (metrics.first_match_latency == 0) metrics.first_match_latency = d.t;
          const auto& derivable = replier_session_keys[m.replier];
          if (std::find(derivable.begin(), derivable.end(), m.session_key) == derivable.end()) {
            metrics.session_keys_agreed = false;
          }
        }
      } else if (parent[d.to] >= 0) {
        unicast_reply(d.to, static_cast<std::uint32_t>(parent[d.to]), d.frame, d.reply_source,
                      d.t, d.origin);
      }
      continue;
    }

    RequestPackage pkg = decode_request(trace.transmissions[d.frame]);
    ParticipantState& node = nodes[d.to];
    Action action = handle_request(node, pkg, d.t, d.origin);
    if (action.dropped()) {
      const char* reason = action.drop == DropReason::expired      ? "expired"
                           : action.drop == DropReason::duplicate  ? "duplicate"
                                                                   : "rate-limited";
      trace.events.push_back(
          {d.t, SimEventType::drop, d.to, static_cast<std::int64_t>(d.from), 0, reason});
      if (action.drop == DropReason::expired) metrics.dropped_expired += 1;
      if (action.drop == DropReason::duplicate) metrics.dropped_duplicate += 1;
      if (action.drop == DropReason::rate_limited) metrics.dropped_rate_limited += 1;
      continue;
    }
    if (parent[d.to] < 0 && d.to != params.initiator) parent[d.to] = d.from;
    if (action.candidate && pkg.request_id == initiator.request_id) {
      candidate[d.to] = 1;
      key_counts[d.to] = std::max(key_counts[d.to], action.candidate_key_count);
    }
    const std::uint64_t processing =
        params.base_processing + params.per_candidate_delay * action.candidate_key_count;
    const std::uint64_t done = d.t + processing;
    if (done > max_time) continue;  // finishes past the horizon

    if (action.reply) {
      trace.events.push_back({done, SimEventType::reply, d.to, -1, 0,
                              "acks=" + std::to_string(action.reply->acks.size())});
      metrics.replies += 1;
      for (const auto& sk : action.reply_session_keys) {
        replier_session_keys[d.to].push_back(sk);
      }
      action.reply->sent_at = done;
      const std::size_t frame = add_frame(encode_reply(*action.reply));
      if (parent[d.to] >= 0) {
        unicast_reply(d.to, static_cast<std::uint32_t>(parent[d.to]), frame, d.to, done,
                      d.origin);
      }
    }
    if (action.forward) {
      trace.events.push_back(
          {done, SimEventType::forward, d.to, -1, 0, "ttl=" + std::to_string(action.forward->ttl)});
      broadcast(d.to, *action.forward, done, d.origin, parent[d.to]);
    }
  }
  metrics.units_inflight = queue.size();
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const SimEvent& a, const SimEvent& b) { return a.t < b.t; });

  std::uint32_t candidate_count = 0;
  std::uint32_t matching_reachable = 0;
  for (std::uint32_t i = 0; i < topo.n; ++i) {
    if (i == params.initiator) continue;
    if (candidate[i]) {
      ++candidate_count;
      metrics.candidate_key_set_sizes.push_back(key_counts[i]);
    }
    if (oracle_matches[i] && is_reachable[i]) ++matching_reachable;
  }
  metrics.candidate_fraction = static_cast<double>(candidate_count) / topo.n;
  metrics.matching_fraction = static_cast<double>(matching_reachable) / topo.n;
  metrics.matches = initiator.matches.size();

  std::vector<char> accepted(topo.n, 0);
  for (const auto& m : initiator.matches) accepted[m.replier] = 1;
  for (std::uint32_t i = 0; i < topo.n; ++i) {
    if (i == params.initiator) continue;
    const bool expected = oracle_matches[i] && is_reachable[i];
    if (accepted[i] != (expected ? 1 : 0)) metrics.oracle_agreement = false;
  }

  trace.matches = std::move(initiator.matches);
  if (!params.capture_bytes) trace.transmissions.clear();
  return {std::move(trace), std::move(metrics)};
}

std::vector<std::uint8_t> eavesdropper_view(const SimTrace& trace) {
  std::vector<std::uint8_t> view;
  for (const auto& frame : trace.transmissions) {
    view.insert(view.end(), frame.begin(), frame.end());
  }
  return view;
}

namespace {

// like decode_request but tolerant of trailing bytes (stream parsing)
std::optional<RequestPackage> decode_request_prefix(std::span<const std::uint8_t> bytes) {
  try {
    ByteReader r(bytes);
    if (r.bytes<4>() != kWireMagic) return std::nullopt;
    if (r.u8() != kWireVersion) return std::nullopt;
    const std::uint8_t proto = r.u8();
    if (proto < 1 || proto > 3) return std::nullopt;
    RequestPackage pkg;
    pkg.protocol = static_cast<ProtocolId>(proto);
    pkg.request_id = r.bytes<16>();
    pkg.expiry = r.u64();
    pkg.ttl = r.u8();
    if (r.u8() != 0) return std::nullopt;
    pkg.remainder.prime = r.u32();
    const std::uint16_t m_t = r.u16();
    pkg.necessary_count = r.u16();
    pkg.optional_required = r.u16();
    if (m_t == 0 || pkg.necessary_count + pkg.optional_required > m_t) return std::nullopt;
    for (std::uint16_t i = 0; i < m_t; ++i) pkg.remainder.residues.push_back(r.u32());
    const auto gamma =
        static_cast<std::uint16_t>(m_t - pkg.necessary_count - pkg.optional_required);
    if (gamma > 0) {
      HintMatrix hm;
      hm.gamma = gamma;
      hm.beta = pkg.optional_required;
      for (std::size_t i = 0; i < static_cast<std::size_t>(gamma) * hm.beta; ++i) {
        hm.random_block.push_back(r.u32());
      }
      for (std::uint16_t i = 0; i < gamma; ++i) {
        auto enc = r.bytes<33>();
        hm.checksum.push_back(big_from_bytes_be(std::span<const std::uint8_t>(enc.data(), 33)));
      }
      pkg.hint = std::move(hm);
    }
    pkg.sealed.nonce = r.bytes<16>();
    const std::uint16_t payload_len = r.u16();
    auto payload = r.take(payload_len);
    pkg.sealed.ciphertext.assign(payload.begin(), payload.end());
    return pkg;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

DictionaryAttackReport dictionary_attack(std::span<const std::uint8_t> view,
                                         std::span<const Attribute> dictionary,
                                         const std::optional<Hash256>& salt) {
  DictionaryAttackReport report;
  std::optional<RequestPackage> pkg;
  for (std::size_t off = 0; off + 4 <= view.size(); ++off) {
    if (view[off] != 'S' || view[off + 1] != 'B' || view[off + 2] != 'T' || view[off + 3] != 'L') {
      continue;
    }
    pkg = decode_request_prefix(view.subspan(off));
    if (pkg) break;
  }
  if (!pkg) return report;
  report.found_request = true;

  std::vector<std::uint32_t> dict_residues;
  dict_residues.reserve(dictionary.size());
  for (const auto& attr : dictionary) {
    dict_residues.push_back(residue_mod(hash_attribute(attr, salt), pkg->remainder.prime));
  }
  report.per_position.resize(pkg->remainder.residues.size());
  double log2_guesses = 0;
  for (std::size_t i = 0; i < pkg->remainder.residues.size(); ++i) {
    for (std::size_t d = 0; d < dictionary.size(); ++d) {
      if (dict_residues[d] == pkg->remainder.residues[i]) report.per_position[i].push_back(d);
    }
    log2_guesses += std::log2(static_cast<double>(report.per_position[i].size()));
  }
  report.log2_guess_space = log2_guesses;
  return report;
}

double dictionary_guess_space_log2(double dictionary_size, double p, double m_t) {
  return m_t * (std::log2(dictionary_size) - std::log2(p));
}

RequestSpec spec_from_profile(const Profile& profile, double theta) {
  if (theta <= 0 || theta > 1) throw Error(Errc::invalid_argument, "theta must be in (0, 1]");
  const auto m_t = static_cast<std::uint16_t>(profile.size());
  const auto beta = static_cast<std::uint16_t>(std::ceil(theta * static_cast<double>(m_t) - 1e-9));
  return RequestSpec::make({}, profile.attributes, beta);
}

std::vector<Metrics> sweep(const Population& pop, const Topology& topo,
                           const ScenarioParams& base, const SweepGrid& grid, unsigned jobs) {
  std::vector<ScenarioParams> cells;
  for (ProtocolId protocol : grid.protocols) {
    for (std::uint32_t p : grid.primes) {
      for (double theta : grid.thetas) {
        for (std::uint64_t seed : grid.seeds) {
          ScenarioParams params = base;
          params.protocol = protocol;
          params.request.prime = p;
          params.request.seed = DetRng::mix(seed, p);
          params.seed = seed;
          params.spec = spec_from_profile(pop.profiles[grid.request_user], theta);
          params.theta_label = theta;
          params.capture_bytes = false;
          cells.push_back(std::move(params));
        }
      }
    }
  }

  std::vector<Metrics> rows(cells.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      rows[i] = run_scenario(pop, topo, cells[i]).second;
    }
    return rows;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      rows[i] = run_scenario(pop, topo, cells[i]).second;
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  return rows;
}

std::string metrics_csv_header() {
  return "protocol,p,theta,m_t,seed,candidate_fraction,matching_fraction,replies,bytes,latency";
}

namespace {
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace

std::string metrics_csv_row(const Metrics& m) {
  std::ostringstream out;
  out << m.protocol_name << ',' << m.prime << ',' << format_double(m.theta) << ',' << m.m_t << ','
      << m.seed << ',' << format_double(m.candidate_fraction) << ','
      << format_double(m.matching_fraction) << ',' << m.replies << ',' << m.total_bytes << ','
      << m.first_match_latency;
  return out.str();
}

void write_trace_jsonl(const SimTrace& trace, std::ostream& out) {
  for (const auto& e : trace.events) {
    out << "{\"t\":" << e.t << ",\"type\":\"" << event_name(e.type) << "\",\"node\":" << e.node;
    if (e.peer >= 0) out << ",\"peer\":" << e.peer;
    if (e.bytes > 0) out << ",\"bytes\":" << e.bytes;
    if (!e.detail.empty()) out << ",\"detail\":\"" << e.detail << '"';
    out << "}\n";
  }
}

}  // namespace sbtl

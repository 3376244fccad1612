// Command-line front end: dataset generation, matching runs, protocol
// simulation, parameter sweeps and the vicinity-search demo.

#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "sealedbottle/errors.hpp"
#include "sealedbottle/lattice.hpp"
#include "sealedbottle/population.hpp"
#include "sealedbottle/sim.hpp"

using nlohmann::json;
using namespace sbtl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyViolation = 1;
constexpr int kExitUsage = 2;
constexpr const char* kVersionLine = "# sbtl-version 1";

[[noreturn]] void config_error(const std::string& path, const std::string& message) {
  throw Error(Errc::parse_error, "config error at " + path + ": " + message);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) config_error(path + "." + key, "unknown key");
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
  return j;
}

GenerateParams generate_params_from_json(const json& j, const std::string& path) {
  reject_unknown_keys(j,
                      {"n", "categories", "values_per_category", "zipf_s", "mean_attrs",
                       "max_attrs", "fixed_attrs", "seed"},
                      path);
  GenerateParams p;
  p.n = j.value("n", p.n);
  p.categories = j.value("categories", p.categories);
  p.values_per_category = j.value("values_per_category", p.values_per_category);
  p.zipf_s = j.value("zipf_s", p.zipf_s);
  p.mean_attrs = j.value("mean_attrs", p.mean_attrs);
  p.max_attrs = j.value("max_attrs", p.max_attrs);
  p.fixed_attrs = j.value("fixed_attrs", p.fixed_attrs);
  p.seed = j.value("seed", p.seed);
  return p;
}

Population population_from_json(const json& j, const std::string& path) {
  reject_unknown_keys(j, {"file", "generate"}, path);
  if (j.contains("file") == j.contains("generate")) {
    config_error(path, "need exactly one of 'file' or 'generate'");
  }
  if (j.contains("file")) return load_population_file(j["file"].get<std::string>());
  return generate_population(generate_params_from_json(j["generate"], path + ".generate"));
}

Topology topology_from_json(const json& j, std::uint32_t n, const std::string& path,
                            std::uint64_t seed) {
  reject_unknown_keys(j, {"kind", "radius", "rows", "edge_delay_us", "seed"}, path);
  TopologyParams params;
  params.radius = j.value("radius", params.radius);
  params.rows = j.value("rows", params.rows);
  params.edge_delay = j.value("edge_delay_us", params.edge_delay);
  const std::string kind = j.value("kind", "random-geometric");
  TopologyKind k;
  if (kind == "complete") {
    k = TopologyKind::complete;
  } else if (kind == "ring") {
    k = TopologyKind::ring;
  } else if (kind == "grid") {
    k = TopologyKind::grid;
  } else if (kind == "random-geometric") {
    k = TopologyKind::random_geometric;
  } else {
    config_error(path + ".kind", "must be complete|ring|grid|random-geometric");
  }
  return build_topology(k, n, params, j.value("seed", seed));
}

std::vector<Attribute> attributes_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array of [category, value] pairs");
  std::vector<Attribute> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& pair = j[i];
    if (!pair.is_array() || pair.size() != 2) {
      config_error(path + "[" + std::to_string(i) + "]", "expected [category, value]");
    }
    out.push_back(make_attribute(pair[0].get<std::string>(), pair[1].get<std::string>()));
  }
  return out;
}

RequestSpec spec_from_json(const json& j, const Population& pop, const std::string& path) {
  reject_unknown_keys(j, {"user", "theta", "alpha", "necessary", "optional", "beta"}, path);
  if (j.contains("necessary") || j.contains("optional")) {
    if (!j.contains("beta")) config_error(path + ".beta", "required with explicit attributes");
    return RequestSpec::make(
        j.contains("necessary") ? attributes_from_json(j["necessary"], path + ".necessary")
                                : std::vector<Attribute>{},
        j.contains("optional") ? attributes_from_json(j["optional"], path + ".optional")
                               : std::vector<Attribute>{},
        j["beta"].get<std::uint16_t>());
  }
  if (!j.contains("user") || !j.contains("theta")) {
    config_error(path, "need either explicit attributes or {user, theta}");
  }
  const auto user = j["user"].get<std::uint64_t>();
  if (user >= pop.size()) config_error(path + ".user", "user id out of range");
  const double theta = j["theta"].get<double>();
  const Profile& profile = pop.profiles[user];
  const auto alpha = j.value("alpha", std::uint16_t{0});
  if (alpha == 0) return spec_from_profile(profile, theta);
  if (alpha >= profile.size()) config_error(path + ".alpha", "alpha exceeds profile size");
  std::vector<Attribute> necessary(profile.attributes.begin(),
                                   profile.attributes.begin() + alpha);
  std::vector<Attribute> optional_attrs(profile.attributes.begin() + alpha,
                                        profile.attributes.end());
  const auto want =
      static_cast<std::uint16_t>(std::ceil(theta * static_cast<double>(profile.size()) - 1e-9));
  if (want < alpha) config_error(path + ".theta", "theta below the necessary fraction");
  const auto beta = static_cast<std::uint16_t>(want - alpha);
  if (beta > optional_attrs.size()) config_error(path + ".theta", "theta needs too many attrs");
  return RequestSpec::make(std::move(necessary), std::move(optional_attrs), beta);
}

struct SimulateConfig {
  Population population;
  Topology topology;
  ScenarioParams scenario;
  std::string trace_path;
  std::string metrics_path;
};

SimulateConfig simulate_config(const json& j, bool sweep_mode) {
  std::set<std::string> keys = {"population", "topology", "protocol",  "request",
                                "p",          "ttl",      "expiry_us", "window_us",
                                "kappa_max",  "phi",      "initiator", "seed",
                                "max_time_us", "repeat_requests", "outputs"};
  if (sweep_mode) {
    keys.insert("grid");
    keys.insert("seeds");
    keys.insert("request_user");
  }
  reject_unknown_keys(j, keys, "$");
  if (!j.contains("population")) config_error("$.population", "required");

  SimulateConfig cfg;
  cfg.population = population_from_json(j["population"], "$.population");
  const std::uint64_t seed = j.value("seed", std::uint64_t{1});
  if (!j.contains("topology")) config_error("$.topology", "required");
  cfg.topology = topology_from_json(j["topology"], static_cast<std::uint32_t>(cfg.population.size()),
                                    "$.topology", seed);

  ScenarioParams& sp = cfg.scenario;
  sp.seed = seed;
  sp.request.seed = j.value("seed", std::uint64_t{1});
  sp.request.prime = j.value("p", sp.request.prime);
  sp.request.ttl = static_cast<std::uint8_t>(j.value("ttl", 0));
  sp.request.expiry = j.value("expiry_us", sp.request.expiry);
  sp.request.window = j.value("window_us", std::uint64_t{0});
  sp.request.kappa_max = j.value("kappa_max", std::uint64_t{0});
  if (j.contains("phi") && !j["phi"].is_null()) {
    sp.participant.phi = j["phi"].get<double>();
  }
  sp.initiator = j.value("initiator", 0u);
  sp.max_time = j.value("max_time_us", std::uint64_t{0});
  sp.repeat_requests = j.value("repeat_requests", 1u);
  const int proto = j.value("protocol", 2);
  if (proto < 1 || proto > 3) config_error("$.protocol", "must be 1, 2 or 3");
  sp.protocol = static_cast<ProtocolId>(proto);

  if (!sweep_mode) {
    if (!j.contains("request")) config_error("$.request", "required");
    sp.spec = spec_from_json(j["request"], cfg.population, "$.request");
  }

  if (j.contains("outputs")) {
    reject_unknown_keys(j["outputs"], {"trace", "metrics"}, "$.outputs");
    cfg.trace_path = j["outputs"].value("trace", "");
    cfg.metrics_path = j["outputs"].value("metrics", "");
  }
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse_error, "cannot open " + path + " for writing");
  return out;
}

// ---- subcommand bodies ----

struct GenArgs {
  GenerateParams params;
  std::string out;
  std::string stats_out;
};

int run_gen(const GenArgs& args) {
  if (args.params.n == 0) throw Error(Errc::invalid_argument, "--n must be >= 1");
  const Population pop = generate_population(args.params);
  if (!args.out.empty()) {
    save_population_file(pop, args.out);
  } else {
    save_population_csv(pop, std::cout);
  }
  if (!args.stats_out.empty()) {
    auto out = open_output(args.stats_out);
    save_stats_json(pop.stats, out);
  }
  const double unique = unique_profile_fraction(pop);
  std::cerr << "generated " << pop.size() << " profiles, unique fraction "
            << unique << "\n";
  return kExitOk;
}

int run_load(const std::string& in_path, const std::string& stats_out) {
  const Population pop = load_population_file(in_path);
  if (!stats_out.empty()) {
    auto out = open_output(stats_out);
    save_stats_json(pop.stats, out);
  }
  std::size_t attrs = 0;
  for (const auto& p : pop.profiles) attrs += p.size();
  std::cout << "users: " << pop.size() << "\n"
            << "attributes: " << attrs << "\n"
            << "categories: " << pop.stats.counts.size() << "\n"
            << "unique profile fraction: " << unique_profile_fraction(pop) << "\n";
  return kExitOk;
}

int run_match(const std::string& pop_path, const std::string& spec_path, std::uint32_t p,
              std::uint64_t limit) {
  const Population pop = load_population_file(pop_path);
  const RequestSpec spec = spec_from_json(load_json(spec_path), pop, "$");

  const RequestVectors rv = build_request_vectors(spec);
  const RemainderVector remainder = build_remainder_vector(
      std::span<const Hash256>(rv.request_order.data(), rv.request_order.size()), p);
  std::optional<HintMatrix> hint;
  DetRng rng(1);
  if (spec.tolerated_unknowns() > 0) {
    std::vector<Big> bigs;
    for (const auto& h : rv.optional_hashes) {
      bigs.push_back(big_from_bytes_be(std::span<const std::uint8_t>(h.data(), 32)));
    }
    hint = build_hint_matrix(std::span<const Big>(bigs.data(), bigs.size()),
                             spec.tolerated_unknowns(), hash_field(), rng);
  }
  const RequestView view{&remainder, hint ? &*hint : nullptr, spec.necessary_count(),
                         spec.optional_required};

  std::size_t candidates = 0, matching = 0, perfect = 0, disagreements = 0, suspicious = 0;
  for (const auto& profile : pop.profiles) {
    const ProfileVector vec = build_profile_vector(profile);
    const CandidateEvaluation eval =
        evaluate_candidate(std::span<const Hash256>(vec.hashes.data(), vec.hashes.size()), view,
                           hash_field(), limit);
    const bool derived = std::any_of(eval.keys.begin(), eval.keys.end(),
                                     [&](const CandidateKey& k) { return k.key == rv.key; });
    const MatchResult oracle = oracle_match(spec, profile);
    candidates += eval.is_candidate();
    suspicious += eval.limit_exceeded;
    matching += oracle.is_match();
    perfect += oracle.verdict == MatchVerdict::perfect;
    disagreements += derived != oracle.is_match();
  }
  std::cout << "users: " << pop.size() << "\n"
            << "p: " << p << "\n"
            << "candidates: " << candidates << "\n"
            << "matching (oracle): " << matching << "\n"
            << "perfect (oracle): " << perfect << "\n"
            << "suspicious (enumeration limit): " << suspicious << "\n"
            << "disagreements: " << disagreements << "\n";
  return disagreements == 0 ? kExitOk : kExitPropertyViolation;
}

int run_simulate(const std::string& config_path) {
  const json j = load_json(config_path);
  SimulateConfig cfg = simulate_config(j, false);
  const auto [trace, metrics] = run_scenario(cfg.population, cfg.topology, cfg.scenario);

  if (!cfg.trace_path.empty()) {
    auto out = open_output(cfg.trace_path);
    write_trace_jsonl(trace, out);
  }
  {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!cfg.metrics_path.empty()) {
      file = open_output(cfg.metrics_path);
      out = &file;
    }
    *out << kVersionLine << " config " << config_path << " seed " << cfg.scenario.seed << "\n"
         << metrics_csv_header() << "\n"
         << metrics_csv_row(metrics) << "\n";
  }
  std::cerr << "matches: " << metrics.matches << ", replies: " << metrics.replies
            << ", reachable: " << trace.reachable_nodes << "/" << cfg.topology.n
            << (metrics.oracle_agreement ? "" : ", ORACLE DISAGREEMENT") << "\n";
  return metrics.oracle_agreement ? kExitOk : kExitPropertyViolation;
}

int run_sweep(const std::string& config_path, unsigned jobs) {
  const json j = load_json(config_path);
  SimulateConfig cfg = simulate_config(j, true);
  if (!j.contains("grid")) config_error("$.grid", "required");
  reject_unknown_keys(j["grid"], {"p", "theta", "protocols"}, "$.grid");

  SweepGrid grid;
  for (const auto& v : j["grid"].value("p", json::array({3, 5, 7, 11, 13}))) {
    grid.primes.push_back(v.get<std::uint32_t>());
  }
  for (const auto& v : j["grid"].value("theta", json::array({0.5, 0.6, 0.8, 1.0}))) {
    grid.thetas.push_back(v.get<double>());
  }
  for (const auto& v : j["grid"].value("protocols", json::array({2}))) {
    const int proto = v.get<int>();
    if (proto < 1 || proto > 3) config_error("$.grid.protocols", "must be 1, 2 or 3");
    grid.protocols.push_back(static_cast<ProtocolId>(proto));
  }
  for (const auto& v : j.value("seeds", json::array({1}))) {
    grid.seeds.push_back(v.get<std::uint64_t>());
  }
  grid.request_user = j.value("request_user", 0u);
  if (grid.request_user >= cfg.population.size()) {
    config_error("$.request_user", "user id out of range");
  }

  const auto rows = sweep(cfg.population, cfg.topology, cfg.scenario, grid, jobs);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!cfg.metrics_path.empty()) {
    file = open_output(cfg.metrics_path);
    out = &file;
  }
  *out << kVersionLine << " config " << config_path << "\n" << metrics_csv_header() << "\n";
  for (const auto& m : rows) *out << metrics_csv_row(m) << "\n";
  std::cerr << "sweep: " << rows.size() << " rows\n";
  return kExitOk;
}

struct GeoArgs {
  double d = 1.0;
  std::uint32_t rings = 2;
  double ax = 0, ay = 0;
  double bx = 2, by = 0;
};

int run_geo(const GeoArgs& args) {
  const LatticeConfig cfg{{0, 0}, args.d};
  const VicinitySet va = vicinity_set(cfg, {args.ax, args.ay}, args.rings);
  const VicinitySet vb = vicinity_set(cfg, {args.bx, args.by}, args.rings);
  const double similarity = vicinity_similarity(va, vb);

  std::cout << "lattice spacing d = " << args.d << ", rings K = " << args.rings << "\n"
            << "vicinity size = " << va.points.size() << " (3K(K+1)+1)\n"
            << "|A ∩ B| / |B| = " << similarity << "\n";

  // vicinity search via the fuzzy-matching machinery
  const auto attrs = vicinity_request_attributes(va);
  const auto beta = static_cast<std::uint16_t>(
      std::ceil(similarity * static_cast<double>(attrs.size()) - 1e-9));
  if (beta == 0) {
    std::cout << "users are out of range: no positive threshold reproduces this overlap\n";
    return kExitOk;
  }
  const RequestSpec spec = RequestSpec::make({}, attrs, beta);
  const Profile b_profile = Profile::from_attributes(vicinity_request_attributes(vb));
  const MatchResult verdict = oracle_match(spec, b_profile);
  std::cout << "theta = " << beta << "/" << attrs.size() << " -> B "
            << (verdict.is_match() ? "is" : "is not") << " in A's vicinity\n";

  // dynamic-key rendezvous: B screens with every salt of its own vicinity
  const Hash256 salt = dynamic_key_for(hash_location(cfg, {args.ax, args.ay}));
  RequestParams params;
  params.dynamic_salt = salt;
  const RequestSpec static_spec =
      RequestSpec::make({make_attribute("tag", "demo")}, {make_attribute("tag", "shared")}, 1);
  auto [pkg, initiator] = create_request(static_spec, ProtocolId::p2, params, 0);
  ParticipantState b_user = ParticipantState::make(
      1,
      Profile::from_attributes({make_attribute("tag", "demo"), make_attribute("tag", "shared")}),
      7);
  const auto salts = derive_dynamic_keys(vb);
  b_user.add_dynamic_salts(std::span<const Hash256>(salts.data(), salts.size()));
  const Action action = handle_request(b_user, pkg, 1, 0);
  bool rendezvous = false;
  if (action.reply) {
    rendezvous =
        !collect_replies(initiator, std::span<const ReplyPackage>(&*action.reply, 1), 2).empty();
  }
  std::cout << "dynamic-key rendezvous (" << salts.size() << " salts tried): "
            << (rendezvous ? "key agreed" : "no shared lattice point") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-preserving profile matching toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic population CSV");
  cmd_gen->add_option("--n", gen.params.n, "number of users");
  cmd_gen->add_option("--categories", gen.params.categories, "attribute categories");
  cmd_gen->add_option("--values", gen.params.values_per_category, "values per category");
  cmd_gen->add_option("--zipf-s", gen.params.zipf_s, "zipf exponent (0 = uniform)");
  cmd_gen->add_option("--mean-attrs", gen.params.mean_attrs, "mean attributes per user");
  cmd_gen->add_option("--max-attrs", gen.params.max_attrs, "max attributes per user");
  cmd_gen->add_option("--fixed-attrs", gen.params.fixed_attrs, "exact attributes per user");
  cmd_gen->add_option("--seed", gen.params.seed, "rng seed");
  cmd_gen->add_option("--out", gen.out, "output CSV path (default stdout)");
  cmd_gen->add_option("--stats-out", gen.stats_out, "stats JSON path");

  std::string load_in, load_stats;
  auto* cmd_load = app.add_subcommand("load", "load and summarize a population CSV");
  cmd_load->add_option("--in", load_in, "population CSV")->required();
  cmd_load->add_option("--stats-out", load_stats, "stats JSON path");

  std::string match_pop, match_spec;
  std::uint32_t match_p = 11;
  std::uint64_t match_limit = kDefaultEnumerationLimit;
  auto* cmd_match = app.add_subcommand("match", "run the pipeline against every user");
  cmd_match->add_option("--pop", match_pop, "population CSV")->required();
  cmd_match->add_option("--spec", match_spec, "request spec JSON")->required();
  cmd_match->add_option("--p", match_p, "remainder prime");
  cmd_match->add_option("--limit", match_limit, "enumeration limit");

  std::string sim_config;
  auto* cmd_sim = app.add_subcommand("simulate", "run one scenario from a config file");
  cmd_sim->add_option("--config", sim_config, "run config JSON")->required();

  std::string sweep_config;
  unsigned sweep_jobs = 1;
  auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep from a config file");
  cmd_sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  cmd_sweep->add_option("--jobs", sweep_jobs, "parallel scenario workers");

  GeoArgs geo;
  auto* cmd_geo = app.add_subcommand("geo", "vicinity search demo");
  cmd_geo->add_option("--d", geo.d, "lattice spacing (meters)");
  cmd_geo->add_option("--rings", geo.rings, "vicinity rings K");
  cmd_geo->add_option("--ax", geo.ax, "user A x");
  cmd_geo->add_option("--ay", geo.ay, "user A y");
  cmd_geo->add_option("--bx", geo.bx, "user B x");
  cmd_geo->add_option("--by", geo.by, "user B y");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_gen) return run_gen(gen);
    if (*cmd_load) return run_load(load_in, load_stats);
    if (*cmd_match) return run_match(match_pop, match_spec, match_p, match_limit);
    if (*cmd_sim) return run_simulate(sim_config);
    if (*cmd_sweep) return run_sweep(sweep_config, sweep_jobs);
    if (*cmd_geo) return run_geo(geo);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

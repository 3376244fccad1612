#include "sealedbottle/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sealedbottle/errors.hpp"
#include "sealedbottle/rng.hpp"

#include "json.hpp"

namespace sbtl {

namespace {

// Inverse-CDF Zipf sampler; s = 0 degenerates to uniform.
class ZipfSampler {
 public:
  ZipfSampler(std::uint32_t n, double s) {
    cdf_.reserve(n);
    double acc = 0;
    for (std::uint32_t k = 1; k <= n; ++k) {
      acc += 1.0 / std::pow(static_cast<double>(k), s);
      cdf_.push_back(acc);
    }
    for (double& v : cdf_) v /= acc;
  }

  // Returns a rank in [1, n]; rank 1 is the most popular value.
  std::uint32_t draw(DetRng& rng) const {
    const double u = rng.unit_real();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::uint32_t>(it - cdf_.begin()) + 1;
  }

 private:
  std::vector<double> cdf_;
};

std::uint32_t draw_attr_count(const GenerateParams& p, DetRng& rng) {
  if (p.fixed_attrs > 0) return p.fixed_attrs;
  // Binomial(max_attrs, mean/max): mean matches, support capped at max_attrs.
  const double prob = p.mean_attrs / p.max_attrs;
  std::uint32_t count = 0;
  for (std::uint32_t i = 0; i < p.max_attrs; ++i) {
    if (rng.unit_real() < prob) ++count;
  }
  return count == 0 ? 1 : count;
}

}  // namespace

PopulationStats compute_stats(const std::vector<Profile>& profiles) {
  PopulationStats stats;
  stats.population_size = profiles.size();
  for (const auto& profile : profiles) {
    for (const auto& a : profile.attributes) stats.add(a);
  }
  return stats;
}

Population generate_population(const GenerateParams& params) {
  if (params.n == 0) throw Error(Errc::invalid_argument, "population size must be >= 1");
  if (params.categories == 0 || params.values_per_category == 0) {
    throw Error(Errc::invalid_argument, "categories and values_per_category must be >= 1");
  }
  if (params.max_attrs == 0 || params.max_attrs > kMaxProfileAttributes) {
    throw Error(Errc::invalid_argument, "max_attrs out of range");
  }
  if (params.fixed_attrs > params.max_attrs) {
    throw Error(Errc::invalid_argument, "fixed_attrs exceeds max_attrs");
  }
  if (params.zipf_s < 0) throw Error(Errc::invalid_argument, "zipf_s must be >= 0");

  DetRng rng(params.seed);
  ZipfSampler zipf(params.values_per_category, params.zipf_s);

  Population pop;
  pop.profiles.reserve(params.n);
  for (std::uint64_t u = 0; u < params.n; ++u) {
    const std::uint32_t want = draw_attr_count(params, rng);
    std::vector<Attribute> attrs;
    attrs.reserve(want);
    std::size_t guard = 0;
    while (attrs.size() < want && guard < 64 * static_cast<std::size_t>(want)) {
      ++guard;
      const auto cat = static_cast<std::uint32_t>(rng.below(params.categories));
      const std::uint32_t rank = zipf.draw(rng);
      Attribute a{"c" + std::to_string(cat), "v" + std::to_string(rank)};
      if (std::find(attrs.begin(), attrs.end(), a) == attrs.end()) attrs.push_back(a);
    }
    pop.profiles.push_back(Profile::from_attributes(std::move(attrs)));
  }
  pop.stats = compute_stats(pop.profiles);
  return pop;
}

Population load_population(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "empty population file");
  ++line_no;
  // tolerate a UTF-8 BOM and trailing CR
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xef) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "user_id,category,value") {
    throw Error(Errc::parse_error, "line 1: expected header user_id,category,value");
  }

  std::map<std::string, std::vector<Attribute>> users;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 3 fields");
    }
    const std::string user = line.substr(0, c1);
    const std::string category = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string value = line.substr(c2 + 1);
    if (user.empty()) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": empty user_id");
    }
    Attribute attr;
    try {
      attr = make_attribute(category, value);
    } catch (const Error& e) {
      throw Error(Errc::parse_error,
                  "line " + std::to_string(line_no) + ": " + std::string(e.what()));
    }
    auto [it, inserted] = users.try_emplace(user);
    if (inserted) order.push_back(user);
    it->second.push_back(std::move(attr));
  }
  if (order.empty()) throw Error(Errc::parse_error, "population file has no attribute rows");

  Population pop;
  pop.profiles.reserve(order.size());
  for (const auto& user : order) {
    try {
      pop.profiles.push_back(Profile::from_attributes(std::move(users[user])));
    } catch (const Error& e) {
      throw Error(Errc::parse_error, "user " + user + ": " + std::string(e.what()));
    }
  }
  pop.stats = compute_stats(pop.profiles);
  return pop;
}

Population load_population_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path);
  return load_population(in);
}

void save_population_csv(const Population& pop, std::ostream& out) {
  out << "user_id,category,value\n";
  for (std::size_t u = 0; u < pop.profiles.size(); ++u) {
    for (const auto& a : pop.profiles[u].attributes) {
      out << u << ',' << a.category << ',' << a.value << '\n';
    }
  }
}

void save_population_file(const Population& pop, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse_error, "cannot open " + path + " for writing");
  save_population_csv(pop, out);
}

void save_stats_json(const PopulationStats& stats, std::ostream& out) {
  nlohmann::ordered_json j;
  for (const auto& [category, values] : stats.counts) {
    nlohmann::ordered_json cat;
    for (const auto& [value, count] : values) cat[value] = count;
    j[category] = std::move(cat);
  }
  out << j.dump(2) << '\n';
}

double unique_profile_fraction(const Population& pop) {
  std::map<std::vector<Attribute>, std::uint32_t> seen;
  for (const auto& p : pop.profiles) ++seen[p.attributes];
  std::size_t unique = 0;
  for (const auto& p : pop.profiles) {
    if (seen[p.attributes] == 1) ++unique;
  }
  return pop.profiles.empty() ? 0.0 : static_cast<double>(unique) / pop.profiles.size();
}

}  // namespace sbtl

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sealedbottle/entropy.hpp"
#include "sealedbottle/profile.hpp"

namespace sbtl {

struct Population {
  std::vector<Profile> profiles;
  PopulationStats stats;

  std::size_t size() const { return profiles.size(); }
};

// Synthetic population shaped like the evaluation dataset: Zipf-distributed
// values within each category, attribute counts with mean ~6 capped at 20.
struct GenerateParams {
  std::uint64_t n = 1000;
  std::uint32_t categories = 8;
  std::uint32_t values_per_category = 1000;
  double zipf_s = 1.1;
  double mean_attrs = 6.0;
  std::uint32_t max_attrs = 20;
  std::uint32_t fixed_attrs = 0;  // when > 0, every profile gets exactly this many
  std::uint64_t seed = 1;
};

Population generate_population(const GenerateParams& params);

// CSV format: header "user_id,category,value", one attribute per row.
Population load_population(std::istream& in);
Population load_population_file(const std::string& path);
void save_population_csv(const Population& pop, std::ostream& out);
void save_population_file(const Population& pop, const std::string& path);

// JSON object {category: {value: count}}.
void save_stats_json(const PopulationStats& stats, std::ostream& out);

// Fraction of profiles whose attribute set appears exactly once.
double unique_profile_fraction(const Population& pop);

// Rebuilds stats from the profiles (used after loading).
PopulationStats compute_stats(const std::vector<Profile>& profiles);

}  // namespace sbtl

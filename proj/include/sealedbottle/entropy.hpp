#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "sealedbottle/profile.hpp"

namespace sbtl {

// Empirical per-category value counts over a population.
struct PopulationStats {
  std::map<std::string, std::map<std::string, std::uint64_t>> counts;
  std::uint64_t population_size = 0;

  void add(const Attribute& a) { ++counts[a.category][a.value]; }
  bool has_category(const std::string& category) const { return counts.count(category) != 0; }
};

// Shannon entropy (base 2) of the category's empirical value distribution.
double attribute_entropy(const std::string& category, const PopulationStats& stats);

// Sum of attribute_entropy over the distinct categories present in attrs.
// A category appearing several times is counted once.
double profile_entropy(std::span<const Attribute> attrs, const PopulationStats& stats);

// K-anonymity entropy budget: log2(n / k).
double k_anonymity_budget(std::uint64_t population, std::uint64_t k);

}  // namespace sbtl

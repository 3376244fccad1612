#include "sealedbottle/entropy.hpp"

#include <cmath>
#include <set>

#include "sealedbottle/errors.hpp"

namespace sbtl {

double attribute_entropy(const std::string& category, const PopulationStats& stats) {
  auto it = stats.counts.find(category);
  if (it == stats.counts.end()) {
    throw Error(Errc::unknown_category, "unknown attribute category: " + category);
  }
  double total = 0;
  for (const auto& [value, count] : it->second) total += static_cast<double>(count);
  double entropy = 0;
  for (const auto& [value, count] : it->second) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log2(p);
  }
  return entropy < 0 ? 0.0 : entropy;
}

double profile_entropy(std::span<const Attribute> attrs, const PopulationStats& stats) {
  std::set<std::string> categories;
  for (const auto& a : attrs) categories.insert(a.category);
  double sum = 0;
  for (const auto& c : categories) sum += attribute_entropy(c, stats);
  return sum;
}

double k_anonymity_budget(std::uint64_t population, std::uint64_t k) {
  if (population == 0 || k == 0 || k > population) {
    throw Error(Errc::invalid_argument, "k-anonymity budget needs 1 <= k <= n");
  }
  return std::log2(static_cast<double>(population) / static_cast<double>(k));
}

}  // namespace sbtl

#include "sealedbottle/candidates.hpp"

#include <algorithm>

#include "sealedbottle/errors.hpp"

namespace sbtl {

namespace {

struct Search {
  const std::vector<std::vector<std::uint32_t>>& subsets;
  std::uint16_t alpha;
  std::uint16_t gamma;
  std::size_t limit;
  std::size_t user_size;

  std::vector<std::uint32_t> choice;
  std::vector<char> used;
  std::vector<CandidateAssignment>* out;

  void run() {
    choice.assign(subsets.size(), kUnknownIndex);
    used.assign(user_size, 0);
    descend(0, 0, 0, 0);
  }

  void descend(std::size_t pos, std::uint32_t nec_floor, std::uint32_t opt_floor,
               std::uint16_t unknowns) {
    if (pos == subsets.size()) {
      if (out->size() >= limit) {
        throw Error(Errc::limit_exceeded, "candidate assignment limit exceeded");
      }
      out->push_back(CandidateAssignment{choice});
      return;
    }
    const bool necessary = pos < alpha;
    const std::uint32_t floor = necessary ? nec_floor : opt_floor;
    for (std::uint32_t x : subsets[pos]) {
      if (x < floor || used[x]) continue;
      choice[pos] = x;
      used[x] = 1;
      if (necessary) {
        descend(pos + 1, x + 1, opt_floor, unknowns);
      } else {
        descend(pos + 1, nec_floor, x + 1, unknowns);
      }
      used[x] = 0;
      choice[pos] = kUnknownIndex;
    }
    if (!necessary && unknowns < gamma) {
      descend(pos + 1, nec_floor, opt_floor, static_cast<std::uint16_t>(unknowns + 1));
    }
  }
};

}  // namespace

std::vector<CandidateAssignment> enumerate_candidates(
    const std::vector<std::vector<std::uint32_t>>& subsets, std::uint16_t necessary_count,
    std::uint16_t tolerated_unknowns, std::size_t limit) {
  if (limit < 1) throw Error(Errc::invalid_argument, "enumeration limit must be >= 1");
  if (necessary_count > subsets.size()) {
    throw Error(Errc::invalid_argument, "necessary count exceeds position count");
  }
  std::size_t user_size = 0;
  for (const auto& s : subsets) {
    for (auto x : s) user_size = std::max<std::size_t>(user_size, x + 1);
  }
  std::vector<CandidateAssignment> out;
  Search search{subsets, necessary_count, tolerated_unknowns, limit, user_size, {}, {}, &out};
  search.run();
  return out;
}

}  // namespace sbtl

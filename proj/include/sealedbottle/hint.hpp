#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sealedbottle/field.hpp"
#include "sealedbottle/rng.hpp"

namespace sbtl {

// Public linear constraints over the γ+β optional request hashes:
//   [I_γ | R] · h_optional = B  (mod q)
// A participant who knows at least β of the optional hashes can solve for the
// ones it lacks. Only R and B travel on the wire; the identity block is
// implicit.
struct HintMatrix {
  std::uint16_t gamma = 0;
  std::uint16_t beta = 0;
  std::vector<std::uint32_t> random_block;  // γ×β row-major, entries nonzero
  std::vector<Big> checksum;                // B, γ entries < field modulus

  std::uint32_t r_at(std::size_t row, std::size_t col) const {
    return random_block[row * beta + col];
  }
  bool operator==(const HintMatrix& other) const = default;
};

// optional_hashes in request order, length γ+β; entries already < modulus.
HintMatrix build_hint_matrix(std::span<const Big> optional_hashes, std::uint16_t gamma,
                             const Field& field, DetRng& rng);

enum class HintSolveStatus {
  ok,
  singular,            // degenerate random sub-matrix
  inconsistent,        // over-determined rows disagree (wrong candidate)
  value_out_of_range,  // recovered value has no 256-bit preimage
  residue_mismatch,    // recovered value contradicts the remainder vector
};

struct HintSolution {
  HintSolveStatus status = HintSolveStatus::ok;
  std::vector<Big> optional_hashes;  // complete, request order (empty unless ok)
};

// Residue screen applied to each recovered value.
struct RecoveryCheck {
  std::uint32_t prime = 0;
  std::vector<std::uint32_t> optional_residues;  // per optional position
  Big bound;                                     // recovered values must be < bound
};

// `optional_values` has one entry per optional request position: the
// participant's own hash where known, nullopt where unknown (≤ γ of them).
// Zero unknowns returns the knowns unchanged without solving.
HintSolution solve_hint(const std::vector<std::optional<Big>>& optional_values,
                        const HintMatrix& hint, const Field& field,
                        const RecoveryCheck* check = nullptr);

}  // namespace sbtl

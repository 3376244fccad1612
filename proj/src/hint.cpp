#include "sealedbottle/hint.hpp"

#include "sealedbottle/errors.hpp"
#include "sealedbottle/remainder.hpp"

namespace sbtl {

HintMatrix build_hint_matrix(std::span<const Big> optional_hashes, std::uint16_t gamma,
                             const Field& field, DetRng& rng) {
  if (gamma == 0) throw Error(Errc::invalid_argument, "hint matrix requires gamma >= 1");
  if (optional_hashes.size() < gamma) {
    throw Error(Errc::invalid_argument, "hint matrix needs gamma+beta optional hashes");
  }
  const auto beta = static_cast<std::uint16_t>(optional_hashes.size() - gamma);

  HintMatrix hm;
  hm.gamma = gamma;
  hm.beta = beta;
  hm.random_block.reserve(static_cast<std::size_t>(gamma) * beta);
  for (std::size_t i = 0; i < static_cast<std::size_t>(gamma) * beta; ++i) {
    hm.random_block.push_back(static_cast<std::uint32_t>(rng.between(1, 0xffffffffULL)));
  }
  hm.checksum.reserve(gamma);
  for (std::size_t row = 0; row < gamma; ++row) {
    Big b = optional_hashes[row];  // identity block
    for (std::size_t col = 0; col < beta; ++col) {
      b = field.add(b, field.mul(Big(hm.r_at(row, col)), optional_hashes[gamma + col]));
    }
    hm.checksum.push_back(field.reduce(b));
  }
  return hm;
}

namespace {

// Column `j` of [I_γ | R] at row `row`.
Big constraint_coefficient(const HintMatrix& hm, std::size_t row, std::size_t j) {
  if (j < hm.gamma) return Big(row == j ? 1 : 0);
  return Big(hm.r_at(row, j - hm.gamma));
}

}  // namespace

HintSolution solve_hint(const std::vector<std::optional<Big>>& optional_values,
                        const HintMatrix& hint, const Field& field, const RecoveryCheck* check) {
  const std::size_t cols = static_cast<std::size_t>(hint.gamma) + hint.beta;
  if (optional_values.size() != cols) {
    throw Error(Errc::invalid_argument, "optional value count does not match hint matrix");
  }
  std::vector<std::size_t> unknown_pos;
  for (std::size_t j = 0; j < cols; ++j) {
    if (!optional_values[j]) unknown_pos.push_back(j);
  }
  if (unknown_pos.size() > hint.gamma) {
    throw Error(Errc::invalid_argument, "more unknowns than the hint system can recover");
  }

  HintSolution sol;
  std::vector<Big> complete(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    if (optional_values[j]) complete[j] = field.reduce(*optional_values[j]);
  }

  const std::size_t u = unknown_pos.size();
  if (u > 0) {
    // rhs = B - (known columns), matrix = unknown columns of [I|R]
    const std::size_t rows = hint.gamma;
    std::vector<std::vector<Big>> a(rows, std::vector<Big>(u));
    std::vector<Big> rhs(rows);
    for (std::size_t row = 0; row < rows; ++row) {
      Big b = hint.checksum[row];
      for (std::size_t j = 0; j < cols; ++j) {
        if (!optional_values[j]) continue;
        b = field.sub(b, field.mul(constraint_coefficient(hint, row, j), complete[j]));
      }
      rhs[row] = b;
      for (std::size_t k = 0; k < u; ++k) {
        a[row][k] = constraint_coefficient(hint, row, unknown_pos[k]);
      }
    }

    // Exact Gaussian elimination in GF(q).
    std::size_t pivot_row = 0;
    std::vector<std::size_t> pivot_of_col(u);
    for (std::size_t col = 0; col < u; ++col) {
      std::size_t sel = pivot_row;
      while (sel < rows && a[sel][col] == 0) ++sel;
      if (sel == rows) {
        sol.status = HintSolveStatus::singular;
        return sol;
      }
      std::swap(a[sel], a[pivot_row]);
      std::swap(rhs[sel], rhs[pivot_row]);
      const auto inv = field.inv(a[pivot_row][col]);
      if (!inv) {
        sol.status = HintSolveStatus::singular;
        return sol;
      }
      for (std::size_t k = col; k < u; ++k) a[pivot_row][k] = field.mul(a[pivot_row][k], *inv);
      rhs[pivot_row] = field.mul(rhs[pivot_row], *inv);
      for (std::size_t r = 0; r < rows; ++r) {
        if (r == pivot_row || a[r][col] == 0) continue;
        const Big factor = a[r][col];
        for (std::size_t k = col; k < u; ++k) {
          a[r][k] = field.sub(a[r][k], field.mul(factor, a[pivot_row][k]));
        }
        rhs[r] = field.sub(rhs[r], field.mul(factor, rhs[pivot_row]));
      }
      pivot_of_col[col] = pivot_row;
      ++pivot_row;
    }
    // rows beyond the pivots must have vanished
    for (std::size_t r = pivot_row; r < rows; ++r) {
      if (rhs[r] != 0) {
        sol.status = HintSolveStatus::inconsistent;
        return sol;
      }
    }
    for (std::size_t k = 0; k < u; ++k) complete[unknown_pos[k]] = rhs[pivot_of_col[k]];
  }

  if (check) {
    for (std::size_t k = 0; k < unknown_pos.size(); ++k) {
      const std::size_t j = unknown_pos[k];
      const Big& v = complete[j];
      if (v >= check->bound) {
        sol.status = HintSolveStatus::value_out_of_range;
        return sol;
      }
      const Hash256 as_hash = big_to_array_be<32>(v);
      if (residue_mod(as_hash, check->prime) != check->optional_residues[j]) {
        sol.status = HintSolveStatus::residue_mismatch;
        return sol;
      }
    }
  }

  sol.optional_hashes = std::move(complete);
  return sol;
}

}  // namespace sbtl

#pragma once

#include <optional>

#include "cubicwa/linalg.hpp"
#include "cubicwa/poly.hpp"

namespace cubicwa::pencil {

/// Tuple of symmetric rational matrices M_1..M_mu of common size rho.
struct SymmetricPencil {
  int rho = 0;
  std::vector<MatQ> mats;

  SymmetricPencil() = default;
  SymmetricPencil(int rho_, std::vector<MatQ> mats_);  // validates symmetry and sizes
  int mu() const { return static_cast<int>(mats.size()); }
};

/// Certificate b^T m b = d with d diagonal and rank(d) = rank(m).
struct CongruenceCertificate {
  MatQ b;
  MatQ d;
};

/// Symmetric Gaussian congruence. Pivots on the first nonzero diagonal entry
/// of the active block; when the active diagonal is all zero but some
/// off-diagonal a_ij is not, applies x_i -> x_i + x_j first.
CongruenceCertificate diagonalize_congruent(const MatQ& m);

inline constexpr int kPencilDetSizeBound = 8;

/// det(sum y_j M_j) as an exact polynomial in mu variables, total degree
/// <= rho. Throws std::invalid_argument when rho exceeds the size bound.
Poly pencil_det(const SymmetricPencil& p);

struct RankWitness {
  VecQ y;
  Rat det_value;  // det(sum y_j M_j), nonzero
};

/// sum y_j M_j at a concrete y.
MatQ pencil_eval(const SymmetricPencil& p, std::span<const Rat> y);

/// Constructive full-rank point: diagonalize the lowest-index nonzero matrix,
/// recurse on the complementary sub-pencil of the others, then scale the
/// chosen coordinate by P = 1, 2, 4, ... until the determinant is nonzero.
/// Returns nullopt exactly when pencil_det is the zero polynomial (a grid
/// fallback covers pencils the recursion cannot handle).
std::optional<RankWitness> find_full_rank_point(const SymmetricPencil& p);

/// Direct fallback: first y in (height, lex) order with det != 0, integer
/// entries with |y_i| <= max_height. Shards deterministically when
/// threads > 1.
std::optional<RankWitness> find_full_rank_point_grid(const SymmetricPencil& p,
                                                     int max_height = 16,
                                                     int threads = 1);

/// Per index i: whether some M_j has a nonzero (i, i) entry.
std::vector<bool> check_diagonal_hypothesis(const SymmetricPencil& p);

}  // namespace cubicwa::pencil

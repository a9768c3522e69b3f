#pragma once

#include <array>
#include <optional>

#include "cubicwa/cubic_form.hpp"
#include "cubicwa/pencil.hpp"

namespace cubicwa::fibration {

/// A cubic form arranged as
///   C(x, y) = sum_i y_i (x^T M_i x) + 2 sum_j x_j q_j(y) + c(y),
/// x the first m variables, y the remaining h. `source` keeps the form the
/// blocks were extracted from, so corrupted blocks are detectable.
struct SplitCubic {
  int m = 0;
  int h = 0;
  CubicForm source{0};
  std::vector<MatQ> mi;  // h symmetric m x m matrices
  std::vector<Poly> qj;  // m quadratic forms in the y variables
  Poly cy;               // cubic form in the y variables
};

/// Collects monomials by x-degree. Throws std::invalid_argument when a
/// monomial is cubic in the x block (form not in split shape). An optional
/// x_vars designation permutes those variables to the front first; the
/// resulting blocks then describe the permuted form.
SplitCubic split(const CubicForm& c, int m);
SplitCubic split(const CubicForm& c, int m, const std::vector<int>& x_vars);

/// Reassembles the defining identity from the blocks.
CubicForm reassemble(const SplitCubic& s);

/// The (m+1) x (m+1) symmetric matrix A(y) of polynomials in y: leading
/// block sum y_i M_i, border q_j(y), corner c(y).
struct FiberMatrix {
  int size = 0;
  std::vector<std::vector<Poly>> entries;
};
FiberMatrix fiber_matrix(const SplitCubic& s);

/// A(y) at a concrete y.
MatQ fiber_quadric(const SplitCubic& s, std::span<const Rat> y);

/// Exact identity t * Q_y(x, t) = C(x, t y) in the combined ring, with C the
/// stored source form.
bool fiber_identity_check(const SplitCubic& s);

struct FiberRank {
  int rank = 0;
  std::optional<pencil::RankWitness> witness;  // det_value is the certifying minor's value
  std::vector<int> minor_rows, minor_cols;
};

/// Largest k with a k x k minor of A(y) not identically zero, plus a witness
/// y realizing it.
FiberRank generic_fiber_rank(const SplitCubic& s);

struct ReduceResult {
  SplitCubic reduced;
  LinearChange change;  // on y: reduced form at change * y equals the input form
  int t = 0;            // size of the maximal independent set of leading quadrics
};

/// Lemma-7-style reduction for m = 4, h >= 11: after an invertible change in
/// the y block only, M_i = 0 for all i > t with t <= 10.
ReduceResult strong_equivalence_reduce(const SplitCubic& s);

enum class CaseOutcome {
  found,
  linear_space_contradiction,  // q* and c* both vanish: a linear space lies on Y
  det_identically_zero,
};

struct CaseWitness {
  CaseOutcome outcome = CaseOutcome::det_identically_zero;
  int case_id = 0;  // 1 or 2
  VecQ y;           // witness in the coordinates of the input split
  Rat det_value;    // det A(y) for the input split, nonzero when found
  // Construction data, in the coordinates the construction ends in:
  Poly det_along_ray;     // det A along the scaling ray, univariate in P
  int predicted_degree = 0;  // 3 (case 1) or 4 (case 2)
  Rat predicted_leading;     // c*(b) det(M)  or  -a^2 det(M')
  VecQ b_head;               // values for the zero-block coordinates
  VecQ b_tail;               // generic vector for the nonzero block
  Rat block_det;             // det(M) or det(M')
  Rat a_coeff;               // case 2 only
  bool used_grid_fallback = false;
};

/// Full-rank fiber witness for a reduced split (m = 4): case 1 when every
/// border form restricted to the zero-block coordinates vanishes, case 2
/// otherwise, both following the scaling constructions; falls back to a grid
/// search over det A(y) when a construction step has no generic vector.
CaseWitness case_witness(const SplitCubic& reduced);

}  // namespace cubicwa::fibration

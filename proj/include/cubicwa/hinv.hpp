#pragma once

#include <utility>

#include "cubicwa/cubic_form.hpp"

namespace cubicwa::hinv {

/// Witness for C = sum L_i * Q_i. L_i are coefficient vectors of linear
/// forms, Q_i symmetric matrices of quadratic forms; every L_i is nonzero.
struct Decomposition {
  int n = 0;
  std::vector<std::pair<VecQ, MatQ>> pairs;
  int h() const { return static_cast<int>(pairs.size()); }
};

/// Basis of the solution space of L_1 = ... = L_h = 0; every rational
/// combination of the basis lies on the hypersurface.
struct RationalPlane {
  int n = 0;
  std::vector<VecQ> basis;
};

/// Exact check that the expanded sum of pairs reproduces c's tensor.
bool verify_decomposition(const CubicForm& c, const Decomposition& d);

struct HBoundOptions {
  // Upper bound on subspace restriction checks across the whole search.
  long node_budget = 400000;
};

struct HBoundResult {
  int bound = 0;
  Decomposition witness;
  bool budget_exhausted = false;
  long nodes = 0;
};

/// Searches rational linear subspaces of coefficient height <= height inside
/// {C = 0}, normal vectors enumerated in (height, lex) order. Returns a
/// verified upper bound for the h-invariant together with a Decomposition
/// built by polynomial division; falls back to the variable-by-variable
/// decomposition when the search finds nothing better.
HBoundResult h_upper_bound(const CubicForm& c, int height, const HBoundOptions& opts = {});

/// Kernel of the L_i rows, in canonical form. Throws std::invalid_argument
/// unless d verifies against c.
RationalPlane extract_plane(const CubicForm& c, const Decomposition& d);

/// Transport a decomposition along x -> B x: pairs (L_i o B, Q_i o B)
/// verifying substitute(c, B).
Decomposition transform(const Decomposition& d, const LinearChange& b);

/// The quadratic form of a symmetric matrix as a polynomial, x^T Q x.
Poly quadratic_poly(const MatQ& q);
/// Inverse of quadratic_poly; requires a homogeneous quadratic.
MatQ quadratic_matrix(const Poly& p);

}  // namespace cubicwa::hinv

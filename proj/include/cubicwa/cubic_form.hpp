#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>

#include "cubicwa/linalg.hpp"
#include "cubicwa/poly.hpp"

namespace cubicwa {

/// Invertible rational change of variables x -> B x.
class LinearChange {
 public:
  explicit LinearChange(MatQ b);  // throws std::invalid_argument when det(B) == 0
  static LinearChange identity(int n);
  /// Change sending x_i to x_{perm[i]} (perm a permutation of 0..n-1).
  static LinearChange permutation(const std::vector<int>& perm);

  const MatQ& matrix() const { return b_; }
  int n() const { return static_cast<int>(b_.size()); }
  LinearChange inverse() const { return LinearChange(mat_inverse(b_)); }
  LinearChange then(const LinearChange& second) const;

 private:
  MatQ b_;
};

/// Homogeneous cubic form. Coefficients are stored per monomial, keyed by
/// ordered index triples i <= j <= k:  C(x) = sum a_{ijk} x_i x_j x_k.
/// The symmetric tensor entry is a_{ijk} divided by the multinomial count.
class CubicForm {
 public:
  explicit CubicForm(int n) : n_(n) {}
  static CubicForm from_poly(const Poly& p);  // throws unless homogeneous of degree 3
  Poly to_poly() const;

  int n() const { return n_; }
  const std::map<std::array<int, 3>, Rat>& coeffs() const { return coeffs_; }
  /// Monomial coefficient; indices may come in any order.
  Rat coeff(int i, int j, int k) const;
  void add_coeff(int i, int j, int k, const Rat& c);
  bool is_zero() const { return coeffs_.empty(); }

  Rat eval(std::span<const Rat> x) const;
  std::vector<Poly> gradient() const;
  CubicForm substitute(const LinearChange& t) const;  // C(B x)

  bool operator==(const CubicForm& o) const { return n_ == o.n_ && coeffs_ == o.coeffs_; }

 private:
  int n_;
  std::map<std::array<int, 3>, Rat> coeffs_;
};

/// Vertex of the cone {C(x + lambda v) == C(x)}, when one exists. The kernel
/// of v -> sum_i v_i dC/dx_i is computed exactly and the translation identity
/// re-verified symbolically on the returned vector.
std::optional<VecQ> cone_vertex(const CubicForm& c);

/// Index j such that C is at most linear in x_j (lowest such), making e_j a
/// singular point of {C = 0}; certified by direct evaluation.
std::optional<int> forced_singular_point(const CubicForm& c);

}  // namespace cubicwa

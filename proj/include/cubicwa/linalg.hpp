#pragma once

#include <optional>
#include <vector>

#include "cubicwa/rat.hpp"

namespace cubicwa {

using VecQ = std::vector<Rat>;
using MatQ = std::vector<std::vector<Rat>>;  // row major, rectangular

MatQ mat_identity(int n);
MatQ mat_zero(int rows, int cols);
int mat_rows(const MatQ& a);
int mat_cols(const MatQ& a);
MatQ mat_mul(const MatQ& a, const MatQ& b);
VecQ mat_vec(const MatQ& a, const VecQ& v);
MatQ mat_transpose(const MatQ& a);
MatQ mat_add(const MatQ& a, const MatQ& b);
MatQ mat_scaled(const MatQ& a, const Rat& c);
bool mat_is_symmetric(const MatQ& a);
bool mat_is_zero(const MatQ& a);

/// Exact determinant by rational Gaussian elimination. Empty matrix: 1.
Rat mat_det(MatQ a);

/// Rank by rational Gaussian elimination.
int mat_rank(MatQ a);

/// Rank by fraction-free (Bareiss) elimination over the integers, after
/// clearing row denominators. Independent of mat_rank's pivoting path.
int mat_rank_ff(const MatQ& a);

/// Throws std::domain_error when singular.
MatQ mat_inverse(const MatQ& a);

/// Reduced row echelon form; pivot column indices appended to *pivots.
MatQ rref(MatQ a, std::vector<int>* pivots = nullptr);

/// Scales a rational vector to a primitive integer vector whose first nonzero
/// entry is positive. The zero vector is returned unchanged.
VecQ make_primitive(VecQ v);

/// Canonical kernel basis: from the RREF, one vector per free column in
/// ascending column order, each normalized by make_primitive.
std::vector<VecQ> kernel_basis(const MatQ& a);

/// One solution of a x = b when consistent.
std::optional<VecQ> solve_linear(const MatQ& a, const VecQ& b);

}  // namespace cubicwa

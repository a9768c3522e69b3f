#include "cubicwa/linalg.hpp"

#include <stdexcept>

namespace cubicwa {

MatQ mat_identity(int n) {
  MatQ a(n, VecQ(n, Rat(0)));
  for (int i = 0; i < n; ++i) a[i][i] = Rat(1);
  return a;
}

MatQ mat_zero(int rows, int cols) { return MatQ(rows, VecQ(cols, Rat(0))); }

int mat_rows(const MatQ& a) { return static_cast<int>(a.size()); }
int mat_cols(const MatQ& a) { return a.empty() ? 0 : static_cast<int>(a[0].size()); }

MatQ mat_mul(const MatQ& a, const MatQ& b) {
  int r = mat_rows(a), k = mat_cols(a), c = mat_cols(b);
  if (k != mat_rows(b)) throw std::invalid_argument("mat_mul: shape mismatch");
  MatQ out = mat_zero(r, c);
  for (int i = 0; i < r; ++i)
    for (int t = 0; t < k; ++t) {
      if (a[i][t].is_zero()) continue;
      for (int j = 0; j < c; ++j) out[i][j] += a[i][t] * b[t][j];
    }
  return out;
}

VecQ mat_vec(const MatQ& a, const VecQ& v) {
  if (mat_cols(a) != static_cast<int>(v.size()))
    throw std::invalid_argument("mat_vec: shape mismatch");
  VecQ out(mat_rows(a), Rat(0));
  for (int i = 0; i < mat_rows(a); ++i)
    for (int j = 0; j < mat_cols(a); ++j) out[i] += a[i][j] * v[j];
  return out;
}

MatQ mat_transpose(const MatQ& a) {
  MatQ out = mat_zero(mat_cols(a), mat_rows(a));
  for (int i = 0; i < mat_rows(a); ++i)
    for (int j = 0; j < mat_cols(a); ++j) out[j][i] = a[i][j];
  return out;
}

MatQ mat_add(const MatQ& a, const MatQ& b) {
  if (mat_rows(a) != mat_rows(b) || mat_cols(a) != mat_cols(b))
    throw std::invalid_argument("mat_add: shape mismatch");
  MatQ out = a;
  for (int i = 0; i < mat_rows(a); ++i)
    for (int j = 0; j < mat_cols(a); ++j) out[i][j] += b[i][j];
  return out;
}

MatQ mat_scaled(const MatQ& a, const Rat& c) {
  MatQ out = a;
  for (auto& row : out)
    for (auto& x : row) x *= c;
  return out;
}

bool mat_is_symmetric(const MatQ& a) {
  if (mat_rows(a) != mat_cols(a)) return false;
  for (int i = 0; i < mat_rows(a); ++i)
    for (int j = i + 1; j < mat_cols(a); ++j)
      if (a[i][j] != a[j][i]) return false;
  return true;
}

bool mat_is_zero(const MatQ& a) {
  for (const auto& row : a)
    for (const auto& x : row)
      if (!x.is_zero()) return false;
  return true;
}

Rat mat_det(MatQ a) {
  int n = mat_rows(a);
  if (n != mat_cols(a)) throw std::invalid_argument("mat_det: not square");
  Rat det(1);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (!a[i][k].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != k) {
      std::swap(a[piv], a[k]);
      det = -det;
    }
    det *= a[k][k];
    Rat inv = a[k][k].inverse();
    for (int i = k + 1; i < n; ++i) {
      if (a[i][k].is_zero()) continue;
      Rat f = a[i][k] * inv;
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return det;
}

int mat_rank(MatQ a) {
  int rows = mat_rows(a), cols = mat_cols(a);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (!a[i][col].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    Rat inv = a[rank][col].inverse();
    for (int i = rank + 1; i < rows; ++i) {
      if (a[i][col].is_zero()) continue;
      Rat f = a[i][col] * inv;
      for (int j = col; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

int mat_rank_ff(const MatQ& a) {
  int rows = mat_rows(a), cols = mat_cols(a);
  if (rows == 0 || cols == 0) return 0;
  // Clear denominators row by row, then run Bareiss elimination over Z.
  std::vector<std::vector<Int>> m(rows, std::vector<Int>(cols));
  for (int i = 0; i < rows; ++i) {
    Int l(1);
    for (int j = 0; j < cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a[i][j].den().get_mpz_t());
    for (int j = 0; j < cols; ++j) m[i][j] = a[i][j].num() * (l / a[i][j].den());
  }
  Int prev(1);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (sgn(m[i][col]) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    for (int i = rank + 1; i < rows; ++i) {
      for (int j = col + 1; j < cols; ++j) {
        Int t = m[rank][col] * m[i][j] - m[i][col] * m[rank][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][col] = 0;
    }
    prev = m[rank][col];
    ++rank;
  }
  return rank;
}

MatQ rref(MatQ a, std::vector<int>* pivots) {
  int rows = mat_rows(a), cols = mat_cols(a);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (!a[i][col].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    Rat inv = a[rank][col].inverse();
    for (int j = col; j < cols; ++j) a[rank][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == rank || a[i][col].is_zero()) continue;
      Rat f = a[i][col];
      for (int j = col; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    if (pivots) pivots->push_back(col);
    ++rank;
  }
  return a;
}

MatQ mat_inverse(const MatQ& a) {
  int n = mat_rows(a);
  if (n != mat_cols(a)) throw std::invalid_argument("mat_inverse: not square");
  MatQ aug = mat_zero(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = Rat(1);
  }
  std::vector<int> pivots;
  aug = rref(std::move(aug), &pivots);
  if (static_cast<int>(pivots.size()) != n || pivots.back() >= n)
    throw std::domain_error("mat_inverse: singular matrix");
  MatQ inv = mat_zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

VecQ make_primitive(VecQ v) {
  Int l(1);
  for (const Rat& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.den().get_mpz_t());
  Int g(0);
  for (const Rat& x : v) {
    Int t = x.num() * (l / x.den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.get_mpz_t());
  }
  if (sgn(g) == 0) return v;  // zero vector
  int lead_sign = 0;
  for (const Rat& x : v)
    if (!x.is_zero()) {
      lead_sign = x.sign();
      break;
    }
  Rat scale = Rat(lead_sign < 0 ? -l : l, g);
  for (Rat& x : v) x *= scale;
  return v;
}

std::vector<VecQ> kernel_basis(const MatQ& a) {
  int cols = mat_cols(a);
  std::vector<int> pivots;
  MatQ r = rref(a, &pivots);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<VecQ> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    VecQ v(cols, Rat(0));
    v[f] = Rat(1);
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r[i][f];
    basis.push_back(make_primitive(std::move(v)));
  }
  return basis;
}

std::optional<VecQ> solve_linear(const MatQ& a, const VecQ& b) {
  int rows = mat_rows(a), cols = mat_cols(a);
  if (static_cast<int>(b.size()) != rows) throw std::invalid_argument("solve_linear: shape mismatch");
  MatQ aug = mat_zero(rows, cols + 1);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) aug[i][j] = a[i][j];
    aug[i][cols] = b[i];
  }
  std::vector<int> pivots;
  aug = rref(std::move(aug), &pivots);
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;  // inconsistent
  VecQ x(cols, Rat(0));
  for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug[i][cols];
  return x;
}

}  // namespace cubicwa

#include "cubicwa/cubic_form.hpp"

#include <algorithm>
#include <stdexcept>

namespace cubicwa {

LinearChange::LinearChange(MatQ b) : b_(std::move(b)) {
  if (mat_rows(b_) != mat_cols(b_)) throw std::invalid_argument("LinearChange: not square");
  if (mat_det(b_).is_zero()) throw std::invalid_argument("LinearChange: singular matrix");
}

LinearChange LinearChange::identity(int n) { return LinearChange(mat_identity(n)); }

LinearChange LinearChange::permutation(const std::vector<int>& perm) {
  int n = static_cast<int>(perm.size());
  MatQ b = mat_zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n) throw std::invalid_argument("LinearChange: bad permutation");
    b[perm[i]][i] = Rat(1);
  }
  return LinearChange(std::move(b));
}

LinearChange LinearChange::then(const LinearChange& second) const {
  return LinearChange(mat_mul(b_, second.b_));
}

CubicForm CubicForm::from_poly(const Poly& p) {
  if (!p.is_zero() && !p.is_homogeneous(3))
    throw std::invalid_argument("CubicForm: polynomial is not homogeneous of degree 3");
  CubicForm c(p.nvars());
  for (const auto& [e, coeff] : p.terms()) {
    std::array<int, 3> idx{};
    int pos = 0;
    for (int i = 0; i < p.nvars(); ++i)
      for (int k = 0; k < e[i]; ++k) {
        if (pos >= 3) throw std::invalid_argument("CubicForm: degree over 3");
        idx[pos++] = i;
      }
    if (pos != 3) throw std::invalid_argument("CubicForm: degree under 3");
    c.coeffs_.emplace(idx, coeff);
  }
  return c;
}

Poly CubicForm::to_poly() const {
  Poly p(n_);
  for (const auto& [idx, c] : coeffs_) {
    Exps e(n_, 0);
    e[idx[0]] += 1;
    e[idx[1]] += 1;
    e[idx[2]] += 1;
    p.add_term(e, c);
  }
  return p;
}

Rat CubicForm::coeff(int i, int j, int k) const {
  std::array<int, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? Rat(0) : it->second;
}

void CubicForm::add_coeff(int i, int j, int k, const Rat& c) {
  if (c.is_zero()) return;
  std::array<int, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  if (idx[0] < 0 || idx[2] >= n_) throw std::invalid_argument("CubicForm: index out of range");
  auto [it, inserted] = coeffs_.emplace(idx, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

Rat CubicForm::eval(std::span<const Rat> x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("CubicForm::eval: dimension mismatch");
  Rat acc(0);
  for (const auto& [idx, c] : coeffs_) acc += c * x[idx[0]] * x[idx[1]] * x[idx[2]];
  return acc;
}

std::vector<Poly> CubicForm::gradient() const {
  Poly p = to_poly();
  std::vector<Poly> g;
  g.reserve(n_);
  for (int i = 0; i < n_; ++i) g.push_back(p.derivative(i));
  return g;
}

CubicForm CubicForm::substitute(const LinearChange& t) const {
  if (t.n() != n_) throw std::invalid_argument("CubicForm::substitute: dimension mismatch");
  // x_i -> (B x)_i
  std::vector<Poly> images;
  images.reserve(n_);
  const MatQ& b = t.matrix();
  for (int i = 0; i < n_; ++i) {
    Poly row(n_);
    for (int j = 0; j < n_; ++j) {
      Exps e(n_, 0);
      e[j] = 1;
      row.add_term(e, b[i][j]);
    }
    images.push_back(std::move(row));
  }
  return from_poly(to_poly().compose(images));
}

std::optional<VecQ> cone_vertex(const CubicForm& c) {
  int n = c.n();
  if (n == 0) return std::nullopt;
  // Column i holds the quadratic form dC/dx_i; a vertex is a kernel vector of
  // the linear map v -> sum_i v_i dC/dx_i.
  std::vector<Poly> grad = c.gradient();
  std::map<Exps, int, GrlexOrder> row_of;
  for (const Poly& g : grad)
    for (const auto& [e, coeff] : g.terms())
      row_of.emplace(e, 0);
  int r = 0;
  for (auto& [e, idx] : row_of) idx = r++;
  MatQ m = mat_zero(r, n);
  for (int i = 0; i < n; ++i)
    for (const auto& [e, coeff] : grad[i].terms()) m[row_of[e]][i] = coeff;
  std::vector<VecQ> ker = kernel_basis(m);
  if (ker.empty()) return std::nullopt;

  // Certify: C(x + lambda v) - C(x) must vanish identically in (x, lambda).
  const VecQ& v = ker.front();
  Poly p = c.to_poly();
  std::vector<Poly> images;
  for (int i = 0; i < n; ++i) {
    Poly im(n + 1);
    Exps e(n + 1, 0);
    e[i] = 1;
    im.add_term(e, Rat(1));
    Exps el(n + 1, 0);
    el[n] = 1;
    im.add_term(el, v[i]);
    images.push_back(std::move(im));
  }
  Poly shifted = p.compose(images);
  Poly base = p.embedded(n + 1);
  if (!(shifted - base).is_zero())
    throw std::logic_error("cone_vertex: kernel vector failed the translation identity");
  return v;
}

std::optional<int> forced_singular_point(const CubicForm& c) {
  for (int j = 0; j < c.n(); ++j) {
    bool at_most_linear = true;
    for (const auto& [idx, coeff] : c.coeffs()) {
      int deg = (idx[0] == j) + (idx[1] == j) + (idx[2] == j);
      if (deg >= 2) {
        at_most_linear = false;
        break;
      }
    }
    if (!at_most_linear) continue;
    // Certify by direct evaluation at e_j.
    VecQ ej(c.n(), Rat(0));
    ej[j] = Rat(1);
    if (!c.eval(ej).is_zero()) throw std::logic_error("forced_singular_point: value check failed");
    for (const Poly& g : c.gradient())
      if (!g.eval(ej).is_zero()) throw std::logic_error("forced_singular_point: gradient check failed");
    return j;
  }
  return std::nullopt;
}

}  // namespace cubicwa

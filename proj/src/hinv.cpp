#include "cubicwa/hinv.hpp"

#include <algorithm>
#include <stdexcept>

namespace cubicwa::hinv {

Poly quadratic_poly(const MatQ& q) {
  int n = mat_rows(q);
  if (!mat_is_symmetric(q)) throw std::invalid_argument("quadratic_poly: matrix not symmetric");
  Poly p(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Rat c = (i == j) ? q[i][j] : q[i][j] + q[j][i];
      if (c.is_zero()) continue;
      Exps e(n, 0);
      e[i] += 1;
      e[j] += 1;
      p.add_term(e, c);
    }
  return p;
}

MatQ quadratic_matrix(const Poly& p) {
  if (!p.is_zero() && !p.is_homogeneous(2))
    throw std::invalid_argument("quadratic_matrix: not a homogeneous quadratic");
  int n = p.nvars();
  MatQ m = mat_zero(n, n);
  for (const auto& [e, c] : p.terms()) {
    int i = -1, j = -1;
    for (int v = 0; v < n; ++v) {
      if (e[v] == 2) i = j = v;
      if (e[v] == 1) (i < 0 ? i : j) = v;
    }
    if (i == j) {
      m[i][i] = c;
    } else {
      m[i][j] = c / Rat(2);
      m[j][i] = m[i][j];
    }
  }
  return m;
}

static Poly linear_poly(const VecQ& l) {
  int n = static_cast<int>(l.size());
  Poly p(n);
  for (int i = 0; i < n; ++i) {
    if (l[i].is_zero()) continue;
    Exps e(n, 0);
    e[i] = 1;
    p.add_term(e, l[i]);
  }
  return p;
}

bool verify_decomposition(const CubicForm& c, const Decomposition& d) {
  if (d.n != c.n()) throw std::invalid_argument("verify_decomposition: dimension mismatch");
  Poly sum(c.n());
  for (const auto& [l, q] : d.pairs) {
    if (static_cast<int>(l.size()) != c.n() || mat_rows(q) != c.n())
      throw std::invalid_argument("verify_decomposition: dimension mismatch in a pair");
    bool l_nonzero = false;
    for (const Rat& x : l) l_nonzero = l_nonzero || !x.is_zero();
    if (!l_nonzero) return false;
    sum += linear_poly(l) * quadratic_poly(q);
  }
  return sum == c.to_poly();
}

// -- subspace search ---------------------------------------------------------

namespace {

// Primitive integer vectors with max |entry| == ring, first nonzero positive,
// in ascending lexicographic order.
std::vector<std::vector<long>> ring_vectors(int n, int ring) {
  std::vector<std::vector<long>> out;
  std::vector<long> v(n, -ring);
  while (true) {
    long maxabs = 0;
    for (long x : v) maxabs = std::max(maxabs, std::abs(x));
    if (maxabs == ring) {
      long lead = 0;
      for (long x : v)
        if (x != 0) {
          lead = x;
          break;
        }
      if (lead > 0) {
        Int g(0);
        for (long x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), Int(x).get_mpz_t());
        if (g == 1) out.push_back(v);
      }
    }
    int i = n - 1;
    while (i >= 0 && v[i] == ring) v[i--] = -ring;
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

struct SearchState {
  const std::vector<VecQ>* vectors = nullptr;
  size_t cap_start = 0;  // first index belonging to the current ring
  int h_try = 0;
  long budget = 0;
  long nodes = 0;
  bool exhausted = false;
  std::vector<int> chosen;
  std::vector<int> found;
};

// Restriction of p (in r variables) to the hyperplane normal to w, via the
// canonical kernel basis of the single row w.
Poly restrict_once(const Poly& p, const VecQ& w, std::vector<VecQ>* ker_cols) {
  MatQ row(1, w);
  std::vector<VecQ> ker = kernel_basis(row);
  int r = static_cast<int>(w.size());
  int r2 = static_cast<int>(ker.size());
  std::vector<Poly> images;
  images.reserve(r);
  for (int i = 0; i < r; ++i) {
    Poly im(r2);
    for (int j = 0; j < r2; ++j) {
      if (ker[j][i].is_zero()) continue;
      Exps e(r2, 0);
      e[j] = 1;
      im.add_term(e, ker[j][i]);
    }
    images.push_back(std::move(im));
  }
  if (ker_cols) *ker_cols = ker;
  return p.compose(images);
}

// Depth-first over ascending indices; kernel_cols maps current coordinates
// back to the original ones so later normal vectors can be projected in.
bool dfs(SearchState& st, const Poly& cur, const MatQ& kernel_cols, size_t next, bool has_cap) {
  if (st.exhausted) return false;
  int depth = static_cast<int>(st.chosen.size());
  if (depth == st.h_try) {
    if (!has_cap) return false;
    if (cur.is_zero()) {
      st.found = st.chosen;
      return true;
    }
    return false;
  }
  int remaining = st.h_try - depth;
  size_t limit = st.vectors->size();
  for (size_t idx = next; idx + remaining <= limit; ++idx) {
    bool cap_here = idx >= st.cap_start;
    if (!has_cap && remaining == 1 && !cap_here) {
      idx = st.cap_start;  // the last pick must come from the current ring
      if (idx + 1 > limit) return false;
      cap_here = true;
    }
    // Project the candidate normal into the current coordinates.
    const VecQ& w_orig = (*st.vectors)[idx];
    int r = mat_cols(kernel_cols);
    VecQ w(r, Rat(0));
    bool nonzero = false;
    for (int j = 0; j < r; ++j) {
      for (size_t i = 0; i < w_orig.size(); ++i) w[j] += w_orig[i] * kernel_cols[i][j];
      nonzero = nonzero || !w[j].is_zero();
    }
    if (!nonzero) continue;  // dependent on the chosen normals
    if (++st.nodes > st.budget) {
      st.exhausted = true;
      return false;
    }
    std::vector<VecQ> ker;
    Poly restricted = restrict_once(cur, w, &ker);
    // Compose the kernel maps: original <- current <- new.
    int r2 = static_cast<int>(ker.size());
    MatQ next_cols = mat_zero(static_cast<int>(w_orig.size()), r2);
    for (size_t i = 0; i < w_orig.size(); ++i)
      for (int j = 0; j < r2; ++j)
        for (int k = 0; k < r; ++k) next_cols[i][j] += kernel_cols[i][k] * ker[j][k];
    st.chosen.push_back(static_cast<int>(idx));
    if (dfs(st, restricted, next_cols, idx + 1, has_cap || cap_here)) return true;
    st.chosen.pop_back();
    if (st.exhausted) return false;
  }
  return false;
}

// C = L * Q + R with R free of x_j; L must have a nonzero j-th coefficient.
std::pair<Poly, Poly> divide_by_linear(const Poly& f, const VecQ& l, int j) {
  Poly lp = linear_poly(l);
  Rat inv = l[j].inverse();
  Poly q(f.nvars()), r = f;
  while (true) {
    int dmax = 0;
    for (const auto& [e, c] : r.terms()) dmax = std::max(dmax, e[j]);
    if (dmax == 0) break;
    std::vector<std::pair<Exps, Rat>> layer;
    for (const auto& [e, c] : r.terms())
      if (e[j] == dmax) layer.emplace_back(e, c);
    for (const auto& [e, c] : layer) {
      Exps qe = e;
      qe[j] -= 1;
      Poly qt(f.nvars());
      qt.add_term(qe, c * inv);
      q += qt;
      r -= qt * lp;
    }
  }
  return {q, r};
}

Decomposition decomposition_from_normals(const CubicForm& c, std::vector<VecQ> normals) {
  Decomposition d;
  d.n = c.n();
  Poly r = c.to_poly();
  for (size_t idx = 0; idx < normals.size(); ++idx) {
    VecQ l = normals[idx];
    int j = -1;
    for (int i = 0; i < d.n; ++i)
      if (!l[i].is_zero()) {
        j = i;
        break;
      }
    if (j < 0) throw std::logic_error("decomposition_from_normals: zero normal");
    auto [q, rem] = divide_by_linear(r, l, j);
    d.pairs.emplace_back(l, quadratic_matrix(q));
    r = rem;
    // Eliminate x_j from the remaining normals.
    for (size_t k = idx + 1; k < normals.size(); ++k) {
      if (normals[k][j].is_zero()) continue;
      Rat f = normals[k][j] / l[j];
      for (int i = 0; i < d.n; ++i) normals[k][i] -= f * l[i];
    }
  }
  if (!r.is_zero()) throw std::logic_error("decomposition_from_normals: nonzero remainder");
  return d;
}

Decomposition tautological_decomposition(const CubicForm& c) {
  int n = c.n();
  std::vector<MatQ> qs(n, mat_zero(n, n));
  std::vector<bool> used(n, false);
  for (const auto& [idx, coeff] : c.coeffs()) {
    int i = idx[0], j = idx[1], k = idx[2];  // i <= j <= k
    used[i] = true;
    if (j == k) {
      qs[i][j][k] += coeff;
    } else {
      qs[i][j][k] += coeff / Rat(2);
      qs[i][k][j] += coeff / Rat(2);
    }
  }
  Decomposition d;
  d.n = n;
  for (int i = 0; i < n; ++i) {
    if (!used[i]) continue;
    VecQ l(n, Rat(0));
    l[i] = Rat(1);
    d.pairs.emplace_back(l, qs[i]);
  }
  return d;
}

}  // namespace

HBoundResult h_upper_bound(const CubicForm& c, int height, const HBoundOptions& opts) {
  if (height < 1) throw std::invalid_argument("h_upper_bound: height must be >= 1");
  int n = c.n();
  HBoundResult res;
  Decomposition taut = tautological_decomposition(c);
  if (c.is_zero()) {
    res.bound = 0;
    res.witness.n = n;
    return res;
  }

  Poly base = c.to_poly();
  std::vector<VecQ> vectors;  // rings 1..cap, (height, lex) order
  int best = taut.h() + 1;    // strictly better than the fallback or nothing
  std::vector<VecQ> best_normals;
  SearchState st;
  st.vectors = &vectors;
  st.budget = opts.node_budget;

  for (int cap = 1; cap <= height && !st.exhausted && best > 1; ++cap) {
    // Materializing the next ring must stay within reason.
    double ring_size = 1.0;
    for (int i = 0; i < n; ++i) ring_size *= 2.0 * cap + 1.0;
    if (ring_size > 8e6) {
      st.exhausted = true;
      break;
    }
    st.cap_start = vectors.size();
    for (auto& v : ring_vectors(n, cap)) {
      VecQ w(n);
      for (int i = 0; i < n; ++i) w[i] = Rat(v[i]);
      vectors.push_back(std::move(w));
    }
    int h_max = std::min(n - 1, best - 1);
    for (int h_try = 1; h_try <= h_max && !st.exhausted; ++h_try) {
      st.h_try = h_try;
      st.chosen.clear();
      st.found.clear();
      if (dfs(st, base, mat_identity(n), 0, false)) {
        best = h_try;
        best_normals.clear();
        for (int idx : st.found) best_normals.push_back(vectors[idx]);
        break;  // smaller h_try only at later caps
      }
    }
  }

  res.nodes = st.nodes;
  res.budget_exhausted = st.exhausted;
  if (best <= taut.h()) {
    res.bound = best;
    res.witness = decomposition_from_normals(c, best_normals);
  } else {
    res.bound = taut.h();
    res.witness = taut;
  }
  if (!verify_decomposition(c, res.witness))
    throw std::logic_error("h_upper_bound: witness failed verification");
  return res;
}

RationalPlane extract_plane(const CubicForm& c, const Decomposition& d) {
  if (!verify_decomposition(c, d))
    throw std::invalid_argument("extract_plane: decomposition does not verify against the form");
  MatQ rows;
  for (const auto& [l, q] : d.pairs) rows.push_back(l);
  RationalPlane plane;
  plane.n = d.n;
  plane.basis = rows.empty() ? kernel_basis(mat_zero(1, d.n)) : kernel_basis(rows);
  for (const VecQ& v : plane.basis)
    if (!c.eval(v).is_zero()) throw std::logic_error("extract_plane: basis vector off the hypersurface");
  return plane;
}

Decomposition transform(const Decomposition& d, const LinearChange& b) {
  if (b.n() != d.n) throw std::invalid_argument("transform: dimension mismatch");
  const MatQ& m = b.matrix();
  MatQ mt = mat_transpose(m);
  Decomposition out;
  out.n = d.n;
  for (const auto& [l, q] : d.pairs) out.pairs.emplace_back(mat_vec(mt, l), mat_mul(mt, mat_mul(q, m)));
  return out;
}

}  // namespace cubicwa::hinv

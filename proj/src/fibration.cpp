#include "cubicwa/fibration.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "cubicwa/hinv.hpp"

namespace cubicwa::fibration {

SplitCubic split(const CubicForm& c, int m) {
  int n = c.n();
  if (m < 1 || n < m + 1) throw std::invalid_argument("split: need 1 <= m and n >= m + 1");
  SplitCubic s;
  s.m = m;
  s.h = n - m;
  s.source = c;
  s.mi.assign(s.h, mat_zero(m, m));
  s.qj.assign(m, Poly(s.h));
  s.cy = Poly(s.h);
  for (const auto& [idx, coeff] : c.coeffs()) {
    int xdeg = (idx[0] < m) + (idx[1] < m) + (idx[2] < m);  // indices sorted ascending
    switch (xdeg) {
      case 3:
        throw std::invalid_argument("split: monomial cubic in the x block; form not in split shape");
      case 2: {
        int a = idx[0], b = idx[1], g = idx[2] - m;
        if (a == b)
          s.mi[g][a][a] += coeff;
        else {
          s.mi[g][a][b] += coeff / Rat(2);
          s.mi[g][b][a] += coeff / Rat(2);
        }
        break;
      }
      case 1: {
        int j = idx[0], u = idx[1] - m, v = idx[2] - m;
        Exps e(s.h, 0);
        e[u] += 1;
        e[v] += 1;
        s.qj[j].add_term(e, coeff / Rat(2));
        break;
      }
      default: {
        Exps e(s.h, 0);
        e[idx[0] - m] += 1;
        e[idx[1] - m] += 1;
        e[idx[2] - m] += 1;
        s.cy.add_term(e, coeff);
      }
    }
  }
  return s;
}

SplitCubic split(const CubicForm& c, int m, const std::vector<int>& x_vars) {
  int n = c.n();
  if (static_cast<int>(x_vars.size()) != m) throw std::invalid_argument("split: x_vars size != m");
  std::vector<bool> taken(n, false);
  for (int v : x_vars) {
    if (v < 0 || v >= n || taken[v]) throw std::invalid_argument("split: bad x-variable designation");
    taken[v] = true;
  }
  // Permutation sending designated variables to the front, the rest after in
  // ascending order; the blocks describe the permuted form.
  std::vector<int> new_to_old(n);
  for (int p = 0; p < m; ++p) new_to_old[p] = x_vars[p];
  int pos = m;
  for (int v = 0; v < n; ++v)
    if (!taken[v]) new_to_old[pos++] = v;
  MatQ b = mat_zero(n, n);
  for (int p = 0; p < n; ++p) b[new_to_old[p]][p] = Rat(1);
  return split(c.substitute(LinearChange(std::move(b))), m);
}

CubicForm reassemble(const SplitCubic& s) {
  int n = s.m + s.h;
  Poly acc(n);
  for (int i = 0; i < s.h; ++i) {
    Poly q = hinv::quadratic_poly(s.mi[i]).embedded(n);
    acc += q * Poly::var(n, s.m + i);
  }
  for (int j = 0; j < s.m; ++j) {
    Poly qy = s.qj[j].embedded(n, s.m);
    acc += qy.scaled(Rat(2)) * Poly::var(n, j);
  }
  acc += s.cy.embedded(n, s.m);
  return CubicForm::from_poly(acc);
}

FiberMatrix fiber_matrix(const SplitCubic& s) {
  FiberMatrix a;
  a.size = s.m + 1;
  a.entries.assign(a.size, std::vector<Poly>(a.size, Poly(s.h)));
  for (int r = 0; r < s.m; ++r)
    for (int c = 0; c < s.m; ++c) {
      Poly e(s.h);
      for (int i = 0; i < s.h; ++i) {
        if (s.mi[i][r][c].is_zero()) continue;
        Exps ex(s.h, 0);
        ex[i] = 1;
        e.add_term(ex, s.mi[i][r][c]);
      }
      a.entries[r][c] = std::move(e);
    }
  for (int j = 0; j < s.m; ++j) {
    a.entries[j][s.m] = s.qj[j];
    a.entries[s.m][j] = s.qj[j];
  }
  a.entries[s.m][s.m] = s.cy;
  return a;
}

MatQ fiber_quadric(const SplitCubic& s, std::span<const Rat> y) {
  if (static_cast<int>(y.size()) != s.h) throw std::invalid_argument("fiber_quadric: length mismatch");
  MatQ a = mat_zero(s.m + 1, s.m + 1);
  for (int i = 0; i < s.h; ++i) {
    if (y[i].is_zero()) continue;
    for (int r = 0; r < s.m; ++r)
      for (int c = 0; c < s.m; ++c) a[r][c] += y[i] * s.mi[i][r][c];
  }
  for (int j = 0; j < s.m; ++j) {
    Rat q = s.qj[j].eval(y);
    a[j][s.m] = q;
    a[s.m][j] = q;
  }
  a[s.m][s.m] = s.cy.eval(y);
  return a;
}

bool fiber_identity_check(const SplitCubic& s) {
  // Ring in (x_1..x_m, y_1..y_h, t); t is the last variable.
  int n = s.m + s.h;
  int big = n + 1;
  Poly qy(big);
  for (int i = 0; i < s.h; ++i)
    qy += hinv::quadratic_poly(s.mi[i]).embedded(big) * Poly::var(big, s.m + i);
  Poly t = Poly::var(big, n);
  for (int j = 0; j < s.m; ++j)
    qy += s.qj[j].embedded(big, s.m).scaled(Rat(2)) * Poly::var(big, j) * t;
  qy += s.cy.embedded(big, s.m) * t * t;

  std::vector<Poly> images;
  for (int i = 0; i < s.m; ++i) images.push_back(Poly::var(big, i));
  for (int i = 0; i < s.h; ++i) images.push_back(Poly::var(big, s.m + i) * t);
  Poly rhs = s.source.to_poly().compose(images);
  return t * qy == rhs;
}

namespace {

Poly det_poly_matrix_local(const std::vector<std::vector<Poly>>& a, int nvars) {
  int n = static_cast<int>(a.size());
  if (n == 0) return Poly::constant(nvars, Rat(1));
  std::vector<Poly> dp(size_t(1) << n, Poly(nvars));
  dp[0] = Poly::constant(nvars, Rat(1));
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int row = __builtin_popcount(mask) - 1;
    Poly acc(nvars);
    int pos = 0;
    for (int j = 0; j < n; ++j) {
      if (!(mask & (1u << j))) continue;
      if (!a[row][j].is_zero() && !dp[mask ^ (1u << j)].is_zero()) {
        Poly term = a[row][j] * dp[mask ^ (1u << j)];
        if (pos % 2 == 0)
          acc += term;
        else
          acc -= term;
      }
      ++pos;
    }
    dp[mask] = std::move(acc);
  }
  return dp[(size_t(1) << n) - 1];
}

Poly submatrix_det(const FiberMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols,
                   int nvars) {
  std::vector<std::vector<Poly>> sub(rows.size(), std::vector<Poly>(cols.size(), Poly(nvars)));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) sub[i][j] = a.entries[rows[i]][cols[j]];
  return det_poly_matrix_local(sub, nvars);
}

// All k-subsets of 0..n-1 in ascending lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  std::function<void(int, int)> rec = [&](int start, int pos) {
    if (pos == k) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v <= n - (k - pos); ++v) {
      cur[pos] = v;
      rec(v + 1, pos + 1);
    }
  };
  rec(0, 0);
  return out;
}

// First integer vector (rings by max-norm, lex inside) satisfying pred.
std::optional<VecQ> grid_first(int dim, int max_ring, const std::function<bool(const VecQ&)>& pred) {
  for (long ring = 1; ring <= max_ring; ++ring) {
    std::vector<long> v(dim, -ring);
    while (true) {
      long maxabs = 0;
      for (long x : v) maxabs = std::max(maxabs, std::labs(x));
      if (maxabs == ring) {
        VecQ y(dim);
        for (int i = 0; i < dim; ++i) y[i] = Rat(v[i]);
        if (pred(y)) return y;
      }
      int i = dim - 1;
      while (i >= 0 && v[i] == ring) v[i--] = -ring;
      if (i < 0) break;
      ++v[i];
    }
  }
  return std::nullopt;
}

}  // namespace

FiberRank generic_fiber_rank(const SplitCubic& s) {
  FiberMatrix a = fiber_matrix(s);
  FiberRank out;
  int size = a.size;
  for (int k = size; k >= 1 && out.rank == 0; --k) {
    auto rows_list = subsets(size, k);
    for (const auto& rows : rows_list) {
      for (const auto& cols : rows_list) {
        if (!submatrix_det(a, rows, cols, s.h).is_zero()) {
          out.rank = k;
          break;
        }
      }
      if (out.rank) break;
    }
  }
  if (out.rank == 0) return out;

  auto rank_at = [&](const VecQ& y) { return mat_rank(fiber_quadric(s, y)) == out.rank; };

  std::optional<VecQ> y0;
  // Scaling path: start from a full-rank point of the leading pencil and
  // double the scale on the full matrix.
  bool any_leading = false;
  for (const MatQ& m : s.mi) any_leading = any_leading || !mat_is_zero(m);
  if (any_leading) {
    pencil::SymmetricPencil lead(s.m, s.mi);
    if (auto w = pencil::find_full_rank_point(lead)) {
      VecQ y = w->y;
      Rat p(1);
      for (int it = 0; it < 64 && !y0; ++it) {
        VecQ scaled(y.size());
        for (size_t i = 0; i < y.size(); ++i) scaled[i] = p * y[i];
        if (rank_at(scaled)) y0 = scaled;
        p *= Rat(2);
      }
    }
  }
  if (!y0) y0 = grid_first(s.h, 1 << 16, rank_at);
  if (!y0) throw std::logic_error("generic_fiber_rank: no witness found");

  // Certify with a concrete nonzero minor of A(y0).
  MatQ ay = fiber_quadric(s, *y0);
  for (const auto& rows : subsets(size, out.rank)) {
    for (const auto& cols : subsets(size, out.rank)) {
      MatQ sub = mat_zero(out.rank, out.rank);
      for (int i = 0; i < out.rank; ++i)
        for (int j = 0; j < out.rank; ++j) sub[i][j] = ay[rows[i]][cols[j]];
      Rat det = mat_det(sub);
      if (!det.is_zero()) {
        out.witness = pencil::RankWitness{*y0, det};
        out.minor_rows = rows;
        out.minor_cols = cols;
        return out;
      }
    }
  }
  throw std::logic_error("generic_fiber_rank: witness lost its minor");
}

namespace {

// Flatten a symmetric m x m matrix to its upper triangle, row by row.
VecQ sym_flatten(const MatQ& m) {
  VecQ v;
  for (int i = 0; i < mat_rows(m); ++i)
    for (int j = i; j < mat_cols(m); ++j) v.push_back(m[i][j]);
  return v;
}

}  // namespace

ReduceResult strong_equivalence_reduce(const SplitCubic& s) {
  if (s.m != 4) throw std::invalid_argument("strong_equivalence_reduce: requires m = 4");
  if (s.h < 11) throw std::invalid_argument("strong_equivalence_reduce: requires h >= 11");

  // Maximal independent subset of the leading quadrics, greedy in index
  // order over the 10-dimensional space of quadratic forms in 4 variables.
  std::vector<int> indep;
  std::vector<int> dependent;
  MatQ basis_rows;  // grows as independent vectors arrive
  for (int i = 0; i < s.h; ++i) {
    VecQ v = sym_flatten(s.mi[i]);
    MatQ trial = basis_rows;
    trial.push_back(v);
    if (mat_rank(trial) > mat_rank(basis_rows)) {
      basis_rows.push_back(v);
      indep.push_back(i);
    } else {
      dependent.push_back(i);
    }
  }
  int t = static_cast<int>(indep.size());

  // Express each dependent quadric over the independent ones.
  MatQ cols = mat_transpose(basis_rows);
  std::vector<VecQ> alpha(s.h);
  for (int i : dependent) {
    auto sol = solve_linear(cols, sym_flatten(s.mi[i]));
    if (!sol) throw std::logic_error("strong_equivalence_reduce: dependency has no solution");
    alpha[i] = *sol;
  }

  // y' = L y: row p carries L_{indep[p]}(y) = y_{indep[p]} + sum alpha, the
  // remaining rows keep the dependent coordinates.
  MatQ lam = mat_zero(s.h, s.h);
  for (int p = 0; p < t; ++p) {
    lam[p][indep[p]] = Rat(1);
    for (int i : dependent) lam[p][i] += alpha[i][p];
  }
  for (size_t q = 0; q < dependent.size(); ++q) lam[t + q][dependent[q]] = Rat(1);
  LinearChange change(lam);

  // C'(x, y') = C(x, Lambda^{-1} y').
  int n = s.m + s.h;
  MatQ block = mat_identity(n);
  MatQ lam_inv = change.inverse().matrix();
  for (int i = 0; i < s.h; ++i)
    for (int j = 0; j < s.h; ++j) block[s.m + i][s.m + j] = lam_inv[i][j];
  CubicForm reduced_form = s.source.substitute(LinearChange(block));
  SplitCubic reduced = split(reduced_form, s.m);

  for (int i = t; i < reduced.h; ++i)
    if (!mat_is_zero(reduced.mi[i]))
      throw std::logic_error("strong_equivalence_reduce: tail matrix failed to vanish");
  // C'(x, L y) must reproduce the input form exactly.
  MatQ back = mat_identity(n);
  for (int i = 0; i < s.h; ++i)
    for (int j = 0; j < s.h; ++j) back[s.m + i][s.m + j] = lam[i][j];
  if (!(reduced_form.substitute(LinearChange(back)) == s.source))
    throw std::logic_error("strong_equivalence_reduce: identity check failed");

  return ReduceResult{std::move(reduced), std::move(change), t};
}

namespace {

// det A along the scaling ray, as a univariate polynomial in P.
Poly det_along_ray(const SplitCubic& s, const std::vector<Poly>& y_of_p) {
  std::vector<std::vector<Poly>> entries(s.m + 1, std::vector<Poly>(s.m + 1, Poly(1)));
  for (int r = 0; r < s.m; ++r)
    for (int c = 0; c < s.m; ++c) {
      Poly e(1);
      for (int i = 0; i < s.h; ++i)
        if (!s.mi[i][r][c].is_zero()) e += y_of_p[i].scaled(s.mi[i][r][c]);
      entries[r][c] = std::move(e);
    }
  for (int j = 0; j < s.m; ++j) {
    Poly q = s.qj[j].compose(y_of_p);
    entries[j][s.m] = q;
    entries[s.m][j] = std::move(q);
  }
  entries[s.m][s.m] = s.cy.compose(y_of_p);
  return det_poly_matrix_local(entries, 1);
}

CaseWitness fallback_grid(const SplitCubic& s, CaseWitness cw) {
  FiberMatrix a = fiber_matrix(s);
  std::vector<int> all(a.size);
  for (int i = 0; i < a.size; ++i) all[i] = i;
  if (submatrix_det(a, all, all, s.h).is_zero()) {
    cw.outcome = CaseOutcome::det_identically_zero;
    return cw;
  }
  auto y = grid_first(s.h, 1 << 16, [&](const VecQ& v) {
    return !mat_det(fiber_quadric(s, v)).is_zero();
  });
  if (!y) throw std::logic_error("case_witness: fallback grid failed on a nonzero determinant");
  cw.outcome = CaseOutcome::found;
  cw.used_grid_fallback = true;
  cw.y = *y;
  cw.det_value = mat_det(fiber_quadric(s, *y));
  return cw;
}

}  // namespace

CaseWitness case_witness(const SplitCubic& s) {
  if (s.m != 4) throw std::invalid_argument("case_witness: requires m = 4");
  if (s.h < 11) throw std::invalid_argument("case_witness: requires h >= 11");
  int t = 0;
  while (t < s.h && !mat_is_zero(s.mi[t])) ++t;
  for (int i = t; i < s.h; ++i)
    if (!mat_is_zero(s.mi[i]))
      throw std::invalid_argument("case_witness: zero matrices must form the tail of the list");
  int theta = s.h - t;
  if (theta < 1) throw std::invalid_argument("case_witness: needs at least one vanished matrix");

  // Restrictions to the zero-block coordinates (the C* pieces).
  std::vector<std::pair<int, Rat>> kill_head;
  for (int i = 0; i < t; ++i) kill_head.emplace_back(i, Rat(0));
  std::vector<Poly> qstar(s.m, Poly(s.h));
  for (int j = 0; j < s.m; ++j) qstar[j] = s.qj[j].substitute_vars(kill_head);
  Poly cstar = s.cy.substitute_vars(kill_head);

  CaseWitness cw;
  bool all_qstar_zero = true;
  for (const Poly& q : qstar) all_qstar_zero = all_qstar_zero && q.is_zero();

  if (all_qstar_zero) {
    cw.case_id = 1;
    if (cstar.is_zero()) {
      // C vanishes on the whole coordinate block: a linear space lies on the
      // hypersurface, contradicting h >= 11.
      cw.outcome = CaseOutcome::linear_space_contradiction;
      return cw;
    }
    // b over the zero-block coordinates with c*(b) != 0 (height order).
    auto b_head = grid_first(theta, 1 << 16, [&](const VecQ& v) {
      VecQ full(s.h, Rat(0));
      for (int i = 0; i < theta; ++i) full[t + i] = v[i];
      return !cstar.eval(full).is_zero();
    });
    if (!b_head) throw std::logic_error("case_witness: no point off the zero set of c*");
    // Generic vector for the nonzero block.
    std::vector<MatQ> head(s.mi.begin(), s.mi.begin() + t);
    auto w = pencil::find_full_rank_point(pencil::SymmetricPencil(s.m, head));
    if (!w) return fallback_grid(s, std::move(cw));

    VecQ full_b(s.h, Rat(0));
    for (int i = 0; i < t; ++i) full_b[i] = w->y[i];
    VecQ head_vals(theta);
    for (int i = 0; i < theta; ++i) head_vals[i] = (*b_head)[i];
    std::vector<Poly> ray(s.h, Poly(1));
    for (int i = 0; i < t; ++i) ray[i] = Poly::constant(1, full_b[i]);
    for (int i = 0; i < theta; ++i) ray[t + i] = Poly::var(1, 0, 1, head_vals[i]);
    Poly pp = det_along_ray(s, ray);

    VecQ cstar_at(s.h, Rat(0));
    for (int i = 0; i < theta; ++i) cstar_at[t + i] = head_vals[i];
    cw.det_along_ray = pp;
    cw.predicted_degree = 3;
    cw.case1_cstar_value = cstar.eval(cstar_at);
    cw.block_det = w->det_value;
    cw.predicted_leading = cw.case1_cstar_value * cw.block_det;
    cw.b_head = head_vals;
    cw.b_tail = VecQ(w->y.begin(), w->y.end());

    Rat p(1);
    for (int guard = 0;; ++guard) {
      VecQ probe = std::vector<Rat>{p};
      Rat val = pp.eval(probe);
      if (!val.is_zero()) {
        VecQ y(s.h);
        for (int i = 0; i < t; ++i) y[i] = full_b[i];
        for (int i = 0; i < theta; ++i) y[t + i] = p * head_vals[i];
        cw.y = y;
        cw.det_value = mat_det(fiber_quadric(s, y));
        if (cw.det_value != val) throw std::logic_error("case_witness: ray value mismatch");
        cw.outcome = CaseOutcome::found;
        return cw;
      }
      p *= Rat(2);
      if (guard > 200) throw std::logic_error("case_witness: doubling did not terminate");
    }
  }

  // Case 2.
  cw.case_id = 2;
  int istar = -1;
  for (int j = 0; j < s.m; ++j)
    if (!qstar[j].is_zero()) {
      istar = j;
      break;
    }

  // Choose the scaled coordinate zeta among the zero-block variables so that
  // q*_{istar} has a zeta^2 term; one shear creates one when the diagonal of
  // the form is entirely zero.
  MatQ g = mat_zero(theta, theta);
  for (const auto& [e, c] : qstar[istar].terms()) {
    int u = -1, v = -1;
    for (int i = 0; i < s.h; ++i) {
      if (e[i] == 2) u = v = i;
      if (e[i] == 1) (u < 0 ? u : v) = i;
    }
    if (u == v)
      g[u - t][u - t] = c;
    else {
      g[u - t][v - t] = c / Rat(2);
      g[v - t][u - t] = g[u - t][v - t];
    }
  }
  int zeta_local = -1;
  MatQ ty = mat_identity(s.h);
  for (int i = 0; i < theta; ++i)
    if (!g[i][i].is_zero()) {
      zeta_local = i;
      break;
    }
  if (zeta_local < 0) {
    int oi = -1, oj = -1;
    for (int i = 0; i < theta && oi < 0; ++i)
      for (int j = i + 1; j < theta; ++j)
        if (!g[i][j].is_zero()) {
          oi = i;
          oj = j;
          break;
        }
    // q*_{istar} is nonzero, so some off-diagonal entry exists here.
    ty[t + oj][t + oi] = Rat(1);  // y_{oi} -> y_{oi} + y_{oj} under y = T y'
    zeta_local = oi;
  }
  int zeta = t + zeta_local;

  int n = s.m + s.h;
  MatQ step1 = mat_identity(n);
  for (int i = 0; i < s.h; ++i)
    for (int j = 0; j < s.h; ++j) step1[s.m + i][s.m + j] = ty[i][j];
  CubicForm c1 = s.source.substitute(LinearChange(step1));
  SplitCubic s1 = split(c1, s.m);

  // x change: x'_{istar} = L(x) with L the zeta^2 border coefficient vector.
  std::vector<std::pair<int, Rat>> kill_head1 = kill_head;
  VecQ lvec(s.m, Rat(0));
  {
    Exps zz(s.h, 0);
    zz[zeta] = 2;
    for (int j = 0; j < s.m; ++j) lvec[j] = s1.qj[j].coeff(zz);
  }
  if (lvec[istar].is_zero()) throw std::logic_error("case_witness: shear failed to create zeta^2");
  MatQ sx = mat_identity(s.m);
  sx[istar] = lvec;
  MatQ step2 = mat_identity(n);
  MatQ sx_inv = mat_inverse(sx);
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.m; ++j) step2[i][j] = sx_inv[i][j];
  CubicForm c2 = c1.substitute(LinearChange(step2));
  SplitCubic s2 = split(c2, s.m);

  // Both changes must keep the zero tail intact.
  for (int i = t; i < s.h; ++i)
    if (!mat_is_zero(s2.mi[i])) throw std::logic_error("case_witness: changes disturbed the zero tail");
  Rat a_coeff;
  {
    Exps zz(s.h, 0);
    zz[zeta] = 2;
    for (int j = 0; j < s.m; ++j) {
      Rat c = s2.qj[j].substitute_vars(kill_head1).coeff(zz);
      if (j == istar) {
        a_coeff = c;
        if (c.is_zero()) throw std::logic_error("case_witness: zeta^2 vanished from q*_{istar}");
      } else if (!c.is_zero()) {
        throw std::logic_error("case_witness: zeta^2 present outside q*_{istar}");
      }
    }
  }

  // 3x3 deletions of the nonzero-block matrices, dropping row/col istar.
  std::vector<MatQ> primes;
  for (int i = 0; i < t; ++i) {
    MatQ d = mat_zero(s.m - 1, s.m - 1);
    int rr = 0;
    for (int r = 0; r < s.m; ++r) {
      if (r == istar) continue;
      int cc = 0;
      for (int c = 0; c < s.m; ++c) {
        if (c == istar) continue;
        d[rr][cc++] = s2.mi[i][r][c];
      }
      ++rr;
    }
    primes.push_back(std::move(d));
  }
  auto w = pencil::find_full_rank_point(pencil::SymmetricPencil(s.m - 1, primes));
  if (!w) return fallback_grid(s, std::move(cw));

  std::vector<Poly> ray(s.h, Poly(1));
  for (int i = 0; i < t; ++i) ray[i] = Poly::constant(1, w->y[i]);
  for (int i = t; i < s.h; ++i) ray[i] = Poly(1);
  ray[zeta] = Poly::var(1, 0);
  Poly pp = det_along_ray(s2, ray);

  cw.det_along_ray = pp;
  cw.predicted_degree = 4;
  cw.a_coeff = a_coeff;
  cw.block_det = w->det_value;
  cw.predicted_leading = -a_coeff * a_coeff * cw.block_det;
  cw.b_tail = w->y;
  cw.b_head = VecQ(theta, Rat(0));

  Rat p(1);
  for (int guard = 0;; ++guard) {
    VecQ probe = std::vector<Rat>{p};
    Rat val = pp.eval(probe);
    if (!val.is_zero()) {
      VecQ y2(s.h, Rat(0));
      for (int i = 0; i < t; ++i) y2[i] = w->y[i];
      y2[zeta] = p;
      // Map the witness back through the y shear: y_input = T y2.
      VecQ y_in = mat_vec(ty, y2);
      cw.y = y_in;
      cw.det_value = mat_det(fiber_quadric(s, y_in));
      if (cw.det_value.is_zero()) throw std::logic_error("case_witness: witness lost under pullback");
      cw.outcome = CaseOutcome::found;
      return cw;
    }
    p *= Rat(2);
    if (guard > 200) throw std::logic_error("case_witness: doubling did not terminate");
  }
}

}  // namespace cubicwa::fibration

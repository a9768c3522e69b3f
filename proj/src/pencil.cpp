#include "cubicwa/pencil.hpp"

#include <functional>
#include <future>
#include <stdexcept>

namespace cubicwa::pencil {

SymmetricPencil::SymmetricPencil(int rho_, std::vector<MatQ> mats_) : rho(rho_), mats(std::move(mats_)) {
  if (rho < 0) throw std::invalid_argument("SymmetricPencil: negative size");
  for (const MatQ& m : mats) {
    if (mat_rows(m) != rho || mat_cols(m) != rho)
      throw std::invalid_argument("SymmetricPencil: matrix size mismatch");
    if (!mat_is_symmetric(m)) throw std::invalid_argument("SymmetricPencil: matrix not symmetric");
  }
}

CongruenceCertificate diagonalize_congruent(const MatQ& m) {
  if (!mat_is_symmetric(m)) throw std::invalid_argument("diagonalize_congruent: matrix not symmetric");
  int n = mat_rows(m);
  MatQ a = m;
  MatQ b = mat_identity(n);

  // x_src -> x_src + x_other on rows, columns and the accumulated change.
  auto add_into = [&](int src, int other, const Rat& f) {
    for (int t = 0; t < n; ++t) a[t][src] += f * a[t][other];
    for (int t = 0; t < n; ++t) a[src][t] += f * a[other][t];
    for (int t = 0; t < n; ++t) b[t][src] += f * b[t][other];
  };
  auto swap_idx = [&](int i, int j) {
    for (int t = 0; t < n; ++t) std::swap(a[t][i], a[t][j]);
    for (int t = 0; t < n; ++t) std::swap(a[i][t], a[j][t]);
    for (int t = 0; t < n; ++t) std::swap(b[t][i], b[t][j]);
  };

  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (!a[i][i].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) {
      int oi = -1, oj = -1;
      for (int i = k; i < n && oi < 0; ++i)
        for (int j = i + 1; j < n; ++j)
          if (!a[i][j].is_zero()) {
            oi = i;
            oj = j;
            break;
          }
      if (oi < 0) break;  // active block is zero
      add_into(oi, oj, Rat(1));
      piv = oi;
    }
    if (piv != k) swap_idx(piv, k);
    Rat inv = a[k][k].inverse();
    for (int i = k + 1; i < n; ++i) {
      if (a[i][k].is_zero()) continue;
      add_into(i, k, -a[i][k] * inv);
    }
  }
  return CongruenceCertificate{std::move(b), std::move(a)};
}

namespace {

// Determinant of a square matrix of polynomials by subset dynamic
// programming: one Laplace expansion row at a time.
Poly det_poly_matrix(const std::vector<std::vector<Poly>>& a, int nvars) {
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

}  // namespace

Poly pencil_det(const SymmetricPencil& p) {
  if (p.rho > kPencilDetSizeBound)
    throw std::invalid_argument("pencil_det: size over bound");
  int mu = p.mu();
  std::vector<std::vector<Poly>> entries(p.rho, std::vector<Poly>(p.rho, Poly(mu)));
  for (int i = 0; i < p.rho; ++i)
    for (int j = 0; j < p.rho; ++j) {
      Poly e(mu);
      for (int k = 0; k < mu; ++k) {
        if (p.mats[k][i][j].is_zero()) continue;
        Exps ex(mu, 0);
        ex[k] = 1;
        e.add_term(ex, p.mats[k][i][j]);
      }
      entries[i][j] = std::move(e);
    }
  return det_poly_matrix(entries, mu);
}

MatQ pencil_eval(const SymmetricPencil& p, std::span<const Rat> y) {
  if (static_cast<int>(y.size()) != p.mu())
    throw std::invalid_argument("pencil_eval: length mismatch");
  MatQ m = mat_zero(p.rho, p.rho);
  for (int k = 0; k < p.mu(); ++k) {
    if (y[k].is_zero()) continue;
    for (int i = 0; i < p.rho; ++i)
      for (int j = 0; j < p.rho; ++j) m[i][j] += y[k] * p.mats[k][i][j];
  }
  return m;
}

namespace {

// The recursive construction from the full-rank lemma. Returns a base vector
// b (one entry per matrix) such that scaling the chosen coordinate by a large
// P makes the determinant nonzero, or nullopt when the recursion gets stuck.
std::optional<std::pair<int, VecQ>> recursive_base(int rho, const std::vector<MatQ>& mats) {
  int mu = static_cast<int>(mats.size());
  if (rho == 0) return std::make_pair(-1, VecQ(mu, Rat(0)));
  int j = -1;
  for (int k = 0; k < mu; ++k)
    if (!mat_is_zero(mats[k])) {
      j = k;
      break;
    }
  if (j < 0) return std::nullopt;

  CongruenceCertificate cert = diagonalize_congruent(mats[j]);
  std::vector<int> complement;
  for (int i = 0; i < rho; ++i)
    if (cert.d[i][i].is_zero()) complement.push_back(i);

  VecQ b(mu, Rat(0));
  if (!complement.empty()) {
    // Complementary sub-pencil of the transformed remaining matrices.
    std::vector<MatQ> sub;
    MatQ bt = mat_transpose(cert.b);
    for (int k = 0; k < mu; ++k) {
      if (k == j) continue;
      MatQ t = mat_mul(bt, mat_mul(mats[k], cert.b));
      MatQ s = mat_zero(static_cast<int>(complement.size()), static_cast<int>(complement.size()));
      for (size_t r = 0; r < complement.size(); ++r)
        for (size_t c = 0; c < complement.size(); ++c) s[r][c] = t[complement[r]][complement[c]];
      sub.push_back(std::move(s));
    }
    auto inner = recursive_base(static_cast<int>(complement.size()), sub);
    if (!inner) return std::nullopt;
    // The inner pencil also needs its scaled coordinate; resolve it by
    // running the doubling there first.
    SymmetricPencil sp(static_cast<int>(complement.size()), sub);
    VecQ inner_y = inner->second;
    if (inner->first >= 0) {
      Rat p_val(1);
      for (int guard = 0;; ++guard) {
        inner_y[inner->first] = p_val;
        if (!mat_det(pencil_eval(sp, inner_y)).is_zero()) break;
        p_val *= Rat(2);
        if (guard > 200) throw std::logic_error("recursive_base: doubling did not terminate");
      }
    } else if (mat_det(pencil_eval(sp, inner_y)).is_zero()) {
      return std::nullopt;
    }
    int pos = 0;
    for (int k = 0; k < mu; ++k) {
      if (k == j) continue;
      b[k] = inner_y[pos++];
    }
  }
  return std::make_pair(j, b);
}

}  // namespace

std::optional<RankWitness> find_full_rank_point(const SymmetricPencil& p) {
  if (p.rho == 0) return RankWitness{VecQ(p.mu(), Rat(0)), Rat(1)};
  auto base = recursive_base(p.rho, p.mats);
  if (base) {
    auto [j, b] = *base;
    VecQ y = b;
    Rat p_val(1);
    for (int guard = 0;; ++guard) {
      y[j] = p_val;
      Rat det = mat_det(pencil_eval(p, y));
      if (!det.is_zero()) return RankWitness{y, det};
      p_val *= Rat(2);
      if (guard > 200) throw std::logic_error("find_full_rank_point: doubling did not terminate");
    }
  }
  // The recursion got stuck: decide by the symbolic determinant, then fall
  // back to a grid search that must succeed when it is nonzero.
  if (p.rho <= kPencilDetSizeBound) {
    if (pencil_det(p).is_zero()) return std::nullopt;
    for (int height = 1;; height *= 2) {
      auto hit = find_full_rank_point_grid(p, height);
      if (hit) return hit;
      if (height > (1 << 20))
        throw std::logic_error("find_full_rank_point: grid fallback did not terminate");
    }
  }
  for (int height = 1; height <= 64; height *= 2) {
    auto hit = find_full_rank_point_grid(p, height);
    if (hit) return hit;
  }
  throw std::runtime_error(
      "find_full_rank_point: cannot certify a zero pencil determinant at this size");
}

namespace {

// Vectors of max norm exactly `ring` in ascending lex order, mapped through fn
// until it returns true; returns the hit.
bool scan_ring(int mu, long ring, long lead_lo, long lead_hi,
               const std::function<bool(const std::vector<long>&)>& fn) {
  std::vector<long> v(mu);
  std::function<bool(int, bool)> rec = [&](int pos, bool has_ring) -> bool {
    if (pos == mu) return has_ring && fn(v);
    long lo = pos == 0 ? lead_lo : -ring;
    long hi = pos == 0 ? lead_hi : ring;
    for (long x = lo; x <= hi; ++x) {
      v[pos] = x;
      if (rec(pos + 1, has_ring || std::abs(x) == ring)) return true;
    }
    return false;
  };
  return rec(0, false);
}

}  // namespace

std::optional<RankWitness> find_full_rank_point_grid(const SymmetricPencil& p, int max_height,
                                                     int threads) {
  int mu = p.mu();
  if (mu == 0 || p.rho == 0) {
    if (p.rho == 0) return RankWitness{VecQ(mu, Rat(0)), Rat(1)};
    return std::nullopt;
  }
  auto test = [&](const std::vector<long>& v, RankWitness* out) {
    VecQ y(mu);
    for (int i = 0; i < mu; ++i) y[i] = Rat(v[i]);
    Rat det = mat_det(pencil_eval(p, y));
    if (det.is_zero()) return false;
    *out = RankWitness{std::move(y), std::move(det)};
    return true;
  };
  for (long ring = 1; ring <= max_height; ++ring) {
    if (threads <= 1) {
      RankWitness w;
      if (scan_ring(mu, ring, -ring, ring, [&](const std::vector<long>& v) { return test(v, &w); }))
        return w;
      continue;
    }
    // Shard the leading coordinate; the earliest shard with a hit wins, so
    // the result matches the serial scan.
    long span = 2 * ring + 1;
    int nsh = std::min<long>(threads, span);
    std::vector<std::future<std::optional<RankWitness>>> futs;
    for (int s = 0; s < nsh; ++s) {
      long lo = -ring + span * s / nsh;
      long hi = -ring + span * (s + 1) / nsh - 1;
      futs.push_back(std::async(std::launch::async, [&, lo, hi]() -> std::optional<RankWitness> {
        RankWitness w;
        if (scan_ring(mu, ring, lo, hi, [&](const std::vector<long>& v) { return test(v, &w); }))
          return w;
        return std::nullopt;
      }));
    }
    for (auto& f : futs) {
      auto r = f.get();
      if (r) {
        // Earlier shards cover lexicographically earlier leading values, so
        // the first nonempty result is the global first.
        for (auto& rest : futs)
          if (rest.valid()) rest.wait();
        return r;
      }
    }
  }
  return std::nullopt;
}

std::vector<bool> check_diagonal_hypothesis(const SymmetricPencil& p) {
  std::vector<bool> out(p.rho, false);
  for (int i = 0; i < p.rho; ++i)
    for (const MatQ& m : p.mats)
      if (!m[i][i].is_zero()) {
        out[i] = true;
        break;
      }
  return out;
}

}  // namespace cubicwa::pencil

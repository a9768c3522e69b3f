#include "cubicwa/localsolve.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <stdexcept>

#include "cubicwa/pencil.hpp"

namespace cubicwa::localsolve {

bool is_prime(const Int& n) {
  if (n < 2) return false;
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L, 43L, 47L}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  // Miller-Rabin, deterministic far beyond desk scale with this base set.
  Int d = n - 1;
  long s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (long base : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
    Int a(base), x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (long r = 1; r < s; ++r) {
      mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Place Place::make_prime(const Int& p) {
  if (!is_prime(p)) throw std::invalid_argument("Place: " + p.get_str() + " is not prime");
  return Place{false, p};
}

namespace {

// Polynomial with integer coefficients mod m, for fast evaluation.
struct ModPoly {
  int nvars;
  std::vector<std::pair<Exps, Int>> terms;
};

ModPoly reduce_poly(const Poly& f, const Int& m) {
  ModPoly out;
  out.nvars = f.nvars();
  for (const auto& [e, c] : f.terms()) {
    Int r = reduce_mod(c, m);  // throws when a denominator is not invertible
    if (sgn(r) != 0) out.terms.emplace_back(e, r);
  }
  return out;
}

Int eval_mod(const ModPoly& f, const std::vector<Int>& x, const Int& m) {
  Int acc(0), t;
  for (const auto& [e, c] : f.terms) {
    t = c;
    for (int i = 0; i < f.nvars; ++i)
      for (int k = 0; k < e[i]; ++k) t = t * x[i] % m;
    acc = (acc + t) % m;
  }
  if (sgn(acc) < 0) acc += m;
  return acc;
}

// Fast small-prime variant on machine words; valid for p < 2^31.
struct SmallModPoly {
  int nvars;
  std::vector<std::pair<Exps, long long>> terms;
};

SmallModPoly reduce_poly_small(const Poly& f, long long p) {
  SmallModPoly out;
  out.nvars = f.nvars();
  for (const auto& [e, c] : f.terms()) {
    Int r = reduce_mod(c, Int(p));
    long long v = r.get_si();
    if (v != 0) out.terms.emplace_back(e, v);
  }
  return out;
}

long long eval_mod_small(const SmallModPoly& f, const std::vector<long long>& x, long long p) {
  long long acc = 0;
  for (const auto& [e, c] : f.terms) {
    long long t = c;
    for (int i = 0; i < f.nvars; ++i)
      for (int k = 0; k < e[i]; ++k) t = t * x[i] % p;
    acc = (acc + t) % p;
  }
  return acc;
}

}  // namespace

std::vector<ModPSolution> solutions_mod_p(const Poly& f, const Int& p, bool require_nonsingular,
                                          const SearchBudget& budget) {
  if (!is_prime(p)) throw std::invalid_argument("solutions_mod_p: modulus not prime");
  if (p >= Int(1) << 31) throw std::invalid_argument("solutions_mod_p: prime too large");
  int n = f.nvars();
  if (n == 0) throw std::invalid_argument("solutions_mod_p: polynomial has no variables");
  Int total(1);
  for (int i = 0; i < n; ++i) {
    total *= p;
    if (total > budget.max_enumeration)
      throw std::invalid_argument("solutions_mod_p: p^nvars exceeds the enumeration budget");
  }
  long long pp = p.get_si();
  SmallModPoly fr = reduce_poly_small(f, pp);
  std::vector<SmallModPoly> grad;
  for (int i = 0; i < n; ++i) grad.push_back(reduce_poly_small(f.derivative(i), pp));

  std::vector<ModPSolution> out;
  std::vector<long long> x(n, 0);
  while (true) {
    if (eval_mod_small(fr, x, pp) == 0) {
      bool nonsing = false;
      for (int i = 0; i < n && !nonsing; ++i) nonsing = eval_mod_small(grad[i], x, pp) != 0;
      if (!require_nonsingular || nonsing) {
        ModPSolution s;
        s.p = p;
        s.k = 1;
        s.nonsingular = nonsing;
        for (long long v : x) s.point.emplace_back(v);
        out.push_back(std::move(s));
      }
    }
    int i = n - 1;
    while (i >= 0 && x[i] == pp - 1) x[i--] = 0;
    if (i < 0) break;
    ++x[i];
  }
  return out;
}

ModPSearch first_nonsingular_mod_p(const Poly& f, const Int& p, const SearchBudget& budget) {
  if (!is_prime(p)) throw std::invalid_argument("first_nonsingular_mod_p: modulus not prime");
  if (p >= Int(1) << 31)
    throw std::invalid_argument("first_nonsingular_mod_p: prime too large for the search");
  int n = f.nvars();
  long long pp = p.get_si();
  SmallModPoly fr = reduce_poly_small(f, pp);
  std::vector<SmallModPoly> grad;
  for (int i = 0; i < n; ++i) grad.push_back(reduce_poly_small(f.derivative(i), pp));

  auto check = [&](const std::vector<long long>& x) -> std::optional<ModPSolution> {
    if (eval_mod_small(fr, x, pp) != 0) return std::nullopt;
    bool nonsing = false;
    for (int i = 0; i < n && !nonsing; ++i) nonsing = eval_mod_small(grad[i], x, pp) != 0;
    if (!nonsing) return std::nullopt;
    ModPSolution s;
    s.p = p;
    s.k = 1;
    s.nonsingular = true;
    for (long long v : x) s.point.emplace_back(v);
    return s;
  };

  ModPSearch res;
  Int total(1);
  bool exhaustive = true;
  for (int i = 0; i < n; ++i) {
    total *= p;
    if (total > budget.max_enumeration) {
      exhaustive = false;
      break;
    }
  }
  if (exhaustive) {
    res.exhaustive = true;
    std::vector<long long> x(n, 0);
    while (true) {
      if (auto s = check(x)) {
        res.status = ModPStatus::found;
        res.solution = std::move(s);
        return res;
      }
      int i = n - 1;
      while (i >= 0 && x[i] == pp - 1) x[i--] = 0;
      if (i < 0) break;
      ++x[i];
    }
    res.status = ModPStatus::refuted;
    return res;
  }
  // Seeded sampling: a miss is inconclusive.
  std::mt19937_64 rng(budget.seed);
  std::vector<long long> x(n);
  for (long trial = 0; trial < budget.samples; ++trial) {
    for (int i = 0; i < n; ++i) x[i] = static_cast<long long>(rng() % static_cast<unsigned long long>(pp));
    if (auto s = check(x)) {
      res.status = ModPStatus::found;
      res.solution = std::move(s);
      return res;
    }
  }
  res.status = ModPStatus::not_found;
  return res;
}

ModPSolution hensel_lift(const Poly& f, const ModPSolution& s, int target_k) {
  if (!s.nonsingular) throw std::invalid_argument("hensel_lift: solution must be nonsingular");
  if (target_k < s.k) throw std::invalid_argument("hensel_lift: target below current exponent");
  int n = f.nvars();
  if (static_cast<int>(s.point.size()) != n) throw std::invalid_argument("hensel_lift: point length mismatch");
  const Int& p = s.p;

  std::vector<Poly> grads;
  for (int i = 0; i < n; ++i) grads.push_back(f.derivative(i));

  // Unit coordinate of the gradient mod p (lowest index).
  int j = -1;
  {
    ModPoly fr = reduce_poly(f, p);
    std::vector<Int> x = s.point;
    for (Int& v : x) v %= p;
    for (int i = 0; i < n; ++i) {
      ModPoly g = reduce_poly(grads[i], p);
      if (sgn(eval_mod(g, x, p)) != 0) {
        j = i;
        break;
      }
    }
  }
  if (j < 0) throw std::invalid_argument("hensel_lift: gradient vanishes mod p");

  Int mod_cur;
  mpz_pow_ui(mod_cur.get_mpz_t(), p.get_mpz_t(), s.k);
  std::vector<Int> x = s.point;
  {
    ModPoly fr = reduce_poly(f, mod_cur);
    if (sgn(eval_mod(fr, x, mod_cur)) != 0)
      throw std::invalid_argument("hensel_lift: point is not a solution at its exponent");
  }

  int k = s.k;
  while (k < target_k) {
    int k2 = 2 * k;
    Int mod_next;
    mpz_pow_ui(mod_next.get_mpz_t(), p.get_mpz_t(), k2);
    ModPoly fr = reduce_poly(f, mod_next);
    ModPoly gr = reduce_poly(grads[j], mod_next);
    Int fv = eval_mod(fr, x, mod_next);
    Int gv = eval_mod(gr, x, mod_next);
    Int gi;
    if (mpz_invert(gi.get_mpz_t(), gv.get_mpz_t(), mod_next.get_mpz_t()) == 0)
      throw std::logic_error("hensel_lift: derivative not invertible");
    x[j] = (x[j] - fv * gi) % mod_next;
    if (sgn(x[j]) < 0) x[j] += mod_next;
    k = k2;
  }

  Int mod_target;
  mpz_pow_ui(mod_target.get_mpz_t(), p.get_mpz_t(), target_k);
  for (Int& v : x) {
    v %= mod_target;
    if (sgn(v) < 0) v += mod_target;
  }
  ModPoly fr = reduce_poly(f, mod_target);
  if (sgn(eval_mod(fr, x, mod_target)) != 0)
    throw std::logic_error("hensel_lift: lifted point fails the congruence");
  return ModPSolution{p, target_k, std::move(x), true};
}

namespace {

int legendre(const Int& a, const Int& p) { return mpz_legendre(a.get_mpz_t(), p.get_mpz_t()); }

// Odd unit part of a rational at p, reduced mod m.
Int unit_part_mod(const Rat& x, const Int& p, const Int& m) {
  long v = ord_p(x, p);
  Int pv;
  mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(v >= 0 ? v : -v));
  Rat u = v >= 0 ? x / Rat(pv) : x * Rat(pv);
  return reduce_mod(u, m);
}

bool is_square_qp(const Rat& x, const Int& p) {
  if (x.is_zero()) return true;
  long v = ord_p(x, p);
  if (v % 2 != 0) return false;
  if (p == 2) return unit_part_mod(x, p, Int(8)) == 1;
  return legendre(unit_part_mod(x, p, p), p) == 1;
}

}  // namespace

int hilbert_symbol(const Rat& a, const Rat& b, const Place& v) {
  if (a.is_zero() || b.is_zero()) throw std::invalid_argument("hilbert_symbol: arguments must be nonzero");
  if (v.real) return (a.sign() < 0 && b.sign() < 0) ? -1 : 1;
  const Int& p = v.p;
  long alpha = ord_p(a, p), beta = ord_p(b, p);
  if (p == 2) {
    Int u = unit_part_mod(a, p, Int(8));
    Int w = unit_part_mod(b, p, Int(8));
    auto eps = [](const Int& x) { return (x == 3 || x == 7) ? 1 : 0; };   // (x-1)/2 mod 2
    auto omega = [](const Int& x) { return (x == 3 || x == 5) ? 1 : 0; }; // (x^2-1)/8 mod 2
    long e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
    return e % 2 == 0 ? 1 : -1;
  }
  Int u = unit_part_mod(a, p, p);
  Int w = unit_part_mod(b, p, p);
  int s = 1;
  if (beta % 2 != 0) s *= legendre(u, p);
  if (alpha % 2 != 0) s *= legendre(w, p);
  if (alpha % 2 != 0 && beta % 2 != 0 && ((p - 1) / 2) % 2 != 0) s = -s;
  return s;
}

namespace {

// Exact gradient of x^T q x is 2 q x.
VecQ quad_gradient(const MatQ& q, const VecQ& x) {
  VecQ g = mat_vec(q, x);
  for (Rat& v : g) v *= Rat(2);
  return g;
}

Rat quad_value(const MatQ& q, const VecQ& x) {
  Rat acc(0);
  int n = mat_rows(q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += q[i][j] * x[i] * x[j];
  return acc;
}

// Height-ordered primitive integer vectors; pred decides acceptance.
std::optional<VecQ> primitive_grid_first(int dim, int max_ring,
                                         const std::function<bool(const VecQ&)>& pred) {
  for (long ring = 1; ring <= max_ring; ++ring) {
    std::vector<long> v(dim, -ring);
    while (true) {
      long maxabs = 0;
      for (long x : v) maxabs = std::max(maxabs, std::labs(x));
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
          if (g == 1) {
            VecQ y(dim);
            for (int i = 0; i < dim; ++i) y[i] = Rat(v[i]);
            if (pred(y)) return y;
          }
        }
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

IsotropyResult quadric_isotropic(const MatQ& q, const Place& v, bool want_witness,
                                 int witness_height) {
  if (!mat_is_symmetric(q)) throw std::invalid_argument("quadric_isotropic: matrix not symmetric");
  int n = mat_rows(q);
  IsotropyResult res;
  if (n == 0) return res;

  pencil::CongruenceCertificate cert = pencil::diagonalize_congruent(q);
  VecQ diag;
  for (int i = 0; i < n; ++i)
    if (!cert.d[i][i].is_zero()) diag.push_back(cert.d[i][i]);
  int rank = static_cast<int>(diag.size());
  bool degenerate = rank < n;

  if (v.real) {
    bool pos = false, neg = false;
    for (const Rat& d : diag) (d.sign() > 0 ? pos : neg) = true;
    res.isotropic = degenerate || (pos && neg);
  } else if (degenerate) {
    res.isotropic = true;
  } else {
    const Int& p = v.p;
    switch (rank) {
      case 1:
        res.isotropic = false;
        break;
      case 2:
        res.isotropic = is_square_qp(-(diag[0] * diag[1]), p);
        break;
      default: {
        Rat disc(1);
        for (const Rat& d : diag) disc *= d;
        int eps = 1;
        for (int i = 0; i < rank; ++i)
          for (int j = i + 1; j < rank; ++j) eps *= hilbert_symbol(diag[i], diag[j], v);
        if (rank == 3) {
          res.isotropic = hilbert_symbol(Rat(-1), -disc, v) == eps;
        } else if (rank == 4) {
          res.isotropic = !is_square_qp(disc, p) || eps == hilbert_symbol(Rat(-1), Rat(-1), v);
        } else {
          res.isotropic = true;  // rank >= 5 over Q_p
        }
      }
    }
  }

  if (!res.isotropic || !want_witness) return res;

  if (degenerate) {
    res.witness = kernel_basis(q).front();
    return res;
  }
  if (v.real) {
    res.witness = primitive_grid_first(
        n, witness_height, [&](const VecQ& x) { return quad_value(q, x).is_zero(); });
    return res;
  }

  // Integralize; scaling by a positive constant changes neither the zero set
  // nor liftability, and the Hensel criterion below wants p-integral entries.
  const Int& p = v.p;
  Int l(1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q[i][j].den().get_mpz_t());
  MatQ qi = mat_scaled(q, Rat(l));

  std::optional<ModPSolution> lifted;
  auto found = primitive_grid_first(n, witness_height, [&](const VecQ& x) {
    Rat val = quad_value(qi, x);
    if (val.is_zero()) return true;  // exact zero
    long tq = ord_p(val, p);
    long tg = kOrdInfinity;
    for (const Rat& g : quad_gradient(qi, x)) tg = std::min(tg, ord_p(g, p));
    if (tg == kOrdInfinity || tq <= 2 * tg) return false;
    Int mod;
    mpz_pow_ui(mod.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(tq));
    ModPSolution s;
    s.p = p;
    s.k = static_cast<int>(tq);
    s.nonsingular = true;
    for (const Rat& xi : x) {
      Int r = xi.num() % mod;
      if (sgn(r) < 0) r += mod;
      s.point.push_back(r);
    }
    lifted = std::move(s);
    return true;
  });
  if (found && !lifted)
    res.witness = found;  // exact rational zero
  else if (lifted)
    res.padic_witness = lifted;
  return res;
}

std::vector<PrimeReport> congruence_solubility_report(const CubicForm& c,
                                                      const std::vector<Int>& primes,
                                                      const SearchBudget& budget) {
  std::vector<PrimeReport> out;
  Poly f = c.to_poly();
  for (const Int& p : primes) {
    PrimeReport rep;
    rep.p = p;
    ModPSearch s = first_nonsingular_mod_p(f, p, budget);
    rep.exhaustive = s.exhaustive;
    switch (s.status) {
      case ModPStatus::found: {
        rep.status = PrimeStatus::found;
        ModPSolution lifted = hensel_lift(f, *s.solution, 3);
        rep.witness = std::move(lifted);
        rep.lift_exponent = 3;
        break;
      }
      case ModPStatus::refuted:
        rep.status = PrimeStatus::refuted;
        break;
      case ModPStatus::not_found:
        rep.status = PrimeStatus::not_found;
        break;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace cubicwa::localsolve

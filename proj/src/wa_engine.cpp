#include "cubicwa/wa_engine.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace cubicwa::wa {

CrtShift crt_shift(const std::vector<LocalTarget>& targets) {
  CrtShift out;
  std::vector<const LocalTarget*> primes;
  for (const LocalTarget& t : targets)
    if (!t.place.real) primes.push_back(&t);
  if (primes.empty()) {
    if (!targets.empty()) out.a.assign(targets.front().point.size(), Int(0));
    return out;
  }
  size_t n = primes.front()->point.size();
  for (const auto* t : primes) {
    if (t->point.size() != n) throw std::invalid_argument("crt_shift: point length mismatch");
    if (t->precision < 1) throw std::invalid_argument("crt_shift: precision must be >= 1");
    for (size_t i = 0; i < primes.size(); ++i)
      if (primes[i] != t && primes[i]->place.p == t->place.p)
        throw std::invalid_argument("crt_shift: duplicate prime places");
  }

  // Componentwise CRT to the requested precisions.
  Int big_m(1);
  std::vector<Int> moduli;
  for (const auto* t : primes) {
    Int pk;
    mpz_pow_ui(pk.get_mpz_t(), t->place.p.get_mpz_t(), t->precision);
    moduli.push_back(pk);
    big_m *= pk;
  }
  out.a.assign(n, Int(0));
  for (size_t i = 0; i < n; ++i) {
    Int acc(0), mod_acc(1);
    for (size_t k = 0; k < primes.size(); ++k) {
      long ord = ord_p(primes[k]->point[i], primes[k]->place.p);
      if (ord < 0) throw std::invalid_argument("crt_shift: target not integral at its prime");
      Int r = reduce_mod(primes[k]->point[i], moduli[k]);
      // Merge acc mod mod_acc with r mod moduli[k].
      Int g, u, v;
      mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), mod_acc.get_mpz_t(),
                 moduli[k].get_mpz_t());
      // Moduli are pairwise coprime, g == 1.
      Int merged = acc + mod_acc * (u * (r - acc) % moduli[k]);
      mod_acc *= moduli[k];
      merged %= mod_acc;
      if (sgn(merged) < 0) merged += mod_acc;
      acc = merged;
    }
    out.a[i] = acc;
  }

  // r_p = min_i ord_p(a_i - target_i), capped at the requested precision when
  // every coordinate matches exactly.
  out.m = 1;
  for (size_t k = 0; k < primes.size(); ++k) {
    long r = kOrdInfinity;
    for (size_t i = 0; i < n; ++i)
      r = std::min(r, ord_p(Rat(out.a[i]) - primes[k]->point[i], primes[k]->place.p));
    if (r == kOrdInfinity) r = primes[k]->precision;
    if (r < primes[k]->precision) throw std::logic_error("crt_shift: residue drifted below precision");
    out.exponents.emplace_back(primes[k]->place.p, r);
    Int pk;
    mpz_pow_ui(pk.get_mpz_t(), primes[k]->place.p.get_mpz_t(), static_cast<unsigned long>(r));
    out.m *= pk;
  }
  return out;
}

Poly shifted_poly(const CubicForm& c, std::span<const Int> a) {
  if (static_cast<int>(a.size()) != c.n()) throw std::invalid_argument("shifted_poly: length mismatch");
  int n = c.n();
  std::vector<Poly> images;
  for (int i = 0; i < n; ++i) {
    Poly im = Poly::var(n, i);
    im.add_term(Exps(n, 0), Rat(a[i]));
    images.push_back(std::move(im));
  }
  Poly f = c.to_poly().compose(images);
  if (f.homogeneous_part(3) != c.to_poly())
    throw std::logic_error("shifted_poly: cubic part changed under the shift");
  return f;
}

Int choose_scaling(const Int& m, int t, const Rat& eps) {
  if (m < 1 || t < 1) throw std::invalid_argument("choose_scaling: need m >= 1, t >= 1");
  if (eps.sign() <= 0) throw std::invalid_argument("choose_scaling: epsilon must be positive");
  Int mt;
  mpz_pow_ui(mt.get_mpz_t(), m.get_mpz_t(), t);
  Rat threshold = Rat(2) / eps;  // the constant c collapses to 1 over Q
  // Smallest k >= 0 with 1 + k m^t > threshold.
  Int k(0);
  Rat margin = threshold - Rat(1);
  if (margin.sign() >= 0) k = floor_div(margin / Rat(mt)) + 1;
  if (k < 0) k = 0;
  return Int(1) + k * mt;
}

namespace {

// Candidate multiples of m inside an open interval, ordered center-outward
// (distance from the interval's midpoint, ties toward the smaller value).
struct CenterOut {
  Int base;   // nearest multiple of m to the center (ties: smaller)
  Int m;
  Int k_min, k_max;  // inclusive bounds as multiplier indices
  long size = 0;

  Int value(long idx) const {
    // idx 0 -> base; 1 -> base - m; 2 -> base + m; 3 -> base - 2m; ...
    long step = (idx + 1) / 2;
    Int v = base;
    if (idx % 2 == 1)
      v -= Int(step) * m;
    else
      v += Int(step) * m;
    return v;
  }
};

CenterOut make_center_out(const Rat& lo, const Rat& hi, const Rat& center, const Int& m) {
  CenterOut c;
  c.m = m;
  // Strict bounds: smallest and largest k with lo < k m < hi.
  Rat lo_q = lo / Rat(m), hi_q = hi / Rat(m);
  Int k_min = floor_div(lo_q) + 1;
  Int k_max = ceil_div(hi_q) - 1;
  c.k_min = k_min;
  c.k_max = k_max;
  if (k_max < k_min) {
    c.size = 0;
    c.base = 0;
    return c;
  }
  // Nearest multiple to the center, clamped into range.
  Rat cq = center / Rat(m);
  Int k0 = floor_div(cq);
  if (Rat(k0 + 1) * Rat(m) - center < center - Rat(k0) * Rat(m)) k0 += 1;
  if (k0 < k_min) k0 = k_min;
  if (k0 > k_max) k0 = k_max;
  c.base = k0 * m;
  // The alternating walk stays valid as long as indices map into range; we
  // enumerate by rank and skip values outside [k_min, k_max].
  Int span = k_max - k_min + 1;
  c.size = span.fits_slong_p() ? span.get_si() : -1;  // -1: effectively unbounded
  return c;
}

// idx enumeration including out-of-range skips; returns up to `size` values.
class CenterOutIter {
 public:
  explicit CenterOutIter(const CenterOut& c) : c_(c) {}
  bool next(Int* out) {
    while (true) {
      if (emitted_ >= c_.size && c_.size >= 0) return false;
      Int v = c_.value(raw_++);
      Int k = v / c_.m;
      if (k < c_.k_min || k > c_.k_max) {
        if (raw_ > 4 && exhausted_side()) return false;
        continue;
      }
      ++emitted_;
      *out = v;
      return true;
    }
  }

 private:
  bool exhausted_side() {
    // Both walk arms out of range: nothing further can land inside.
    long step = (raw_ + 1) / 2;
    Int low = c_.base - Int(step) * c_.m;
    Int high = c_.base + Int(step) * c_.m;
    return (low / c_.m < c_.k_min) && (high / c_.m > c_.k_max);
  }
  CenterOut c_;
  long raw_ = 0;
  long emitted_ = 0;
};

Rat ord_gap(const Rat& x, const Rat& target, const Int& p) { return Rat(ord_p(x - target, p)); }

}  // namespace

SearchResult search(const ApproximationTask& task) {
  const CubicForm& c = task.form;
  int n = c.n();
  SearchResult res;
  Transcript& tr = res.transcript;

  if (!(task.box_side > Rat(0) && task.box_side < Rat(1)))
    throw std::invalid_argument("search: box side must lie in (0, 1)");

  const LocalTarget* real_target = nullptr;
  std::vector<LocalTarget> prime_targets;
  for (const LocalTarget& t : task.targets) {
    if (static_cast<int>(t.point.size()) != n)
      throw std::invalid_argument("search: target length mismatch");
    if (t.place.real) {
      if (real_target) throw std::invalid_argument("search: more than one real target");
      real_target = &t;
    } else {
      prime_targets.push_back(t);
    }
  }

  // Validate prime targets: nonsingular zeros mod p^precision.
  std::vector<Poly> grads = c.gradient();
  for (const LocalTarget& t : prime_targets) {
    const Int& p = t.place.p;
    for (const Rat& x : t.point)
      if (ord_p(x, p) < 0) throw std::invalid_argument("search: prime target not integral");
    if (ord_p(c.eval(t.point), p) < t.precision)
      throw std::invalid_argument("search: prime target is not a zero to its precision");
    bool nonsingular = false;
    for (const Poly& g : grads) nonsingular = nonsingular || ord_p(g.eval(t.point), t.place.p) == 0;
    if (!nonsingular) throw std::invalid_argument("search: prime target is singular mod p");
  }
  if (real_target) {
    if (real_target->epsilon.sign() <= 0)
      throw std::invalid_argument("search: epsilon must be positive");
    if (c.eval(real_target->point).is_zero()) {
      bool nonsingular = false;
      for (const Poly& g : grads) nonsingular = nonsingular || !g.eval(real_target->point).is_zero();
      if (!nonsingular) throw std::invalid_argument("search: real target is a singular point");
    }
  }

  CrtShift crt = crt_shift(prime_targets);
  if (crt.a.empty()) crt.a.assign(n, Int(0));
  tr.shift = crt.a;
  tr.modulus = crt.m;

  Poly f = shifted_poly(c, crt.a);

  int maxprec = 0;
  for (const LocalTarget& t : prime_targets) maxprec = std::max(maxprec, t.precision);
  int t_exp = task.t_exponent.value_or(maxprec + 1);
  if (t_exp < 1) throw std::invalid_argument("search: t exponent must be >= 1");
  tr.t_exponent = t_exp;

  Int d = real_target ? choose_scaling(crt.m, t_exp, real_target->epsilon) : Int(1);
  tr.d_scaling = d;

  Int mt;
  mpz_pow_ui(mt.get_mpz_t(), crt.m.get_mpz_t(), t_exp);

  Int big_p(1);
  for (int step = 0; step < task.budget.p_steps; ++step, big_p += mt) {
    StepRecord sr;
    sr.P = big_p;
    Rat half = Rat(big_p) * task.box_side / Rat(2);
    std::vector<CenterOut> coords;
    bool empty = false;
    for (int i = 0; i < n; ++i) {
      Rat center = real_target ? Rat(d * big_p) * real_target->point[i] : Rat(0);
      CenterOut co = make_center_out(center - half, center + half, center, crt.m);
      if (co.size == 0) empty = true;
      coords.push_back(co);
      sr.first_last.emplace_back(co.k_min * crt.m, co.k_max * crt.m);
    }
    if (!empty) {
      // Odometer over center-out ranks, first coordinate outermost.
      std::vector<CenterOutIter> iters;
      std::vector<Int> y(n);
      std::vector<long> rank(n, 0);
      bool done = false;
      // Reset helper: coordinate i and everything after to rank 0.
      auto reset_from = [&](int from) -> bool {
        for (int i = from; i < n; ++i) {
          CenterOutIter it(coords[i]);
          if (!it.next(&y[i])) return false;
          if (i + 1 > static_cast<int>(iters.size()))
            iters.push_back(it);
          else
            iters[i] = it;
        }
        return true;
      };
      iters.clear();
      if (!reset_from(0)) done = true;
      while (!done && sr.candidates < task.budget.points_per_p) {
        ++sr.candidates;
        VecQ yv(n);
        bool zero_z = true;
        for (int i = 0; i < n; ++i) {
          yv[i] = Rat(y[i]);
          zero_z = zero_z && (y[i] + crt.a[i] == 0);
        }
        if (!zero_z) {
          Rat fv = f.eval(yv);
          if (fv.is_zero()) {
            // Candidate hit: x = (y + a) / (D P).
            VecQ x(n);
            Rat dp = Rat(d * big_p);
            for (int i = 0; i < n; ++i) x[i] = (yv[i] + Rat(crt.a[i])) / dp;
            bool ok = true;
            std::vector<CheckRecord> checks;
            {
              Rat cv = c.eval(x);
              checks.push_back({"cubic_zero", "C(x) = " + cv.str(), cv.is_zero()});
              ok = ok && cv.is_zero();
            }
            for (const LocalTarget& t : prime_targets) {
              for (int i = 0; i < n; ++i) {
                long gap = ord_p(x[i] - t.point[i], t.place.p);
                bool pass = gap >= t.precision;
                checks.push_back({"prime_gap",
                                  "p=" + t.place.p.get_str() + " i=" + std::to_string(i + 1) +
                                      " ord=" + (gap == kOrdInfinity ? "inf" : std::to_string(gap)) +
                                      " required=" + std::to_string(t.precision),
                                  pass});
                ok = ok && pass;
              }
            }
            if (real_target) {
              for (int i = 0; i < n; ++i) {
                Rat gap = abs(x[i] - real_target->point[i]);
                bool pass = gap < real_target->epsilon;
                checks.push_back({"real_gap",
                                  "i=" + std::to_string(i + 1) + " |x-target| = " + gap.str() +
                                      " epsilon = " + real_target->epsilon.str(),
                                  pass});
                ok = ok && pass;
              }
            }
            if (ok) {
              sr.hit = true;
              tr.steps.push_back(sr);
              tr.checks = std::move(checks);
              tr.found = true;
              res.point = std::move(x);
              return res;
            }
            // A zero of f that misses a constraint: keep enumerating.
            for (auto& ch : checks)
              if (!ch.ok) tr.checks.push_back(ch);
          }
        }
        // Advance the odometer (last coordinate fastest).
        int i = n - 1;
        while (i >= 0) {
          if (iters[i].next(&y[i])) break;
          --i;
        }
        if (i < 0) {
          done = true;
        } else {
          if (!reset_from(i + 1)) done = true;
        }
      }
    }
    tr.steps.push_back(sr);
  }
  tr.found = false;
  tr.note = "budget exhausted; existence is not refuted";
  return res;
}

namespace {

Int count_serial(const Poly& psi, const std::vector<Int>& kmin, const std::vector<Int>& kmax,
                 const Int& m, int fixed_first, const Int& first_lo, const Int& first_hi) {
  int n = psi.nvars();
  Int total(0);
  std::vector<Rat> x(n);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      if (psi.eval(x).is_zero()) ++total;
      return;
    }
    Int lo = (pos == fixed_first) ? first_lo : kmin[pos];
    Int hi = (pos == fixed_first) ? first_hi : kmax[pos];
    for (Int k = lo; k <= hi; ++k) {
      x[pos] = Rat(k * m);
      rec(pos + 1);
    }
  };
  rec(0);
  return total;
}

}  // namespace

Int count(const CountQuery& q, int threads) {
  int n = q.psi.nvars();
  if (static_cast<int>(q.region.size()) != n)
    throw std::invalid_argument("count: region dimension mismatch");
  if (q.m < 1) throw std::invalid_argument("count: modulus must be positive");
  if (q.scale.sign() <= 0) throw std::invalid_argument("count: scale must be positive");

  std::vector<Int> kmin(n), kmax(n);
  Rat mq(q.m);
  Int volume(1);
  for (int i = 0; i < n; ++i) {
    const Interval& iv = q.region[i];
    Rat lo = iv.lo * q.scale, hi = iv.hi * q.scale;
    if (iv.open) {
      kmin[i] = floor_div(lo / mq) + 1;
      kmax[i] = ceil_div(hi / mq) - 1;
    } else {
      kmin[i] = ceil_div(lo / mq);
      kmax[i] = floor_div(hi / mq);
    }
    Int c = kmax[i] - kmin[i] + 1;
    if (c < 0) c = 0;
    volume *= c;
    if (volume > q.budget) throw std::invalid_argument("count: lattice point budget exceeded");
  }
  if (volume == 0) return Int(0);

  if (threads <= 1 || n == 0 || kmax[0] - kmin[0] + 1 <= 1)
    return count_serial(q.psi, kmin, kmax, q.m, -1, 0, 0);

  Int span = kmax[0] - kmin[0] + 1;
  long nsh = std::min<long>(threads, span.get_si());
  std::vector<std::future<Int>> futs;
  for (long s = 0; s < nsh; ++s) {
    Int lo = kmin[0] + span * s / nsh;
    Int hi = kmin[0] + span * (s + 1) / nsh - 1;
    futs.push_back(std::async(std::launch::async, [&, lo, hi] {
      return count_serial(q.psi, kmin, kmax, q.m, 0, lo, hi);
    }));
  }
  Int total(0);
  for (auto& f : futs) total += f.get();
  return total;
}

}  // namespace cubicwa::wa

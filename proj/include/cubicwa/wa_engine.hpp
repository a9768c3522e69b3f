#pragma once

#include <optional>
#include <string>

#include "cubicwa/cubic_form.hpp"
#include "cubicwa/localsolve.hpp"

namespace cubicwa::wa {

/// One local approximation constraint. Prime places carry an exponent
/// (ord_p(x_i - point_i) >= precision for every i), the real place an
/// epsilon (max_i |x_i - point_i| < epsilon).
struct LocalTarget {
  localsolve::Place place;
  VecQ point;
  int precision = 1;
  Rat epsilon = Rat(1);
};

struct Budget {
  int p_steps = 8;             // how many values of P to try
  long points_per_p = 200000;  // lattice points tested per P
};

struct ApproximationTask {
  CubicForm form{0};
  std::vector<LocalTarget> targets;  // at most one per place
  Rat box_side = Rat(1, 2);          // the box parameter rho, in (0, 1)
  std::optional<int> t_exponent;     // default: max prime precision + 1
  Budget budget;
  unsigned long seed = 0;
};

struct CrtShift {
  std::vector<Int> a;  // least nonnegative residues mod m
  Int m = 1;
  std::vector<std::pair<Int, long>> exponents;  // (p, r_p) with m = prod p^{r_p}
};

/// Combines the prime-place targets into one integer shift by the Chinese
/// Remainder Theorem; r_p is the smallest valuation of a_i - point_i over the
/// coordinates (capped at the requested precision when the match is exact).
CrtShift crt_shift(const std::vector<LocalTarget>& targets);

/// f(x) = C(x + a). The cubic part is asserted equal to C.
Poly shifted_poly(const CubicForm& c, std::span<const Int> a);

/// Smallest positive D with D = 1 mod m^t and D > 2/eps.
Int choose_scaling(const Int& m, int t, const Rat& eps);

struct CheckRecord {
  std::string kind;
  std::string detail;
  bool ok = false;
};

struct StepRecord {
  Int P;
  long candidates = 0;
  bool hit = false;
  std::vector<std::pair<Int, Int>> first_last;  // per-coordinate candidate extremes
};

struct Transcript {
  bool found = false;
  std::vector<Int> shift;
  Int modulus = 1;
  int t_exponent = 1;
  Int d_scaling = 1;
  std::vector<StepRecord> steps;
  std::vector<CheckRecord> checks;
  std::string note;
};

struct SearchResult {
  std::optional<VecQ> point;
  Transcript transcript;
};

/// The approximation procedure: CRT shift, f = C(x + a), scaling D, lattice
/// points of (mZ)^n in a box around D P x_real (growing P schedule with
/// P = 1 mod m^t), exact zero test, and exact verification of every target
/// constraint on the returned point x = (y + a) / (D P). Candidates are
/// enumerated center-outward, lexicographic over coordinate offsets.
SearchResult search(const ApproximationTask& task);

struct Interval {
  Rat lo, hi;
  bool open = false;  // boxes from |x - b| < rho/2 are open
};

struct CountQuery {
  Poly psi;
  std::vector<Interval> region;
  Int m = 1;
  Rat scale = Rat(1);  // the P in N(P)
  long budget = 4'000'000;
};

/// #{x in P*region with x in (mZ)^n and psi(x) = 0}, by exact lattice
/// enumeration. Shards deterministically over the leading coordinate when
/// threads > 1. Throws std::invalid_argument when the lattice point count
/// exceeds the budget.
Int count(const CountQuery& q, int threads = 1);

}  // namespace cubicwa::wa

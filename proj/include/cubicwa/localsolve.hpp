#pragma once

#include <optional>

#include "cubicwa/cubic_form.hpp"
#include "cubicwa/linalg.hpp"
#include "cubicwa/poly.hpp"

namespace cubicwa::localsolve {

/// Trial division for small factors, then Miller-Rabin with a base set that
/// is deterministic for anything this toolkit will see.
bool is_prime(const Int& n);

/// A place of the rationals: the real place or a prime.
struct Place {
  bool real = false;
  Int p = 0;

  static Place make_real() { return Place{true, Int(0)}; }
  static Place make_prime(const Int& p);  // throws unless p is prime
};

struct ModPSolution {
  Int p;
  int k = 1;
  std::vector<Int> point;  // least nonnegative residues mod p^k
  bool nonsingular = false;
};

struct SearchBudget {
  long max_enumeration = 2'000'000;  // exhaustive bound on p^nvars
  long samples = 100'000;            // sampling fallback trials
  unsigned long seed = 0;
};

/// Exhaustive enumeration of solutions of f = 0 mod p (k = 1).
/// Nonsingularity means the gradient does not vanish mod p. Throws
/// std::invalid_argument when p^nvars exceeds the budget.
std::vector<ModPSolution> solutions_mod_p(const Poly& f, const Int& p, bool require_nonsingular,
                                          const SearchBudget& budget = {});

enum class ModPStatus { found, refuted, not_found };

/// First nonsingular solution mod p in enumeration order; falls back to
/// seeded sampling above the exhaustive budget, in which case a miss is
/// reported as not_found rather than refuted.
struct ModPSearch {
  ModPStatus status = ModPStatus::not_found;
  std::optional<ModPSolution> solution;
  bool exhaustive = false;
};
ModPSearch first_nonsingular_mod_p(const Poly& f, const Int& p, const SearchBudget& budget = {});

/// Newton lifting along the coordinate whose partial derivative is a unit:
/// one step per doubling of the exponent. Requires s nonsingular.
ModPSolution hensel_lift(const Poly& f, const ModPSolution& s, int target_k);

/// Hilbert symbol (a, b)_v in {-1, +1}: does z^2 = a x^2 + b y^2 have a
/// nontrivial solution over the completion at v?
int hilbert_symbol(const Rat& a, const Rat& b, const Place& v);

struct IsotropyResult {
  bool isotropic = false;
  std::optional<VecQ> witness;                 // exact nontrivial rational zero
  std::optional<ModPSolution> padic_witness;   // liftable approximate zero at a prime place
};

/// Decides whether x^T q x represents zero nontrivially over the completion.
/// Real place: sign pattern of a congruent diagonalization; prime places:
/// rank-stratified criteria built from Hilbert symbols. A witness is searched
/// only on request and when the rank is at most 4 (rank >= 5 prime-place
/// forms are always isotropic).
IsotropyResult quadric_isotropic(const MatQ& q, const Place& v, bool want_witness = false,
                                 int witness_height = 32);

enum class PrimeStatus { found, refuted, not_found };

struct PrimeReport {
  Int p;
  PrimeStatus status = PrimeStatus::not_found;
  std::optional<ModPSolution> witness;
  int lift_exponent = 0;  // smoke-test lift achieved (target 3)
  bool exhaustive = false;
};

/// Per-prime nonsingular solubility of C = 0, with a lift to p^3 as a smoke
/// test on every hit.
std::vector<PrimeReport> congruence_solubility_report(const CubicForm& c,
                                                      const std::vector<Int>& primes,
                                                      const SearchBudget& budget = {});

}  // namespace cubicwa::localsolve

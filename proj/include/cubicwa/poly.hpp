#pragma once

#include <map>
#include <span>
#include <vector>

#include "cubicwa/rat.hpp"

namespace cubicwa {

/// Exponent vector; length equals the variable count of the owning polynomial.
using Exps = std::vector<int>;

/// Canonical term order: total degree descending, ties broken by
/// lexicographically larger exponent vector first. Map iteration order is
/// therefore the printing order.
struct GrlexOrder {
  bool operator()(const Exps& a, const Exps& b) const;
};

/// Sparse multivariate polynomial over the rationals. No zero coefficients
/// are stored; all exponent vectors have length nvars().
class Poly {
 public:
  using TermMap = std::map<Exps, Rat, GrlexOrder>;

  explicit Poly(int nvars = 0) : nvars_(nvars) {}
  static Poly constant(int nvars, const Rat& c);
  static Poly var(int nvars, int i, int pow = 1, const Rat& coeff = Rat(1));

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;  // -1 for the zero polynomial
  const TermMap& terms() const { return terms_; }
  Rat coeff(const Exps& e) const;

  /// Accumulates c * x^e, erasing the term if the sum cancels.
  void add_term(const Exps& e, const Rat& c);

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly scaled(const Rat& c) const;
  Poly pow(int k) const;

  Poly derivative(int var) const;
  Rat eval(std::span<const Rat> point) const;

  /// Ring homomorphism determined by x_i -> images[i]; all images must share
  /// a common variable count, which becomes the result's.
  Poly compose(std::span<const Poly> images) const;

  Poly homogeneous_part(int d) const;
  bool is_homogeneous(int d) const;

  /// Same polynomial viewed in new_nvars variables, variable i becoming
  /// variable i + offset.
  Poly embedded(int new_nvars, int offset = 0) const;

  /// Restriction x_i -> values[i] for the listed variables, others kept.
  Poly substitute_vars(const std::vector<std::pair<int, Rat>>& fixed) const;

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

 private:
  int nvars_;
  TermMap terms_;
};

inline int deg_of(const Exps& e) {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

}  // namespace cubicwa

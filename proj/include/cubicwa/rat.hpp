#pragma once

#include <gmpxx.h>

#include <climits>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace cubicwa {

using Int = mpz_class;

/// Exact rational scalar. Always in lowest terms, denominator > 0.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}
  Rat(long n) : v_(n) {}
  Rat(const Int& n) : v_(n) {}
  Rat(const Int& num, const Int& den);

  /// Parses "p" or "p/q". Throws std::invalid_argument on malformed input.
  static Rat parse(std::string_view s);

  Int num() const { return v_.get_num(); }
  Int den() const { return v_.get_den(); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rat operator-() const {
    Rat r;
    r.v_ = -v_;
    return r;
  }
  Rat& operator+=(const Rat& o) {
    v_ += o.v_;
    return *this;
  }
  Rat& operator-=(const Rat& o) {
    v_ -= o.v_;
    return *this;
  }
  Rat& operator*=(const Rat& o) {
    v_ *= o.v_;
    return *this;
  }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  Rat inverse() const;

  /// "p" when integral, otherwise "p/q".
  std::string str() const;

 private:
  mpq_class v_;
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

std::ostream& operator<<(std::ostream& os, const Rat& r);

/// Sentinel for the valuation of zero.
inline constexpr long kOrdInfinity = LONG_MAX / 4;

/// p-adic valuation of a nonzero integer; kOrdInfinity for zero.
long ord_p(const Int& n, const Int& p);
/// ord_p(num) - ord_p(den).
long ord_p(const Rat& r, const Int& p);

/// Least nonnegative residue of r modulo m, for r with ord_p(r) >= 0 at every
/// prime p dividing m (the denominator must be invertible mod m).
Int reduce_mod(const Rat& r, const Int& m);

/// floor(a / b) for exact rationals.
Int floor_div(const Rat& a);
Int ceil_div(const Rat& a);

}  // namespace cubicwa

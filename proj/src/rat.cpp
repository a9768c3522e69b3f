#include "cubicwa/rat.hpp"

#include <ostream>
#include <stdexcept>

namespace cubicwa {

Rat::Rat(const Int& num, const Int& den) {
  if (sgn(den) == 0) throw std::invalid_argument("Rat: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::invalid_argument("Rat: division by zero");
  v_ /= o.v_;
  return *this;
}

Rat Rat::inverse() const {
  if (is_zero()) throw std::invalid_argument("Rat: inverse of zero");
  Rat r;
  r.v_ = 1 / v_;
  return r;
}

Rat Rat::parse(std::string_view s) {
  auto bad = [&] { throw std::invalid_argument("Rat: malformed rational '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  std::string str(s);
  auto slash = str.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(str));
    Int num(str.substr(0, slash));
    Int den(str.substr(slash + 1));
    if (sgn(den) == 0) bad();
    return Rat(num, den);
  } catch (const std::invalid_argument&) {
    bad();
  }
  return Rat();  // unreachable
}

std::string Rat::str() const {
  if (is_integer()) return num().get_str();
  return num().get_str() + "/" + den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

long ord_p(const Int& n, const Int& p) {
  if (sgn(n) == 0) return kOrdInfinity;
  Int rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

long ord_p(const Rat& r, const Int& p) {
  if (r.is_zero()) return kOrdInfinity;
  return ord_p(r.num(), p) - ord_p(r.den(), p);
}

Int reduce_mod(const Rat& r, const Int& m) {
  if (m <= 0) throw std::invalid_argument("reduce_mod: modulus must be positive");
  Int den = r.den();
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::invalid_argument("reduce_mod: denominator not invertible modulo m");
  Int res = (r.num() % m) * inv % m;
  if (sgn(res) < 0) res += m;
  return res;
}

Int floor_div(const Rat& a) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.num().get_mpz_t(), a.den().get_mpz_t());
  return q;
}

Int ceil_div(const Rat& a) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.num().get_mpz_t(), a.den().get_mpz_t());
  return q;
}

}  // namespace cubicwa

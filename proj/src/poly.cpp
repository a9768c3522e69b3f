#include "cubicwa/poly.hpp"

#include <stdexcept>

namespace cubicwa {

bool GrlexOrder::operator()(const Exps& a, const Exps& b) const {
  int da = deg_of(a), db = deg_of(b);
  if (da != db) return da > db;
  return a > b;  // lexicographically larger exponent vector first
}

Poly Poly::constant(int nvars, const Rat& c) {
  Poly p(nvars);
  p.add_term(Exps(nvars, 0), c);
  return p;
}

Poly Poly::var(int nvars, int i, int pow, const Rat& coeff) {
  if (i < 0 || i >= nvars) throw std::invalid_argument("Poly::var: index out of range");
  Poly p(nvars);
  Exps e(nvars, 0);
  e[i] = pow;
  p.add_term(e, coeff);
  return p;
}

int Poly::total_degree() const {
  if (terms_.empty()) return -1;
  return deg_of(terms_.begin()->first);  // grlex order: largest degree first
}

Rat Poly::coeff(const Exps& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

void Poly::add_term(const Exps& e, const Rat& c) {
  if (c.is_zero()) return;
  if (static_cast<int>(e.size()) != nvars_)
    throw std::invalid_argument("Poly::add_term: exponent vector length mismatch");
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("Poly: variable count mismatch");
  Poly r(a.nvars_);
  Exps e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Poly Poly::scaled(const Rat& c) const {
  Poly r(nvars_);
  if (c.is_zero()) return r;
  for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
  return r;
}

Poly Poly::pow(int k) const {
  if (k < 0) throw std::invalid_argument("Poly::pow: negative exponent");
  Poly r = Poly::constant(nvars_, Rat(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

Poly Poly::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("Poly::derivative: index out of range");
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exps d = e;
    d[var] -= 1;
    r.add_term(d, c * Rat(e[var]));
  }
  return r;
}

Rat Poly::eval(std::span<const Rat> point) const {
  if (static_cast<int>(point.size()) != nvars_)
    throw std::invalid_argument("Poly::eval: dimension mismatch");
  Rat acc(0);
  for (const auto& [e, c] : terms_) {
    Rat t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    acc += t;
  }
  return acc;
}

Poly Poly::compose(std::span<const Poly> images) const {
  if (static_cast<int>(images.size()) != nvars_)
    throw std::invalid_argument("Poly::compose: image count mismatch");
  int out_vars = images.empty() ? 0 : images[0].nvars();
  for (const Poly& im : images)
    if (im.nvars() != out_vars) throw std::invalid_argument("Poly::compose: inconsistent images");
  Poly acc(out_vars);
  for (const auto& [e, c] : terms_) {
    Poly t = Poly::constant(out_vars, c);
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t = t * images[i];
    acc += t;
  }
  return acc;
}

Poly Poly::homogeneous_part(int d) const {
  Poly r(nvars_);
  for (const auto& [e, c] : terms_)
    if (deg_of(e) == d) r.terms_.emplace(e, c);
  return r;
}

bool Poly::is_homogeneous(int d) const {
  for (const auto& [e, c] : terms_)
    if (deg_of(e) != d) return false;
  return true;
}

Poly Poly::embedded(int new_nvars, int offset) const {
  Poly r(new_nvars);
  for (const auto& [e, c] : terms_) {
    Exps ne(new_nvars, 0);
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (i + offset >= new_nvars)
        throw std::invalid_argument("Poly::embedded: variable out of range");
      ne[i + offset] = e[i];
    }
    r.terms_.emplace(ne, c);
  }
  return r;
}

Poly Poly::substitute_vars(const std::vector<std::pair<int, Rat>>& fixed) const {
  std::vector<int> which(nvars_, -1);
  for (size_t k = 0; k < fixed.size(); ++k) which[fixed[k].first] = static_cast<int>(k);
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) {
    Rat k = c;
    Exps ne = e;
    for (int i = 0; i < nvars_; ++i) {
      if (which[i] < 0 || e[i] == 0) continue;
      const Rat& val = fixed[which[i]].second;
      for (int j = 0; j < e[i]; ++j) k *= val;
      ne[i] = 0;
      if (k.is_zero()) break;
    }
    r.add_term(ne, k);
  }
  return r;
}

bool Poly::operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

}  // namespace cubicwa

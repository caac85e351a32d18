#pragma once

#include <vector>

#include "picard/arith.hpp"
#include "picard/real.hpp"

namespace picard {

// Univariate polynomial over Q, coefficients from the constant term up.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rat> c);
  static QPoly monomial(const Rat& c, int deg);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const Rat& operator[](std::size_t i) const { return c_[i]; }
  Rat coeff(int i) const { return i >= 0 && i <= degree() ? c_[static_cast<std::size_t>(i)] : Rat(0); }
  const std::vector<Rat>& coeffs() const { return c_; }
  const Rat& lead() const { return c_.back(); }

  QPoly operator+(const QPoly& o) const;
  QPoly operator-(const QPoly& o) const;
  QPoly operator*(const QPoly& o) const;
  QPoly operator*(const Rat& s) const;
  bool operator==(const QPoly& o) const { return c_ == o.c_; }

  Rat eval(const Rat& x) const;
  Complex eval(const Complex& x) const;
  QPoly derivative() const;
  QPoly monic() const;
  // Composition p(q(x)).
  QPoly compose(const QPoly& q) const;

 private:
  void trim();
  std::vector<Rat> c_;
};

// Euclidean division; divisor nonzero.
void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
QPoly poly_gcd(QPoly a, QPoly b);  // monic, or zero

Rat resultant(const QPoly& f, const QPoly& g);
// Classical discriminant (-1)^{d(d-1)/2} Res(f, f') / lc(f).
Rat discriminant(const QPoly& f);

// All complex roots (with multiplicity) to roughly the current precision.
std::vector<Complex> numeric_roots(const QPoly& f);

// Rational roots, exact.
std::vector<Rat> rational_roots(const QPoly& f);

// Factorization of a squarefree polynomial into monic irreducible factors
// over Q (intended for small degree). Throws if f is not squarefree.
std::vector<QPoly> factor_squarefree(const QPoly& f);

}  // namespace picard

#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <optional>
#include <string>

#include "picard/arith.hpp"

namespace picard {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                            boost::multiprecision::et_off>;

// Sets the working precision (in bits) for newly created Real values on
// this thread and restores the previous setting on destruction.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned prev_digits_;
};

unsigned current_precision_bits();

Real to_real(const Rat& x);
Real to_real(const Int& x);
Real real_pi();
Real real_from_string(const std::string& s);
std::string real_to_string(const Real& x, int digits);

// Nearest integer (ties away from zero).
Int round_to_int(const Real& x);

// Best rational approximation with denominator at most max_den, accepted
// only if it lies within tol of x.
std::optional<Rat> recognize_rational(const Real& x, const Int& max_den, const Real& tol);

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(Real r, Real i = Real(0)) : re(std::move(r)), im(std::move(i)) {}

  Complex operator+(const Complex& o) const { return {re + o.re, im + o.im}; }
  Complex operator-(const Complex& o) const { return {re - o.re, im - o.im}; }
  Complex operator-() const { return {-re, -im}; }
  Complex operator*(const Complex& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  Complex operator*(const Real& s) const { return {re * s, im * s}; }
  Complex operator/(const Complex& o) const;
  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    *this = *this * o;
    return *this;
  }
  Complex conj() const { return {re, -im}; }
  Real norm2() const { return re * re + im * im; }
};

Real abs(const Complex& z);
Real arg(const Complex& z);
Complex log(const Complex& z);  // principal branch, argument in (-pi, pi]
Complex exp(const Complex& z);

}  // namespace picard

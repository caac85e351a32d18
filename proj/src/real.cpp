#include "picard/real.hpp"

#include <sstream>

namespace picard {

namespace {

unsigned bits_to_digits(unsigned bits) {
  return static_cast<unsigned>(bits * 0.30103) + 2;
}

}  // namespace

PrecisionScope::PrecisionScope(unsigned bits) : prev_digits_(Real::default_precision()) {
  Real::default_precision(bits_to_digits(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(prev_digits_); }

unsigned current_precision_bits() {
  return static_cast<unsigned>(Real::default_precision() / 0.30103);
}

Real to_real(const Int& x) {
  Real r;
  mpfr_set_z(r.backend().data(), x.get_mpz_t(), MPFR_RNDN);
  return r;
}

Real to_real(const Rat& x) {
  Real r;
  mpfr_set_q(r.backend().data(), x.get_mpq_t(), MPFR_RNDN);
  return r;
}

Real real_pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

Real real_from_string(const std::string& s) {
  Real r;
  mpfr_set_str(r.backend().data(), s.c_str(), 10, MPFR_RNDN);
  return r;
}

std::string real_to_string(const Real& x, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::scientific << x;
  return os.str();
}

Int round_to_int(const Real& x) {
  Int z;
  Real r = boost::multiprecision::round(x);
  mpfr_get_z(z.get_mpz_t(), r.backend().data(), MPFR_RNDN);
  return z;
}

std::optional<Rat> recognize_rational(const Real& x, const Int& max_den, const Real& tol) {
  // Continued fraction convergents.
  Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Real y = x;
  for (int iter = 0; iter < 400; ++iter) {
    Real fl = boost::multiprecision::floor(y);
    Int a = round_to_int(fl);
    Int p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Rat cand(p1, q1);
    cand.canonicalize();
    if (boost::multiprecision::abs(to_real(cand) - x) <= tol) return cand;
    Real frac = y - fl;
    if (frac == 0) break;
    y = 1 / frac;
  }
  return std::nullopt;
}

Complex Complex::operator/(const Complex& o) const {
  Real d = o.norm2();
  return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
}

Real abs(const Complex& z) { return boost::multiprecision::sqrt(z.norm2()); }

Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }

Complex log(const Complex& z) { return {boost::multiprecision::log(abs(z)), arg(z)}; }

Complex exp(const Complex& z) {
  Real m = boost::multiprecision::exp(z.re);
  return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

}  // namespace picard

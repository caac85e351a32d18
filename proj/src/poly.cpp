#include "picard/poly.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "picard/linalg.hpp"

namespace picard {

QPoly::QPoly(std::vector<Rat> c) : c_(std::move(c)) { trim(); }

QPoly QPoly::monomial(const Rat& c, int deg) {
  std::vector<Rat> v(static_cast<std::size_t>(deg) + 1, Rat(0));
  v.back() = c;
  return QPoly(v);
}

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

QPoly QPoly::operator+(const QPoly& o) const {
  std::vector<Rat> r(std::max(c_.size(), o.c_.size()), Rat(0));
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return QPoly(r);
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + o * Rat(-1); }

QPoly QPoly::operator*(const QPoly& o) const {
  if (c_.empty() || o.c_.empty()) return {};
  std::vector<Rat> r(c_.size() + o.c_.size() - 1, Rat(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return QPoly(r);
}

QPoly QPoly::operator*(const Rat& s) const {
  std::vector<Rat> r = c_;
  for (auto& x : r) x *= s;
  return QPoly(r);
}

Rat QPoly::eval(const Rat& x) const {
  Rat acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex QPoly::eval(const Complex& x) const {
  Complex acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + Complex(to_real(*it));
  return acc;
}

QPoly QPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rat> r(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rat(static_cast<long>(i));
  return QPoly(r);
}

QPoly QPoly::monic() const {
  if (c_.empty()) return {};
  return *this * (1 / lead());
}

QPoly QPoly::compose(const QPoly& q) const {
  QPoly acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + QPoly({*it});
  return acc;
}

void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  std::vector<Rat> rem = a.coeffs();
  int db = b.degree();
  std::vector<Rat> quo(rem.size() > static_cast<std::size_t>(db) ? rem.size() - static_cast<std::size_t>(db) : 0, Rat(0));
  for (int i = static_cast<int>(rem.size()) - 1; i >= db; --i) {
    Rat f = rem[static_cast<std::size_t>(i)] / b.lead();
    quo[static_cast<std::size_t>(i - db)] = f;
    if (f == 0) continue;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(i - db + j)] -= f * b[static_cast<std::size_t>(j)];
  }
  q = QPoly(quo);
  rem.resize(static_cast<std::size_t>(std::max(db, 0)));
  r = QPoly(rem);
}

QPoly poly_gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly q, r;
    divmod(a, b, q, r);
    a = b;
    b = r;
  }
  return a.monic();
}

Rat resultant(const QPoly& f, const QPoly& g) {
  int m = f.degree(), n = g.degree();
  if (m < 0 || n < 0) return 0;
  if (m == 0) return rpow(f.lead(), n);
  if (n == 0) return rpow(g.lead(), m);
  std::size_t sz = static_cast<std::size_t>(m + n);
  QMatrix s(sz, QVector(sz, Rat(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + j)] = f[static_cast<std::size_t>(m - j)];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) s[static_cast<std::size_t>(n + i)][static_cast<std::size_t>(i + j)] = g[static_cast<std::size_t>(n - j)];
  return q_det(s);
}

Rat discriminant(const QPoly& f) {
  int d = f.degree();
  if (d < 1) throw std::domain_error("discriminant of constant");
  Rat r = resultant(f, f.derivative()) / f.lead();
  if ((d * (d - 1) / 2) % 2 != 0) r = -r;
  return r;
}

std::vector<Complex> numeric_roots(const QPoly& f) {
  int d = f.degree();
  if (d < 1) return {};
  unsigned bits = current_precision_bits();
  QPoly g = f.monic();
  Real bound = 1;
  for (int i = 0; i < d; ++i) {
    Real a = boost::multiprecision::abs(to_real(g[static_cast<std::size_t>(i)]));
    if (a + 1 > bound) bound = a + 1;
  }
  std::vector<Complex> z(static_cast<std::size_t>(d));
  Real pi = real_pi();
  for (int k = 0; k < d; ++k) {
    Real ang = 2 * pi * k / d + Real(0.4);
    z[static_cast<std::size_t>(k)] = Complex(bound * boost::multiprecision::cos(ang) * Real(0.9),
                                             bound * boost::multiprecision::sin(ang) * Real(0.9));
  }
  QPoly dg = g.derivative();
  Real eps = boost::multiprecision::ldexp(Real(1), -static_cast<int>(bits) + 16);
  for (int iter = 0; iter < 2000; ++iter) {
    Real maxstep = 0;
    for (int k = 0; k < d; ++k) {
      auto& zk = z[static_cast<std::size_t>(k)];
      Complex p = g.eval(zk), dp = dg.eval(zk);
      if (p.norm2() == 0) continue;
      Complex ratio = p / dp;
      Complex s;
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        Complex diff = zk - z[static_cast<std::size_t>(j)];
        if (diff.norm2() == 0) continue;
        s += Complex(Real(1)) / diff;
      }
      Complex step = ratio / (Complex(Real(1)) - ratio * s);
      zk = zk - step;
      Real st = abs(step) / (1 + abs(zk));
      if (st > maxstep) maxstep = st;
    }
    if (maxstep < eps) break;
  }
  // Newton polish.
  for (auto& zk : z) {
    for (int it = 0; it < 3; ++it) {
      Complex dp = dg.eval(zk);
      if (dp.norm2() == 0) break;
      zk = zk - g.eval(zk) / dp;
    }
  }
  return z;
}

std::vector<Rat> rational_roots(const QPoly& f) {
  std::vector<Rat> out;
  if (f.degree() < 1) return out;
  // Work with the squarefree part so numeric root finding converges.
  QPoly r;
  QPoly g = poly_gcd(f, f.derivative());
  QPoly sf = f;
  if (g.degree() > 0) divmod(f, g, sf, r);
  for (const auto& fac : factor_squarefree(sf))
    if (fac.degree() == 1) out.push_back(-fac[0] / fac[1]);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Integer content-free scaling bound for denominators of monic factors.
Int denominator_bound(const QPoly& f) {
  Int l = 1;
  for (const auto& c : f.coeffs()) l = lcm(l, c.get_den());
  // f * l has integer coefficients; monic factors of it have coefficients
  // with denominators dividing a power of its leading coefficient.
  Rat lc = f.lead() * l;
  Int a = abs(lc.get_num());
  return ipow(a, static_cast<unsigned>(std::max(1, f.degree()))) + 1;
}

}  // namespace

std::vector<QPoly> factor_squarefree(const QPoly& f0) {
  if (f0.degree() < 1) return {};
  QPoly f = f0.monic();
  if (poly_gcd(f, f.derivative()).degree() > 0) throw std::domain_error("polynomial not squarefree");
  std::vector<QPoly> out;
  unsigned bits = current_precision_bits();
  // Working precision scales with coefficient size.
  std::size_t cbits = 0;
  for (const auto& c : f.coeffs())
    cbits = std::max(cbits, mpz_sizeinbase(c.get_num().get_mpz_t(), 2) + mpz_sizeinbase(c.get_den().get_mpz_t(), 2));
  PrecisionScope scope(std::max<unsigned>(bits, static_cast<unsigned>(8 * cbits + 256)));
  Int maxden = denominator_bound(f);
  Real tol = boost::multiprecision::ldexp(Real(1), -static_cast<int>(current_precision_bits() / 3));

  while (f.degree() > 0) {
    if (f.degree() == 1) {
      out.push_back(f);
      break;
    }
    std::vector<Complex> roots = numeric_roots(f);
    int d = f.degree();
    bool found = false;
    for (int k = 1; k <= d / 2 && !found; ++k) {
      std::vector<int> idx(static_cast<std::size_t>(k));
      std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
        if (depth == k) {
          // Product of (x - r) over chosen roots.
          std::vector<Complex> prod{Complex(Real(1))};
          for (int i : idx) {
            std::vector<Complex> nxt(prod.size() + 1);
            for (std::size_t j = 0; j < prod.size(); ++j) {
              nxt[j + 1] += prod[j];
              nxt[j] += -(prod[j] * roots[static_cast<std::size_t>(i)]);
            }
            prod = nxt;
          }
          std::vector<Rat> coeffs;
          for (auto& c : prod) {
            if (boost::multiprecision::abs(c.im) > tol * (1 + boost::multiprecision::abs(c.re))) return false;
            auto q = recognize_rational(c.re, maxden, tol * (1 + boost::multiprecision::abs(c.re)));
            if (!q) return false;
            coeffs.push_back(*q);
          }
          QPoly cand(coeffs), quo, rem;
          divmod(f, cand, quo, rem);
          if (!rem.is_zero()) return false;
          out.push_back(cand);
          f = quo.monic();
          return true;
        }
        for (int i = start; i < d; ++i) {
          idx[static_cast<std::size_t>(depth)] = i;
          if (rec(i + 1, depth + 1)) return true;
        }
        return false;
      };
      found = rec(0, 0);
    }
    if (!found) {
      out.push_back(f);
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](const QPoly& a, const QPoly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int i = a.degree(); i >= 0; --i)
      if (a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)]) return a[static_cast<std::size_t>(i)] < b[static_cast<std::size_t>(i)];
    return false;
  });
  return out;
}

}  // namespace picard

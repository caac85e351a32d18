#include "picard/modq.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace picard {

namespace {

using u64 = std::uint64_t;
using Poly = std::vector<u64>;  // constant term first, trimmed

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, u64 q) {
  trim(a);
  u64 inv = invmod_u64(m.back(), q);
  while (a.size() >= m.size()) {
    u64 c = mulmod(a.back(), inv, q);
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + q - mulmod(c, m[i], q)) % q;
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, u64 q) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], q)) % q;
  return poly_mod(r, m, q);
}

Poly poly_powmod(Poly b, u64 e, const Poly& m, u64 q) {
  Poly acc{1};
  acc = poly_mod(acc, m, q);
  b = poly_mod(b, m, q);
  while (e) {
    if (e & 1) acc = poly_mulmod(acc, b, m, q);
    e >>= 1;
    if (e) b = poly_mulmod(b, b, m, q);
  }
  return acc;
}

Poly poly_gcd(Poly a, Poly b, u64 q) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, q);
    a = b;
    b = r;
  }
  if (!a.empty()) {
    u64 inv = invmod_u64(a.back(), q);
    for (auto& c : a) c = mulmod(c, inv, q);
  }
  return a;
}

Poly poly_div(Poly a, const Poly& b, u64 q) {
  trim(a);
  if (a.size() < b.size()) return {};
  Poly quo(a.size() - b.size() + 1, 0);
  u64 inv = invmod_u64(b.back(), q);
  while (a.size() >= b.size()) {
    u64 c = mulmod(a.back(), inv, q);
    std::size_t shift = a.size() - b.size();
    quo[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = (a[shift + i] + q - mulmod(c, b[i], q)) % q;
    trim(a);
  }
  return quo;
}

void split_roots(const Poly& f, u64 q, std::mt19937_64& rng, std::vector<u64>& out) {
  std::size_t d = f.size() - 1;
  if (d == 0) return;
  if (d == 1) {
    out.push_back((q - mulmod(f[0], invmod_u64(f[1], q), q)) % q);
    return;
  }
  if (q == 2) {
    for (u64 x = 0; x < 2; ++x) {
      u64 v = 0;
      for (std::size_t i = f.size(); i-- > 0;) v = (v * x + f[i]) % 2;
      if (v == 0) out.push_back(x);
    }
    return;
  }
  while (true) {
    u64 a = rng() % q;
    Poly h = poly_powmod(Poly{a, 1}, (q - 1) / 2, f, q);
    if (h.empty()) h = {0};
    h[0] = (h[0] + q - 1) % q;
    trim(h);
    Poly g = poly_gcd(f, h, q);
    if (g.size() > 1 && g.size() < f.size()) {
      split_roots(g, q, rng, out);
      split_roots(poly_div(f, g, q), q, rng, out);
      return;
    }
  }
}

}  // namespace

u64 mulmod(u64 a, u64 b, u64 q) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % q); }

std::vector<u64> roots_mod_q(const std::vector<Int>& f, u64 q) {
  Poly p;
  for (const auto& c : f) {
    Int r = c % Int(static_cast<unsigned long>(q));
    if (r < 0) r += static_cast<unsigned long>(q);
    p.push_back(r.get_ui());
  }
  trim(p);
  if (p.size() <= 1) return {};
  // Make monic, then gcd with x^q - x.
  u64 inv = invmod_u64(p.back(), q);
  for (auto& c : p) c = mulmod(c, inv, q);
  Poly xq = poly_powmod(Poly{0, 1}, q, p, q);
  xq.resize(std::max<std::size_t>(xq.size(), 2), 0);
  xq[1] = (xq[1] + q - 1) % q;
  trim(xq);
  Poly g = xq.empty() ? p : poly_gcd(p, xq, q);
  std::vector<u64> out;
  std::mt19937_64 rng(q);
  split_roots(g, q, rng, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<u64> prime_factors_u64(u64 n) {
  std::vector<u64> out;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

u64 primitive_root(u64 q) {
  if (q == 2) return 1;
  auto fac = prime_factors_u64(q - 1);
  for (u64 g = 2; g < q; ++g) {
    bool ok = true;
    for (u64 p : fac)
      if (powmod_u64(g, (q - 1) / p, q) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root");
}

u64 mult_order(u64 x, u64 q) {
  x %= q;
  if (x == 0) throw std::domain_error("order of zero");
  u64 ord = q - 1;
  for (u64 p : prime_factors_u64(q - 1))
    while (ord % p == 0 && powmod_u64(x, ord / p, q) == 1) ord /= p;
  return ord;
}

u64 discrete_log(u64 x, u64 g, u64 q) {
  x %= q;
  if (x == 0) throw std::domain_error("discrete log of zero");
  u64 n = q - 1;
  u64 result = 0, modulus = 1;
  for (u64 p : prime_factors_u64(n)) {
    u64 pe = 1;
    int e = 0;
    while (n % (pe * p) == 0) {
      pe *= p;
      ++e;
    }
    // Solve x^(n/pe) = (g^(n/pe))^k for k mod pe, one p-digit at a time.
    u64 gp = powmod_u64(g, n / p, q);  // order p
    std::unordered_map<u64, u64> baby;
    u64 m = 1;
    while (m * m < p) ++m;
    u64 cur = 1;
    for (u64 j = 0; j < m; ++j) {
      baby.emplace(cur, j);
      cur = mulmod(cur, gp, q);
    }
    u64 giant = powmod_u64(invmod_u64(gp, q), m, q);
    u64 k = 0, ppow = 1;
    for (int i = 0; i < e; ++i) {
      // h = (x * g^{-k})^{n / p^{i+1}}
      u64 gk = powmod_u64(invmod_u64(g, q), k, q);
      u64 h = powmod_u64(mulmod(x, gk, q), n / (ppow * p), q);
      u64 digit = 0;
      u64 y = h;
      bool found = false;
      for (u64 i2 = 0; i2 <= m; ++i2) {
        auto it = baby.find(y);
        if (it != baby.end()) {
          digit = i2 * m + it->second;
          found = true;
          break;
        }
        y = mulmod(y, giant, q);
      }
      if (!found) throw std::logic_error("discrete log failed");
      k += digit * ppow;
      ppow *= p;
    }
    // CRT combine result mod modulus with k mod pe.
    u64 inv = invmod_u64(modulus % pe, pe);
    u64 diff = (k % pe + pe - result % pe) % pe;
    u64 t = static_cast<u64>((static_cast<unsigned __int128>(diff) * inv) % pe);
    result += modulus * t;
    modulus *= pe;
  }
  return result % n;
}

SmithForm smith_form(std::vector<std::vector<Int>> a) {
  std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::vector<std::vector<Int>> u(rows, std::vector<Int>(rows, Int(0)));
  for (std::size_t i = 0; i < rows; ++i) u[i][i] = 1;
  auto row_op = [&](std::size_t dst, std::size_t src, const Int& f) {  // row dst -= f * row src
    for (std::size_t k = 0; k < cols; ++k) a[dst][k] -= f * a[src][k];
    for (std::size_t k = 0; k < rows; ++k) u[dst][k] -= f * u[src][k];
  };
  auto col_op = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t k = 0; k < rows; ++k) a[k][dst] -= f * a[k][src];
  };
  std::size_t r = std::min(rows, cols);
  for (std::size_t s = 0; s < r; ++s) {
    while (true) {
      // Pivot: smallest nonzero absolute value in the remaining block.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = s; i < rows; ++i)
        for (std::size_t j = s; j < cols; ++j)
          if (a[i][j] != 0 && (pi == rows || abs(a[i][j]) < abs(a[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) break;
      std::swap(a[pi], a[s]);
      std::swap(u[pi], u[s]);
      for (std::size_t k = 0; k < rows; ++k) std::swap(a[k][pj], a[k][s]);
      bool clean = true;
      for (std::size_t i = s + 1; i < rows; ++i) {
        if (a[i][s] == 0) continue;
        Int f;
        mpz_fdiv_q(f.get_mpz_t(), a[i][s].get_mpz_t(), a[s][s].get_mpz_t());
        row_op(i, s, f);
        if (a[i][s] != 0) clean = false;
      }
      for (std::size_t j = s + 1; j < cols; ++j) {
        if (a[s][j] == 0) continue;
        Int f;
        mpz_fdiv_q(f.get_mpz_t(), a[s][j].get_mpz_t(), a[s][s].get_mpz_t());
        col_op(j, s, f);
        if (a[s][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: the pivot must divide every remaining entry.
      bool divides = true;
      for (std::size_t i = s + 1; i < rows && divides; ++i)
        for (std::size_t j = s + 1; j < cols; ++j)
          if (a[i][j] % a[s][s] != 0) {
            // Add row i to row s and redo.
            for (std::size_t k = 0; k < cols; ++k) a[s][k] += a[i][k];
            for (std::size_t k = 0; k < rows; ++k) u[s][k] += u[i][k];
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a[s][s] < 0) {
      for (std::size_t k = 0; k < cols; ++k) a[s][k] = -a[s][k];
      for (std::size_t k = 0; k < rows; ++k) u[s][k] = -u[s][k];
    }
  }
  SmithForm out;
  out.U = u;
  for (std::size_t i = 0; i < r; ++i) out.diag.push_back(a[i][i]);
  return out;
}

}  // namespace picard

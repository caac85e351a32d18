#include "picard/arith.hpp"

#include <algorithm>
#include <stdexcept>

namespace picard {

int v3(const Int& x) {
  if (x == 0) throw std::domain_error("v3 of zero");
  Int y = abs(x);
  int k = 0;
  while (mpz_divisible_ui_p(y.get_mpz_t(), 3)) {
    y /= 3;
    ++k;
  }
  return k;
}

int v3(const Rat& x) {
  if (x == 0) throw std::domain_error("v3 of zero");
  return v3(x.get_num()) - v3(x.get_den());
}

Int strip3(const Int& x) {
  if (x == 0) return x;
  Int y = x;
  while (mpz_divisible_ui_p(y.get_mpz_t(), 3)) y /= 3;
  return y;
}

bool is_pm_power_of_3(const Rat& x) {
  if (x == 0) return false;
  return abs(strip3(x.get_num())) == 1 && strip3(x.get_den()) == 1;
}

bool is_3_integral(const Rat& x) { return strip3(x.get_den()) == 1; }

Rat pow3(int k) {
  Int p;
  mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(k < 0 ? -k : k));
  if (k >= 0) return Rat(p);
  Rat r(Int(1), p);
  return r;
}

Int ipow(const Int& b, unsigned e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Rat rpow(const Rat& b, int e) {
  if (e < 0) {
    if (b == 0) throw std::domain_error("negative power of zero");
    Rat inv = 1 / b;
    return rpow(inv, -e);
  }
  Rat r(ipow(b.get_num(), static_cast<unsigned>(e)), ipow(b.get_den(), static_cast<unsigned>(e)));
  r.canonicalize();
  return r;
}

std::optional<Int> exact_root(const Int& x, unsigned k) {
  if (x < 0 && k % 2 == 0) return std::nullopt;
  Int ax = abs(x), r;
  if (mpz_root(r.get_mpz_t(), ax.get_mpz_t(), k) == 0) return std::nullopt;
  return x < 0 ? Int(-r) : r;
}

std::optional<Rat> rational_cube_root(const Rat& x) {
  auto n = exact_root(x.get_num(), 3);
  auto d = exact_root(x.get_den(), 3);
  if (!n || !d) return std::nullopt;
  Rat r(*n, *d);
  r.canonicalize();
  return r;
}

bool is_rational_cube(const Rat& x) { return rational_cube_root(x).has_value(); }

std::string rat_to_string(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}

namespace {

Int pollard_rho(const Int& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Int x = 2, y = 2, d = 1;
    auto f = [&](const Int& v) {
      Int r = v * v + c;
      mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
      return r;
    };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      Int diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void factor_rec(const Int& n, std::vector<Int>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
    out.push_back(n);
    return;
  }
  Int d = pollard_rho(n);
  factor_rec(d, out);
  factor_rec(Int(n / d), out);
}

}  // namespace

std::vector<std::pair<Int, unsigned>> factor(const Int& n) {
  if (n == 0) throw std::domain_error("factor of zero");
  Int m = abs(n);
  std::vector<Int> primes;
  for (unsigned long p = 2; p < 10000 && m > 1; ++p) {
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      primes.push_back(Int(p));
      m /= p;
    }
  }
  factor_rec(m, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<Int, unsigned>> res;
  for (const auto& p : primes) {
    if (!res.empty() && res.back().first == p)
      ++res.back().second;
    else
      res.emplace_back(p, 1u);
  }
  return res;
}

std::vector<Int> divisors(const Int& n) {
  std::vector<Int> ds{1};
  for (const auto& [p, e] : factor(n)) {
    std::size_t cur = ds.size();
    Int pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < cur; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 r = 1, x = b % m;
  while (e) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(r);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * x % n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, nt = 1;
  std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
  while (nr != 0) {
    std::int64_t q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::domain_error("not invertible");
  return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(m) : t);
}

std::uint64_t mod_rat(const Rat& x, std::uint64_t q) {
  std::uint64_t n = mpz_fdiv_ui(x.get_num().get_mpz_t(), q);
  std::uint64_t d = mpz_fdiv_ui(x.get_den().get_mpz_t(), q);
  if (d == 0) throw std::domain_error("denominator divisible by modulus");
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(n) * invmod_u64(d, q) % q);
}

Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t pos_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace picard

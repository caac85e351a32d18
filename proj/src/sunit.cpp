#include "picard/sunit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>

#include <json.hpp>

#include "picard/linalg.hpp"
#include "picard/modq.hpp"

namespace picard {

namespace {

using boost::multiprecision::abs;
using u64 = std::uint64_t;

Real real_log(const Real& x) { return boost::multiprecision::log(x); }

Real log3() { return real_log(Real(3)); }

// Gauss-Jordan inverse of a small real matrix; throws when singular.
std::vector<std::vector<Real>> real_inverse(std::vector<std::vector<Real>> a) {
  std::size_t n = a.size();
  std::vector<std::vector<Real>> inv(n, std::vector<Real>(n, Real(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  Real tiny = boost::multiprecision::ldexp(Real(1), -static_cast<int>(current_precision_bits() / 2));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(a[r][c]) > abs(a[p][c])) p = r;
    if (abs(a[p][c]) < tiny) throw std::domain_error("singular logarithm matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Real piv = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= piv;
      inv[c][k] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      Real f = a[r][c];
      if (f == 0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// log |x|_{p_i} for every place i of S.
std::vector<Real> log_valuations(const NFElem& x) {
  const FieldSpec& f = x.field();
  std::vector<Real> out;
  out.push_back(-Real(ord_at_3(x)) * log3());
  for (int i = 1; i <= f.r1 + f.r2; ++i) {
    Real v = real_log(abs(embed_value(x, i)));
    out.push_back(i <= f.r1 ? v : 2 * v);
  }
  return out;
}

long pos_mod_long(long a, long m) { return ((a % m) + m) % m; }

bool tie(const Real& a, const Real& b) { return abs(a - b) <= Real("1e-40") * (1 + abs(a) + abs(b)); }

// Row-reduces a modulo p in place and returns the pivot columns.
std::vector<std::size_t> row_reduce_mod_p(std::vector<std::vector<long>>& a, long p) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  std::size_t rows = a.size(), cols = a[0].size(), rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && pos_mod_long(a[piv][c], p) == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    auto& pr = a[rank];
    long inv = static_cast<long>(invmod_u64(static_cast<u64>(pos_mod_long(pr[c], p)), static_cast<u64>(p)));
    for (auto& x : pr) x = pos_mod_long(x * inv, p);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      long f = pos_mod_long(a[r][c], p);
      if (f == 0) continue;
      for (std::size_t k = 0; k < cols; ++k) a[r][k] = pos_mod_long(a[r][k] - f * pr[k], p);
    }
    pivots.push_back(c);
    ++rank;
  }
  return pivots;
}

// Basis of {c : sum_i c_i a[i] = 0 mod p}, i.e. the left kernel of a.
std::vector<std::vector<long>> left_kernel_mod_p(const std::vector<std::vector<long>>& a, long p) {
  std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  std::vector<std::vector<long>> at(cols, std::vector<long>(rows));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) at[j][i] = a[i][j];
  if (cols == 0) {
    std::vector<std::vector<long>> all;
    for (std::size_t i = 0; i < rows; ++i) {
      all.emplace_back(rows, 0);
      all.back()[i] = 1;
    }
    return all;
  }
  auto piv = row_reduce_mod_p(at, p);
  std::vector<std::vector<long>> ker;
  for (std::size_t free = 0; free < rows; ++free) {
    if (std::find(piv.begin(), piv.end(), free) != piv.end()) continue;
    std::vector<long> v(rows, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = pos_mod_long(-at[r][free], p);
    ker.push_back(v);
  }
  return ker;
}

// Image of a field element at the degree-one prime (q, root r); nullopt
// when a denominator or the value vanishes modulo q.
std::optional<u64> reduce_at_root(const NFElem& x, u64 r, u64 q) {
  u64 acc = 0, pw = 1;
  for (const auto& c : x.coords()) {
    Int den = c.get_den();
    if (den % Int(static_cast<unsigned long>(q)) == 0) return std::nullopt;
    u64 v = mod_rat(c, q);
    acc = (acc + mulmod(v, pw, q)) % q;
    pw = mulmod(pw, r, q);
  }
  if (acc == 0) return std::nullopt;
  return acc;
}

bool bad_prime(const FieldSpec& f, u64 q) {
  if (q == 2 || q == 3) return true;
  Rat d = f.degree > 1 ? discriminant(f.min_poly_q()) : Rat(1);
  return d.get_num() % Int(static_cast<unsigned long>(q)) == 0;
}

}  // namespace

// ---------------- solutions and exponent vectors ----------------

SUnitSolution::SUnitSolution(ExponentVector x, ExponentVector y) {
  if (y < x) std::swap(x, y);
  tau0 = std::move(x);
  tau1 = std::move(y);
}

SUnitGroupSpec::SUnitGroupSpec(const FieldSpec& f, NFElem rho0, std::vector<NFElem> free_gens)
    : f_(&f), rho0_(std::move(rho0)), free_(std::move(free_gens)) {
  PrecisionScope ps(256);
  int t = static_cast<int>(free_.size());
  logm_.assign(static_cast<std::size_t>(t + 1), std::vector<Real>(static_cast<std::size_t>(t), Real(0)));
  for (int j = 0; j < t; ++j) {
    const auto& g = free_[static_cast<std::size_t>(j)];
    if (g.is_zero()) throw std::invalid_argument("zero generator");
    ords_.push_back(ord_at_3(g));
    auto lv = log_valuations(g);
    if (static_cast<int>(lv.size()) != t + 1) throw std::invalid_argument("rank does not match the number of places");
    for (int i = 0; i <= t; ++i) logm_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = lv[static_cast<std::size_t>(i)];
  }
}

const SUnitGroupSpec& SUnitGroupSpec::load(FieldLabel l) {
  static std::mutex mu;
  static std::map<FieldLabel, SUnitGroupSpec> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(l);
  if (it != cache.end()) return it->second;
  std::string path = data_dir() + "/sunit_groups.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  const FieldSpec& f = picard::field(l);
  auto parse = [&](const nlohmann::json& arr) {
    std::vector<Rat> c;
    for (const auto& x : arr) c.push_back(rat_from_string(x.get<std::string>()));
    return NFElem(f, c);
  };
  for (const auto& rec : j.at("groups")) {
    if (rec.at("field").get<std::string>() != to_string(l)) continue;
    std::vector<NFElem> gens;
    for (const auto& g : rec.at("free_gens")) gens.push_back(parse(g));
    SUnitGroupSpec spec(f, parse(rec.at("rho0")), gens);
    spec.validate();
    return cache.emplace(l, std::move(spec)).first->second;
  }
  throw std::runtime_error("no S-unit generators for " + to_string(l));
}

NFElem SUnitGroupSpec::value(const ExponentVector& v) const {
  NFElem acc = rho0_.pow(pos_mod_long(v.a0, w()));
  for (std::size_t j = 0; j < free_.size(); ++j)
    if (v.a[j] != 0) acc = acc * free_[j].pow(v.a[j]);
  return acc;
}

ExponentVector SUnitGroupSpec::normalize(ExponentVector v) const {
  v.a0 = static_cast<int>(pos_mod_long(v.a0, w()));
  return v;
}

std::optional<ExponentVector> SUnitGroupSpec::exponents_of(const NFElem& x) const {
  if (!is_s_unit(x)) return std::nullopt;
  int t = this->t();
  ExponentVector v;
  v.a.assign(static_cast<std::size_t>(t), 0);
  if (t > 0) {
    unsigned bits = 256;
    // Enough precision for the size of the exponents involved.
    for (const auto& c : x.coords())
      if (c != 0) bits = std::max<unsigned>(bits, 2 * static_cast<unsigned>(mpz_sizeinbase(c.get_num_mpz_t(), 2) + mpz_sizeinbase(c.get_den_mpz_t(), 2)) + 128);
    PrecisionScope ps(bits);
    auto lv = log_valuations(x);
    std::vector<std::vector<Real>> m(static_cast<std::size_t>(t), std::vector<Real>(static_cast<std::size_t>(t)));
    std::vector<std::vector<Real>> lm(static_cast<std::size_t>(t + 1), std::vector<Real>(static_cast<std::size_t>(t)));
    for (int j = 0; j < t; ++j) {
      auto gl = log_valuations(free_[static_cast<std::size_t>(j)]);
      for (int i = 0; i < t; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = gl[static_cast<std::size_t>(i)];
    }
    auto inv = real_inverse(m);
    for (int j = 0; j < t; ++j) {
      Real s = 0;
      for (int i = 0; i < t; ++i) s += inv[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * lv[static_cast<std::size_t>(i)];
      v.a[static_cast<std::size_t>(j)] = round_to_int(s).get_si();
    }
  }
  NFElem rest = x;
  for (int j = 0; j < t; ++j)
    if (v.a[static_cast<std::size_t>(j)] != 0) rest = rest / free_[static_cast<std::size_t>(j)].pow(v.a[static_cast<std::size_t>(j)]);
  NFElem p = NFElem::from_rat(*f_, 1);
  for (int k = 0; k < w(); ++k) {
    if (p == rest) {
      v.a0 = k;
      return v;
    }
    p = p * rho0_;
  }
  throw std::logic_error("S-unit not expressible in the generators");
}

void SUnitGroupSpec::validate() const {
  const std::string name = to_string(f_->label);
  if (!is_s_unit(rho0_)) throw std::runtime_error(name + ": rho0 is not an S-unit");
  for (const auto& g : free_)
    if (!is_s_unit(g)) throw std::runtime_error(name + ": generator is not an S-unit");
  NFElem one = NFElem::from_rat(*f_, 1);
  if (rho0_.pow(w()) != one) throw std::runtime_error(name + ": rho0^w != 1");
  for (u64 p : prime_factors_u64(static_cast<u64>(w())))
    if (rho0_.pow(w() / static_cast<long>(p)) == one) throw std::runtime_error(name + ": rho0 has order below w");
  if (t() != f_->r1 + f_->r2) throw std::runtime_error(name + ": wrong rank");
  PrecisionScope ps(256);
  std::vector<std::vector<Real>> minor(logm_.begin(), logm_.begin() + t());
  try {
    (void)real_inverse(minor);
  } catch (const std::domain_error&) {
    throw std::runtime_error(name + ": generators are multiplicatively dependent");
  }
  for (int h = 1; h <= t(); ++h) {
    bool ok = false;
    for (const auto& g : free_) {
      Complex z = embed_value(g, h);
      if (abs(z.im) > Real("1e-30") || z.re < 0) ok = true;
    }
    if (!ok) throw std::runtime_error(name + ": every generator is a positive real at place " + std::to_string(h));
  }
  saturation_primes();
}

std::vector<int> SUnitGroupSpec::saturation_primes() const {
  const std::string name = to_string(f_->label);
  // Index bound from the S-regulator against the lower bound 0.2052 for
  // regulators of number fields (times log 3 for the prime above 3).
  PrecisionScope ps(256);
  int t = this->t();
  std::vector<std::vector<Real>> minor(logm_.begin(), logm_.begin() + t);
  // Determinant by elimination.
  Real det = 1;
  {
    auto a = minor;
    std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (abs(a[r][c]) > abs(a[p][c])) p = r;
      std::swap(a[p], a[c]);
      if (p != c) det = -det;
      det *= a[c][c];
      for (std::size_t r = c + 1; r < n; ++r) {
        Real fct = a[r][c] / a[c][c];
        for (std::size_t k = c; k < n; ++k) a[r][k] -= fct * a[c][k];
      }
    }
  }
  Real bound = abs(det) / (Real("0.2052") * log3());
  long pmax = static_cast<long>(boost::multiprecision::floor(bound).convert_to<double>());
  std::vector<int> proven;
  for (long p = 2; p <= std::max(pmax, 3L); ++p) {
    if (!is_prime_u64(static_cast<u64>(p))) continue;
    std::vector<NFElem> gens;
    if (w() % p == 0) gens.push_back(rho0_);
    for (const auto& g : free_) gens.push_back(g);
    std::vector<std::vector<long>> chars(gens.size());
    int rank = 0;
    int used = 0;
    for (u64 q = static_cast<u64>(p) + 1; used < 400 && rank < static_cast<int>(gens.size()); q += static_cast<u64>(p)) {
      if (!is_prime_u64(q) || bad_prime(*f_, q)) continue;
      for (u64 r : roots_mod_q(f_->min_poly, q)) {
        u64 gq = primitive_root(q);
        u64 zeta = powmod_u64(gq, (q - 1) / static_cast<u64>(p), q);
        bool good = true;
        std::vector<long> col;
        for (const auto& g : gens) {
          auto v = reduce_at_root(g, r, q);
          if (!v) {
            good = false;
            break;
          }
          u64 c = powmod_u64(*v, (q - 1) / static_cast<u64>(p), q);
          long k = 0;
          u64 z = 1;
          while (z != c) {
            z = mulmod(z, zeta, q);
            ++k;
          }
          col.push_back(k);
        }
        if (!good) continue;
        ++used;
        for (std::size_t i = 0; i < gens.size(); ++i) chars[i].push_back(col[i]);
        auto tmp = chars;
        rank = static_cast<int>(row_reduce_mod_p(tmp, p).size());
        if (rank == static_cast<int>(gens.size())) break;
      }
    }
    if (rank != static_cast<int>(gens.size())) {
      // Characters left a subspace undecided: every product in it (modulo
      // p-th powers of generators) must fail to be a p-th power.
      auto ker = left_kernel_mod_p(chars, p);
      std::size_t combos = 1;
      for (std::size_t i = 0; i < ker.size(); ++i) combos *= static_cast<std::size_t>(p);
      for (std::size_t c = 1; c < combos; ++c) {
        std::vector<long> e(gens.size(), 0);
        std::size_t cc = c;
        for (const auto& kv : ker) {
          long m = static_cast<long>(cc % static_cast<std::size_t>(p));
          cc /= static_cast<std::size_t>(p);
          for (std::size_t i = 0; i < e.size(); ++i) e[i] = pos_mod_long(e[i] + m * kv[i], p);
        }
        NFElem prod = NFElem::from_rat(*f_, 1);
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i]) prod = prod * gens[i].pow(e[i]);
        if (nth_root(prod, static_cast<int>(p)))
          throw std::runtime_error(name + ": generators are not " + std::to_string(p) + "-saturated");
      }
    }
    proven.push_back(static_cast<int>(p));
  }
  return proven;
}

// ---------------- heights and extremal indices ----------------

long height_H(const ExponentVector& v) {
  long h = 0;
  for (long x : v.a) h = std::max(h, std::labs(x));
  return h;
}

long height_H(const SUnitSolution& s) { return std::max(height_H(s.tau0), height_H(s.tau1)); }

PlaceIndex extremal_index(const SUnitGroupSpec& g, const ExponentVector& v) {
  PrecisionScope ps(256);
  int t = g.t();
  const auto& m = g.log_matrix();
  std::vector<Real> l(static_cast<std::size_t>(t + 1), Real(0));
  for (int i = 0; i <= t; ++i)
    for (int j = 0; j < t; ++j) l[static_cast<std::size_t>(i)] += Real(v.a[static_cast<std::size_t>(j)]) * m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Real mn = l[0];
  for (const auto& x : l)
    if (x < mn) mn = x;
  int idx = 0;
  for (int i = 0; i <= t; ++i)
    if (tie(l[static_cast<std::size_t>(i)], mn)) idx = i;
  const FieldSpec& f = g.field();
  PlaceKind k = idx == 0 ? PlaceKind::Finite : (idx <= f.r1 ? PlaceKind::Real : PlaceKind::Complex);
  return {idx, k};
}

PlaceIndex extremal_index(const SUnitGroupSpec& g, const SUnitSolution& s) {
  long h0 = height_H(s.tau0), h1 = height_H(s.tau1);
  PlaceIndex e0 = extremal_index(g, s.tau0), e1 = extremal_index(g, s.tau1);
  if (h0 > h1) return e0;
  if (h1 > h0) return e1;
  return e0.index >= e1.index ? e0 : e1;
}

bool is_solution(const SUnitGroupSpec& g, const SUnitSolution& s) {
  return g.value(s.tau0) + g.value(s.tau1) == NFElem::from_rat(g.field(), 1);
}

std::set<SUnitSolution> cycle(const SUnitGroupSpec& g, const SUnitSolution& s) {
  int w = g.w();
  auto inv = [&](const ExponentVector& v) {
    ExponentVector r = v;
    r.a0 = static_cast<int>(pos_mod_long(-v.a0, w));
    for (auto& x : r.a) x = -x;
    return r;
  };
  auto mul = [&](const ExponentVector& a, const ExponentVector& b) {
    ExponentVector r = a;
    r.a0 = static_cast<int>(pos_mod_long(a.a0 + b.a0, w));
    for (std::size_t j = 0; j < r.a.size(); ++j) r.a[j] += b.a[j];
    return r;
  };
  auto neg = [&](const ExponentVector& a) {
    ExponentVector r = a;
    r.a0 = static_cast<int>(pos_mod_long(a.a0 + w / 2, w));
    return r;
  };
  const auto& t0 = s.tau0;
  const auto& t1 = s.tau1;
  std::set<SUnitSolution> out{s, SUnitSolution(inv(t0), neg(mul(inv(t0), t1))), SUnitSolution(neg(mul(t0, inv(t1))), inv(t1))};
  for (const auto& x : out)
    if (!is_solution(g, x)) throw std::logic_error("cycle produced a non-solution");
  return out;
}

// ---------------- bounds ----------------

Real compute_c3(const SUnitGroupSpec& g) {
  PrecisionScope ps(256);
  int t = g.t();
  const auto& m = g.log_matrix();
  Real worst = 0;
  for (int omit = 0; omit <= t; ++omit) {
    std::vector<std::vector<Real>> sub;
    for (int i = 0; i <= t; ++i)
      if (i != omit) sub.push_back(m[static_cast<std::size_t>(i)]);
    auto inv = real_inverse(sub);
    for (const auto& row : inv) {
      Real s = 0;
      for (const auto& x : row) s += abs(x);
      if (s > worst) worst = s;
    }
  }
  return 1 / (Real(t) * worst);
}

Real bw_constant(int t, int n) {
  Real fact = 1;
  for (int k = 2; k <= t + 2; ++k) fact *= k;
  return 18 * fact * boost::multiprecision::pow(Real(t + 1), Real(t + 2)) * boost::multiprecision::pow(Real(32 * n), Real(t + 3)) *
         real_log(Real(2 * (t + 1) * n));
}

Real modified_height(const NFElem& a, int place) {
  if (!is_s_unit(a)) throw std::invalid_argument("modified height implemented for S-units only");
  const FieldSpec& f = a.field();
  Real h0 = 0;
  for (int i = 1; i <= f.r1 + f.r2; ++i) {
    Real v = real_log(abs(embed_value(a, i)));
    if (v > 0) h0 += i <= f.r1 ? v : 2 * v;
  }
  int o = ord_at_3(a);
  if (o < 0) h0 += Real(-o) * log3();
  Real lg = abs(log(embed_value(a, place)));
  Real m = std::max({h0, lg, Real(1)});
  return m / f.degree;
}

Real modified_height_root_of_unity(int w, int degree) {
  Real lg = 2 * real_pi() / w;
  return std::max(lg, Real(1)) / degree;
}

BoundReport baker_bound(const SUnitGroupSpec& g) {
  PrecisionScope ps(256);
  BoundReport r;
  const FieldSpec& f = g.field();
  r.field = f.label;
  int t = g.t(), n = f.degree, w = g.w();
  r.c3 = compute_c3(g);
  Real log4 = real_log(Real(4));
  Real bw = bw_constant(t + 1, n);
  Real hz = modified_height_root_of_unity(w, n);
  r.C11 = 0;
  r.C15 = 0;
  for (int h = 1; h <= t; ++h) {
    bool real = h <= f.r1;
    Real c11 = real ? log4 / r.c3 : 2 * log4 / r.c3;
    Real c12 = 2;
    Real c13 = real ? r.c3 : r.c3 / 2;
    Real c14 = bw / n * hz;
    for (const auto& gen : g.free_gens()) c14 *= modified_height(gen, h);
    Real c15 = 2 / c13 * (real_log(c12) + c14 * real_log(Real(w) * (t + 2) * c14 / (2 * c13)));
    r.c11.push_back(c11);
    r.c12.push_back(c12);
    r.c13.push_back(c13);
    r.c14p.push_back(c14);
    r.c15p.push_back(c15);
    r.C11 = std::max(r.C11, c11);
    r.C15 = std::max(r.C15, c15);
  }
  r.C0 = std::max(r.C11, r.C15);
  return r;
}

std::optional<PlaceReduction> reduce_at_place(const SUnitGroupSpec& g, const BoundReport& r, const Real& C0, int place) {
  int t = g.t(), w = g.w();
  // Starting scale C ~ C0^{(t+1)/2}.
  Real c_start;
  {
    PrecisionScope ps(256);
    c_start = boost::multiprecision::pow(C0, Real(t + 1) / 2);
  }
  Int C = round_to_int(c_start);
  if (C < 1) C = 1;
  // At a real place Im(kappa_j) is 0 or pi, so the last row vanishes on a
  // rank-t sublattice and C1 only grows like C^{1/t}; the first round from
  // the Baker bound therefore needs C near C0^t rather than C0^{(t+1)/2}.
  const int retries = 200;
  for (int attempt = 0; attempt <= retries; ++attempt, C *= 2) {
    unsigned bits = std::max<unsigned>(256, static_cast<unsigned>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 128);
    PrecisionScope ps(bits);
    std::vector<Complex> kappa;
    for (const auto& gen : g.free_gens()) kappa.push_back(log(embed_value(gen, place)));
    // Put a generator with nonzero real part last.
    Real eps = Real("1e-30");
    if (abs(kappa.back().re) <= eps) {
      for (std::size_t j = 0; j + 1 < kappa.size(); ++j)
        if (abs(kappa[j].re) > eps) {
          std::swap(kappa[j], kappa.back());
          break;
        }
    }
    if (abs(kappa.back().re) <= eps) return std::nullopt;
    Real Cr = to_real(C);
    std::size_t dim = static_cast<std::size_t>(t + 1);
    std::vector<IntVector> rows(dim, IntVector(dim, Int(0)));
    for (std::size_t i = 0; i + 2 < dim; ++i) rows[i][i] = 1;
    for (std::size_t j = 0; j < static_cast<std::size_t>(t); ++j) {
      rows[dim - 2][j] = round_to_int(Cr * kappa[j].re);
      rows[dim - 1][j] = round_to_int(Cr * kappa[j].im);
    }
    rows[dim - 1][dim - 1] = round_to_int(Cr * 2 * real_pi() / w);
    IntLattice lat = IntLattice::from_matrix_columns(rows);
    if (lattice_det(lat) == 0) continue;
    IntLattice red = lll_reduce(lat);
    Real C1 = shortest_vector_lower_bound(red);
    Real T = (Real(w) + 2 + boost::multiprecision::sqrt(Real(2))) * t * C0 / 2;
    if (C1 * C1 <= T * T + Real(t - 1) * C0 * C0) continue;
    Real S = boost::multiprecision::sqrt(C1 * C1 - Real(t - 1) * C0 * C0);
    const Real& c12 = r.c12[static_cast<std::size_t>(place - 1)];
    const Real& c13 = r.c13[static_cast<std::size_t>(place - 1)];
    Real b = (real_log(Cr * c12) - real_log(S - T)) / c13;
    PlaceReduction out;
    out.C = C;
    out.C1 = C1;
    out.S_L = S;
    out.T_L = T;
    out.bound = boost::multiprecision::floor(b).convert_to<long>();
    return out;
  }
  return std::nullopt;
}

BoundReport reduce_bound(const SUnitGroupSpec& g, BoundReport report) {
  PrecisionScope ps(256);
  int t = g.t();
  long c11_floor = boost::multiprecision::floor(report.C11).convert_to<long>();
  Real C0 = report.C0;
  bool first = true;
  long best = 0;
  while (true) {
    std::vector<PlaceReduction> round;
    bool failed = false;
    for (int h = 1; h <= t; ++h) {
      auto pr = reduce_at_place(g, report, C0, h);
      if (!pr) {
        failed = true;
        break;
      }
      round.push_back(*pr);
    }
    if (failed) {
      if (first) throw BoundReductionError("no lattice scale satisfied the reduction condition for " + to_string(g.field().label));
      break;
    }
    long c0p = c11_floor;
    for (const auto& pr : round) c0p = std::max(c0p, pr.bound);
    if (!first && c0p >= best) break;
    report.C0_history.push_back(C0);
    report.C.clear();
    report.C1.clear();
    report.S_L.clear();
    report.T_L.clear();
    report.C0p_place.clear();
    for (const auto& pr : round) {
      report.C.push_back(pr.C);
      report.C1.push_back(pr.C1);
      report.S_L.push_back(pr.S_L);
      report.T_L.push_back(pr.T_L);
      report.C0p_place.push_back(pr.bound);
    }
    best = c0p;
    first = false;
    if (Real(c0p) >= C0) break;
    C0 = Real(c0p);
  }
  report.C0p = best;
  return report;
}

// ---------------- sieve ----------------

namespace {

// Data for one completely split prime q: roots of the defining polynomial,
// discrete logs of the generators at each root, and the Smith form of the
// image of the S-unit group in prod (F_q^*) = (Z/(q-1))^n.
struct SplitPrime {
  u64 q = 0, m = 0, g = 0;
  std::vector<u64> roots;
  std::vector<std::vector<u64>> L;  // L[i][j], j = 0 is rho0
  std::vector<std::vector<u64>> U;  // rows reduced modulo d[k]
  std::vector<u64> d;
  std::size_t kmax = 0;  // row with the largest invariant factor
};

std::optional<SplitPrime> make_split_prime(const SUnitGroupSpec& gs, u64 q) {
  const FieldSpec& f = gs.field();
  if (bad_prime(f, q)) return std::nullopt;
  auto roots = roots_mod_q(f.min_poly, q);
  if (static_cast<int>(roots.size()) != f.degree) return std::nullopt;
  SplitPrime sp;
  sp.q = q;
  sp.m = q - 1;
  sp.g = primitive_root(q);
  sp.roots = roots;
  std::vector<NFElem> gens{gs.rho0()};
  for (const auto& x : gs.free_gens()) gens.push_back(x);
  for (u64 r : roots) {
    std::vector<u64> row;
    for (const auto& x : gens) {
      auto v = reduce_at_root(x, r, q);
      if (!v) return std::nullopt;
      row.push_back(discrete_log(*v, sp.g, q));
    }
    sp.L.push_back(row);
  }
  std::size_t n = roots.size(), k = gens.size();
  std::vector<std::vector<Int>> a(n, std::vector<Int>(k + n, Int(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = Int(static_cast<unsigned long>(sp.L[i][j]));
    a[i][k + i] = Int(static_cast<unsigned long>(sp.m));
  }
  SmithForm sf = smith_form(a);
  for (std::size_t r = 0; r < n; ++r) {
    Int dk = sf.diag[r];
    u64 du = dk.get_ui();
    sp.d.push_back(du);
    std::vector<u64> row;
    for (std::size_t i = 0; i < n; ++i) {
      Int v = sf.U[r][i] % dk;
      if (v < 0) v += dk;
      row.push_back(v.get_ui());
    }
    sp.U.push_back(row);
    if (du > sp.d[sp.kmax]) sp.kmax = r;
  }
  return sp;
}

// Full membership of 1 - tau0 in the image, tau0 given by exponents.
bool passes(const SplitPrime& sp, const ExponentVector& v, const std::vector<u64>* dlog_table) {
  std::size_t n = sp.roots.size();
  std::vector<u64> dl(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned __int128 e = static_cast<u64>(v.a0) % sp.m * sp.L[i][0];
    for (std::size_t j = 0; j < v.a.size(); ++j) {
      long a = v.a[j];
      u64 am = static_cast<u64>(pos_mod_long(a, static_cast<long>(sp.m)));
      e += static_cast<unsigned __int128>(am) * sp.L[i][j + 1];
    }
    u64 ex = static_cast<u64>(e % sp.m);
    u64 x = powmod_u64(sp.g, ex, sp.q);
    u64 y = (1 + sp.q - x) % sp.q;
    if (y == 0) return false;
    dl[i] = dlog_table ? (*dlog_table)[y] : discrete_log(y, sp.g, sp.q);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (sp.d[k] <= 1) continue;
    unsigned __int128 s = 0;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<unsigned __int128>(sp.U[k][i]) * dl[i];
    if (s % sp.d[k] != 0) return false;
  }
  return true;
}

std::vector<u64> build_dlog_table(const SplitPrime& sp) {
  std::vector<u64> t(sp.q, 0);
  u64 x = 1;
  for (u64 e = 0; e < sp.m; ++e) {
    t[x] = e;
    x = mulmod(x, sp.g, sp.q);
  }
  return t;
}

struct PrimePlan {
  SplitPrime primary;
  std::vector<SplitPrime> filters;
};

PrimePlan choose_primes(const SUnitGroupSpec& gs, long bound) {
  const u64 limit = 1u << 20;
  PrimePlan plan;
  // Congruence primes: smallest split primes until lcm(q - 1) > 2 * bound.
  Int l = 1;
  for (u64 q = 5; plan.filters.size() < 40 && l <= 2 * bound; q += 2) {
    if (!is_prime_u64(q)) continue;
    auto sp = make_split_prime(gs, q);
    if (!sp) continue;
    l = lcm(l, Int(static_cast<unsigned long>(q - 1)));
    plan.filters.push_back(*sp);
  }
  // Strong primes: largest invariant factor of the quotient by the image.
  // The norm of any S-unit lies in <-1, 3>, so primes where 3 has small
  // order give a large quotient; the largest split primes below the limit
  // are also tried since the quotient is large whenever n > t + 1.
  std::vector<std::pair<double, u64>> cands;
  for (u64 q = 5; q < limit; q += 2) {
    if (!is_prime_u64(q) || bad_prime(gs.field(), q)) continue;
    u64 o3 = mult_order(3, q);
    u64 grp = (o3 % 2 == 0 && powmod_u64(3, o3 / 2, q) == q - 1) ? o3 : 2 * o3;
    cands.emplace_back(static_cast<double>(q - 1) / static_cast<double>(grp), q);
  }
  std::sort(cands.begin(), cands.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<SplitPrime> strong;
  std::size_t tried = 0;
  for (const auto& [ratio, q] : cands) {
    if (tried >= 4000 || strong.size() >= 12) break;
    ++tried;
    auto sp = make_split_prime(gs, q);
    if (sp) strong.push_back(*sp);
  }
  int found_large = 0;
  for (u64 q = limit - 1; q > 5 && found_large < 12; q -= 2) {
    if (!is_prime_u64(q)) continue;
    auto sp = make_split_prime(gs, q);
    if (sp) {
      strong.push_back(*sp);
      ++found_large;
    }
  }
  std::sort(strong.begin(), strong.end(), [](const SplitPrime& a, const SplitPrime& b) {
    if (a.d[a.kmax] != b.d[b.kmax]) return a.d[a.kmax] > b.d[b.kmax];
    return a.q < b.q;
  });
  if (strong.empty()) throw std::runtime_error("no split primes found");
  plan.primary = strong.front();
  for (std::size_t i = 1; i < strong.size() && i <= 6; ++i) plan.filters.insert(plan.filters.begin(), strong[i]);
  return plan;
}

}  // namespace

std::set<SUnitSolution> sieve_box(const SUnitGroupSpec& g, long bound, SieveStats* stats) {
  PrimePlan plan = choose_primes(g, bound);
  const SplitPrime& sp = plan.primary;
  const std::size_t n = sp.roots.size();
  const int t = g.t();
  const u64 m = sp.m, d = sp.d[sp.kmax];
  // Zech logarithms: zech[e] = dlog(1 - g^e), or -1 when g^e = 1.
  std::vector<std::int64_t> zech(m);
  {
    std::vector<u64> dl = build_dlog_table(sp);
    u64 x = 1;
    for (u64 e = 0; e < m; ++e) {
      u64 y = (1 + sp.q - x) % sp.q;
      zech[e] = y == 0 ? -1 : static_cast<std::int64_t>(dl[y]);
      x = mulmod(x, sp.g, sp.q);
    }
  }
  const std::vector<u64>& u = sp.U[sp.kmax];
  std::vector<ExponentVector> survivors;
  std::uint64_t candidates = 0;
  std::vector<long> a(static_cast<std::size_t>(t), 0);
  std::vector<u64> cur(n);
  std::function<void(int, std::vector<u64>&)> rec = [&](int level, std::vector<u64>& base) {
    // Level j handles free exponent a_j (1-based); base holds the partial
    // discrete logs of tau0 at each root.
    std::size_t j = static_cast<std::size_t>(level);
    std::vector<u64> step(n), e(n);
    for (std::size_t i = 0; i < n; ++i) {
      step[i] = sp.L[i][j];
      u64 back = static_cast<u64>((static_cast<unsigned __int128>(static_cast<u64>(bound) % m) * step[i]) % m);
      e[i] = (base[i] + m - back) % m;
    }
    if (level < t) {
      for (long x = -bound; x <= bound; ++x) {
        a[j - 1] = x;
        rec(level + 1, e);
        for (std::size_t i = 0; i < n; ++i) {
          e[i] += step[i];
          if (e[i] >= m) e[i] -= m;
        }
      }
      return;
    }
    for (long x = -bound; x <= bound; ++x) {
      ++candidates;
      u64 s = 0;
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        std::int64_t z = zech[e[i]];
        if (z < 0) {
          ok = false;
          break;
        }
        s += u[i] * static_cast<u64>(z);  // each term < 2^40, no overflow
      }
      if (ok && s % d == 0) {
        a[j - 1] = x;
        ExponentVector v;
        v.a = a;
        v.a0 = -1;  // filled by caller
        survivors.push_back(v);
      }
      for (std::size_t i = 0; i < n; ++i) {
        e[i] += step[i];
        if (e[i] >= m) e[i] -= m;
      }
    }
  };
  for (int a0 = 0; a0 < g.w(); ++a0) {
    std::size_t before = survivors.size();
    std::vector<u64> base(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = static_cast<u64>((static_cast<unsigned __int128>(a0) * sp.L[i][0]) % m);
    if (t == 0) {
      survivors.push_back(ExponentVector{a0, {}});
    } else {
      rec(1, base);
    }
    for (std::size_t k = before; k < survivors.size(); ++k) survivors[k].a0 = a0;
  }
  std::uint64_t primary_survivors = survivors.size();
  // Remaining primes, cheapest first.
  std::vector<std::vector<u64>> tables;
  for (const auto& fp : plan.filters) tables.push_back(fp.q < (1u << 17) ? build_dlog_table(fp) : std::vector<u64>{});
  std::vector<ExponentVector> kept;
  for (const auto& v : survivors) {
    bool ok = passes(sp, v, nullptr);
    for (std::size_t k = 0; ok && k < plan.filters.size(); ++k)
      ok = passes(plan.filters[k], v, tables[k].empty() ? nullptr : &tables[k]);
    if (ok) kept.push_back(v);
  }
  std::set<SUnitSolution> out;
  NFElem one = NFElem::from_rat(g.field(), 1);
  for (const auto& v : kept) {
    NFElem x = g.value(v);
    NFElem y = one - x;
    if (y.is_zero()) continue;
    auto ev = g.exponents_of(y);
    if (!ev) continue;
    SUnitSolution s(v, *ev);
    if (!is_solution(g, s)) throw std::logic_error("exponent recovery failed");
    out.insert(s);
  }
  if (stats) {
    stats->primes.clear();
    stats->primes.push_back(sp.q);
    for (const auto& fp : plan.filters) stats->primes.push_back(fp.q);
    stats->candidates = candidates;
    stats->survivors = primary_survivors;
    stats->verified = kept.size();
  }
  return out;
}

std::set<SUnitSolution> sieve_solve(const SUnitGroupSpec& g, long bound, SieveStats* stats) {
  std::set<SUnitSolution> raw = sieve_box(g, bound, stats);
  std::set<SUnitSolution> out;
  for (const auto& s : raw)
    for (const auto& c : cycle(g, s)) out.insert(c);
  return out;
}

std::set<SUnitSolution> brute_force(const SUnitGroupSpec& g, long bound) {
  std::set<SUnitSolution> out;
  int t = g.t();
  NFElem one = NFElem::from_rat(g.field(), 1);
  std::vector<long> a(static_cast<std::size_t>(t), -bound);
  while (true) {
    for (int a0 = 0; a0 < g.w(); ++a0) {
      ExponentVector v{a0, a};
      NFElem y = one - g.value(v);
      if (y.is_zero() || !is_s_unit(y)) continue;
      auto ev = g.exponents_of(y);
      if (ev && height_H(*ev) <= bound) out.insert(SUnitSolution(v, *ev));
    }
    std::size_t pos = 0;
    while (pos < a.size()) {
      if (++a[pos] <= bound) break;
      a[pos] = -bound;
      ++pos;
    }
    if (pos == a.size()) break;
  }
  return out;
}

long reference_C0p(FieldLabel l) {
  switch (l) {
    case FieldLabel::K0: return 3;
    case FieldLabel::K1: return 5;
    case FieldLabel::K2: return 217;
    case FieldLabel::K3: return 49;
    case FieldLabel::L3: return 243;
  }
  return 0;
}

double reference_C0(FieldLabel l) {
  switch (l) {
    case FieldLabel::K0: return 4.916825e9;
    case FieldLabel::K1: return 8.018712e9;
    case FieldLabel::K2: return 2.067269e19;
    case FieldLabel::K3: return 1.957261e15;
    case FieldLabel::L3: return 2.137374e19;
  }
  return 0;
}

int reference_solution_count(FieldLabel l) {
  switch (l) {
    case FieldLabel::K0: return 0;
    case FieldLabel::K1: return 4;
    case FieldLabel::K2: return 72;
    case FieldLabel::K3: return 0;
    case FieldLabel::L3: return 25;
  }
  return 0;
}

SolveResult solve_all(FieldLabel l) {
  const SUnitGroupSpec& g = SUnitGroupSpec::load(l);
  SolveResult res;
  res.report = reduce_bound(g, baker_bound(g));
  res.sieve_bound = std::max(res.report.C0p, reference_C0p(l));
  res.solutions = sieve_solve(g, res.sieve_bound, &res.stats);
  return res;
}

}  // namespace picard

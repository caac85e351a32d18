#include "picard/nf.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#ifndef PICARD_DATA_DIR_DEFAULT
#define PICARD_DATA_DIR_DEFAULT "data"
#endif

namespace picard {

namespace {

using boost::multiprecision::abs;

struct FixedField {
  FieldLabel label;
  const char* name;
  std::vector<long> min_poly;
  int r1, r2, w;
};

const std::vector<FixedField>& fixed_fields() {
  static const std::vector<FixedField> t{
      {FieldLabel::K0, "K0", {-1, 1}, 1, 0, 2},
      {FieldLabel::K1, "K1", {1, 1, 1}, 0, 1, 6},
      {FieldLabel::K2, "K2", {1, -3, 0, 1}, 3, 0, 2},
      {FieldLabel::K3, "K3", {-3, 0, 0, 1}, 1, 1, 2},
      {FieldLabel::L3, "L3", {3, 0, 0, 0, 0, 0, 1}, 0, 3, 6},
  };
  return t;
}

// min_poly mod 3 is a power of a single linear factor.
bool totally_ramified_at_3(const std::vector<Int>& f) {
  int n = static_cast<int>(f.size()) - 1;
  for (int c = 0; c < 3; ++c) {
    // Coefficients of f(x + c).
    QPoly p(std::vector<Rat>(f.begin(), f.end()));
    QPoly shifted = p.compose(QPoly({Rat(c), Rat(1)}));
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      Int v = shifted.coeff(i).get_num();
      if (v % 3 != 0) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

struct FieldTable {
  std::map<FieldLabel, FieldSpec> fields;
};

FieldTable load_fields() {
  std::string path = data_dir() + "/fields.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field data file " + path);
  nlohmann::json j;
  in >> j;
  FieldTable t;
  for (const auto& rec : j.at("fields")) {
    FieldSpec f;
    f.label = field_label_from_string(rec.at("label").get<std::string>());
    const FixedField* fx = nullptr;
    for (const auto& c : fixed_fields())
      if (c.label == f.label) fx = &c;
    for (const auto& c : rec.at("min_poly")) f.min_poly.emplace_back(c.get<long>());
    f.degree = rec.at("degree").get<int>();
    f.r1 = rec.at("signature").at(0).get<int>();
    f.r2 = rec.at("signature").at(1).get<int>();
    f.w = rec.at("w").get<int>();
    std::vector<Int> expect(fx->min_poly.begin(), fx->min_poly.end());
    if (f.min_poly != expect) throw std::runtime_error("min_poly mismatch for " + to_string(f.label));
    if (f.r1 != fx->r1 || f.r2 != fx->r2 || f.w != fx->w) throw std::runtime_error("signature mismatch for " + to_string(f.label));
    if (f.degree != f.r1 + 2 * f.r2 || static_cast<int>(f.min_poly.size()) != f.degree + 1)
      throw std::runtime_error("degree mismatch for " + to_string(f.label));
    if (!totally_ramified_at_3(f.min_poly)) throw std::runtime_error("3 not totally ramified in " + to_string(f.label));
    for (const auto& r : rec.at("roots")) f.root_strings.emplace_back(r.at(0).get<std::string>(), r.at(1).get<std::string>());
    if (static_cast<int>(f.root_strings.size()) != f.r1 + f.r2) throw std::runtime_error("root count mismatch");
    for (const auto& row : rec.at("s_integral_basis")) {
      QVector v;
      for (const auto& c : row) v.push_back(rat_from_string(c.get<std::string>()));
      if (static_cast<int>(v.size()) != f.degree) throw std::runtime_error("bad basis row");
      f.s_integral_basis.push_back(v);
    }
    f.s_integral_basis_inv = q_inverse(f.s_integral_basis);
    // Stored roots must be roots to roughly their printed accuracy, real
    // ones real, complex ones in the upper half plane.
    {
      PrecisionScope ps(256);
      QPoly mp = f.min_poly_q();
      for (int i = 0; i < f.r1 + f.r2; ++i) {
        Complex z(real_from_string(f.root_strings[static_cast<std::size_t>(i)].first),
                  real_from_string(f.root_strings[static_cast<std::size_t>(i)].second));
        if (abs(mp.eval(z)) > Real("1e-60")) throw std::runtime_error("stored root inaccurate for " + to_string(f.label));
        if (i < f.r1 && z.im != 0) throw std::runtime_error("real root with imaginary part");
        if (i >= f.r1 && z.im <= 0) throw std::runtime_error("complex root not in upper half plane");
      }
    }
    t.fields[f.label] = std::move(f);
  }
  for (const auto& c : fixed_fields())
    if (!t.fields.count(c.label)) throw std::runtime_error(std::string("field missing from data file: ") + c.name);
  return t;
}

const FieldTable& table() {
  static const FieldTable t = load_fields();
  return t;
}

Real eps_bits(unsigned bits) { return boost::multiprecision::ldexp(Real(1), -static_cast<int>(bits)); }

// Root at place i refined by Newton iteration to the current precision,
// with a bound on its distance to the true root.
struct RefinedRoot {
  Complex z;
  Real radius;
};

RefinedRoot refined_root(const FieldSpec& f, int place) {
  unsigned bits = current_precision_bits();
  using Key = std::tuple<int, int, unsigned>;
  thread_local std::map<Key, RefinedRoot> cache;
  Key key{static_cast<int>(f.label), place, bits};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  QPoly mp = f.min_poly_q();
  QPoly dmp = mp.derivative();
  const auto& rs = f.root_strings.at(static_cast<std::size_t>(place - 1));
  Complex z(real_from_string(rs.first), real_from_string(rs.second));
  Real tol = eps_bits(bits - 8);
  for (int iter = 0; iter < 64; ++iter) {
    Complex step = mp.eval(z) / dmp.eval(z);
    z = z - step;
    if (place <= f.r1) z.im = 0;
    if (abs(step) <= tol * (1 + abs(z))) break;
  }
  // Some root lies within degree * |f(z) / f'(z)| of z; the stored value
  // pins down which one.
  Real r = Real(f.degree) * abs(mp.eval(z)) / abs(dmp.eval(z)) + eps_bits(bits - 4) * (1 + abs(z));
  RefinedRoot rr{z, r};
  cache.emplace(key, rr);
  return rr;
}

std::vector<Real> solve_real(std::vector<std::vector<Real>> a, std::vector<Real> b) {
  std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(a[r][c]) > abs(a[p][c])) p = r;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    if (a[c][c] == 0) throw std::domain_error("singular real system");
    for (std::size_t r = c + 1; r < n; ++r) {
      Real fct = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= fct * a[c][k];
      b[r] -= fct * b[c];
    }
  }
  std::vector<Real> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Real s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

std::string to_string(FieldLabel l) {
  for (const auto& c : fixed_fields())
    if (c.label == l) return c.name;
  throw std::invalid_argument("unknown field label");
}

FieldLabel field_label_from_string(const std::string& s) {
  for (const auto& c : fixed_fields())
    if (s == c.name) return c.label;
  throw std::invalid_argument("unknown field label: " + s);
}

std::string data_dir() {
  if (const char* e = std::getenv("PICARD_DATA_DIR")) return e;
  return PICARD_DATA_DIR_DEFAULT;
}

const FieldSpec& field(FieldLabel l) { return table().fields.at(l); }

std::vector<PlaceIndex> FieldSpec::places() const {
  std::vector<PlaceIndex> p{{0, PlaceKind::Finite}};
  for (int i = 1; i <= r1; ++i) p.push_back({i, PlaceKind::Real});
  for (int i = r1 + 1; i <= r1 + r2; ++i) p.push_back({i, PlaceKind::Complex});
  return p;
}

QPoly FieldSpec::min_poly_q() const { return QPoly(std::vector<Rat>(min_poly.begin(), min_poly.end())); }

Complex FieldSpec::root(int place) const {
  if (place < 1 || place > r1 + r2) throw std::out_of_range("not an infinite place");
  return refined_root(*this, place).z;
}

std::vector<Complex> FieldSpec::all_roots() const {
  std::vector<Complex> out;
  for (int i = 1; i <= r1; ++i) out.push_back(root(i));
  for (int i = r1 + 1; i <= r1 + r2; ++i) {
    Complex z = root(i);
    out.push_back(z);
    out.push_back(z.conj());
  }
  return out;
}

// ---- elements ----

NFElem::NFElem(const FieldSpec& f, std::vector<Rat> coords) : f_(&f), c_(std::move(coords)) {
  if (static_cast<int>(c_.size()) != f.degree) throw std::invalid_argument("coordinate vector has wrong length");
}

NFElem NFElem::from_rat(const FieldSpec& f, const Rat& x) {
  std::vector<Rat> c(static_cast<std::size_t>(f.degree), Rat(0));
  c[0] = x;
  return NFElem(f, c);
}

NFElem NFElem::gen(const FieldSpec& f) {
  if (f.degree == 1) return from_rat(f, -Rat(f.min_poly[0]));
  std::vector<Rat> c(static_cast<std::size_t>(f.degree), Rat(0));
  c[1] = 1;
  return NFElem(f, c);
}

bool NFElem::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool NFElem::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rat NFElem::rational_value() const {
  if (!is_rational()) throw std::domain_error("element is not rational");
  return c_[0];
}

void NFElem::check_same(const NFElem& o) const {
  if (f_ == nullptr || o.f_ == nullptr || f_->label != o.f_->label) throw std::invalid_argument("field mismatch");
}

NFElem NFElem::operator+(const NFElem& o) const {
  check_same(o);
  std::vector<Rat> r = c_;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += o.c_[i];
  return NFElem(*f_, r);
}

NFElem NFElem::operator-(const NFElem& o) const {
  check_same(o);
  std::vector<Rat> r = c_;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= o.c_[i];
  return NFElem(*f_, r);
}

NFElem NFElem::operator-() const {
  std::vector<Rat> r = c_;
  for (auto& x : r) x = -x;
  return NFElem(*f_, r);
}

NFElem NFElem::operator*(const NFElem& o) const {
  check_same(o);
  std::size_t n = c_.size();
  std::vector<Rat> r(2 * n - 1, Rat(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (o.c_[j] != 0) r[i + j] += c_[i] * o.c_[j];
  }
  const auto& m = f_->min_poly;
  for (std::size_t k = 2 * n - 1; k-- > n;) {
    if (r[k] == 0) continue;
    Rat top = r[k];
    r[k] = 0;
    for (std::size_t i = 0; i < n; ++i) r[k - n + i] -= top * m[i];
  }
  r.resize(n);
  return NFElem(*f_, r);
}

NFElem NFElem::operator*(const Rat& s) const {
  std::vector<Rat> r = c_;
  for (auto& x : r) x *= s;
  return NFElem(*f_, r);
}

QMatrix NFElem::mult_matrix() const {
  std::size_t n = c_.size();
  QMatrix m(n, QVector(n, Rat(0)));
  NFElem col = *this;
  NFElem th = gen(*f_);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) m[i][j] = col.c_[i];
    if (j + 1 < n) col = col * th;
  }
  return m;
}

NFElem NFElem::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero in number field");
  std::size_t n = c_.size();
  QVector e(n, Rat(0));
  e[0] = 1;
  return NFElem(*f_, q_solve(mult_matrix(), e));
}

NFElem NFElem::operator/(const NFElem& o) const {
  check_same(o);
  return *this * o.inverse();
}

NFElem NFElem::pow(long e) const {
  NFElem base = e < 0 ? inverse() : *this;
  unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  NFElem acc = from_rat(*f_, 1);
  while (k) {
    if (k & 1) acc = acc * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return acc;
}

bool NFElem::operator==(const NFElem& o) const {
  check_same(o);
  return c_ == o.c_;
}

NFElem nf_arith(const NFElem& a, const NFElem& b, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
  }
  throw std::invalid_argument("bad op");
}

Rat norm(const NFElem& a) {
  const FieldSpec& f = a.field();
  if (a.is_zero()) return 0;
  // Res(m, g) = prod g(roots of m) for monic m.
  return resultant(f.min_poly_q(), QPoly(a.coords()));
}

QPoly charpoly(const NFElem& a) { return QPoly(q_charpoly(a.mult_matrix())); }

int ord_at_3(const NFElem& a) {
  if (a.is_zero()) throw std::domain_error("valuation of zero");
  return v3(norm(a));
}

bool is_s_integral(const NFElem& a) {
  const FieldSpec& f = a.field();
  QVector c(a.coords());
  QVector d(c.size(), Rat(0));
  // Row vector times inverse basis matrix gives coordinates in the basis.
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t i = 0; i < c.size(); ++i) d[j] += c[i] * f.s_integral_basis_inv[i][j];
  for (const auto& x : d)
    if (x != 0 && !is_3_integral(x)) return false;
  return true;
}

bool is_s_unit(const NFElem& a) {
  if (a.is_zero()) return false;
  if (!is_pm_power_of_3(norm(a))) return false;
  return is_s_integral(a) && is_s_integral(a.inverse());
}

Real s_norm(const NFElem& a) {
  if (a.is_zero()) throw std::domain_error("s_norm of zero");
  Rat nm = norm(a);
  Rat stripped = nm / pow3(v3(nm));
  Real v = abs(to_real(stripped));
  return boost::multiprecision::pow(v, Real(1) / Real(a.field().degree));
}

Embedding embed(const NFElem& a, const PlaceIndex& place, unsigned precision_bits) {
  const FieldSpec& f = a.field();
  if (place.kind == PlaceKind::Finite || place.index < 1 || place.index > f.r1 + f.r2)
    throw std::invalid_argument("embedding requires an infinite place");
  PrecisionScope ps(precision_bits + 32);
  RefinedRoot rr = refined_root(f, place.index);
  const auto& c = a.coords();
  Complex v;
  for (std::size_t k = c.size(); k-- > 0;) v = v * rr.z + Complex(to_real(c[k]));
  // Perturbation of the root plus rounding in Horner's scheme.
  Real zr = abs(rr.z) + rr.radius;
  Real pert = 0, mag = 0, zp = 1, zpm1 = 1;
  for (std::size_t k = 0; k < c.size(); ++k) {
    Real ck = abs(to_real(c[k]));
    if (k >= 1) pert += ck * Real(static_cast<long>(k)) * zpm1 * rr.radius;
    mag += ck * zp;
    zpm1 = zp;
    zp *= zr;
  }
  Real rounding = mag * Real(static_cast<long>(4 * c.size() + 4)) * eps_bits(precision_bits + 32);
  return Embedding{v, pert + rounding};
}

Complex embed_value(const NFElem& a, int place) {
  Complex z = refined_root(a.field(), place).z;
  const auto& c = a.coords();
  Complex v;
  for (std::size_t k = c.size(); k-- > 0;) v = v * z + Complex(to_real(c[k]));
  return v;
}

std::vector<Complex> embed_all(const NFElem& a) {
  const FieldSpec& f = a.field();
  std::vector<Complex> out;
  for (int i = 1; i <= f.r1; ++i) out.push_back(embed_value(a, i));
  for (int i = f.r1 + 1; i <= f.r1 + f.r2; ++i) {
    Complex z = embed_value(a, i);
    out.push_back(z);
    out.push_back(z.conj());
  }
  return out;
}

NFElem eval_at(const QPoly& p, const NFElem& x) {
  NFElem acc = NFElem::from_rat(x.field(), 0);
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) acc = acc * x + NFElem::from_rat(x.field(), *it);
  return acc;
}

namespace {

// Field elements whose embedding at each infinite place is one of the given
// candidate values, recovered by a real linear solve on power-basis
// coordinates and rational recognition; accept() decides exactly.
void search_by_embeddings(const FieldSpec& f, const std::vector<std::vector<Complex>>& cands, unsigned bits,
                          const std::function<bool(const NFElem&)>& accept, std::set<std::vector<Rat>>& seen,
                          std::vector<NFElem>& out) {
  int n = f.degree;
  int nplaces = f.r1 + f.r2;
  // Real parts at real places, real and imaginary parts at complex places.
  std::vector<std::vector<Real>> rows;
  for (int i = 1; i <= nplaces; ++i) {
    Complex z = f.root(i);
    std::vector<Real> re(static_cast<std::size_t>(n)), im(static_cast<std::size_t>(n));
    Complex zp(Real(1));
    for (int k = 0; k < n; ++k) {
      re[static_cast<std::size_t>(k)] = zp.re;
      im[static_cast<std::size_t>(k)] = zp.im;
      zp = zp * z;
    }
    rows.push_back(re);
    if (i > f.r1) rows.push_back(im);
  }
  Real small = boost::multiprecision::ldexp(Real(1), -static_cast<int>(bits / 3));
  Int maxden = Int(1) << static_cast<unsigned long>(bits / 3);
  for (const auto& c : cands)
    if (c.empty()) return;
  std::vector<std::size_t> idx(static_cast<std::size_t>(nplaces), 0);
  while (true) {
    std::vector<Real> b;
    for (int i = 0; i < nplaces; ++i) {
      const Complex& z = cands[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
      b.push_back(z.re);
      if (i >= f.r1) b.push_back(z.im);
    }
    std::vector<Real> x = solve_real(rows, b);
    std::vector<Rat> coords;
    bool ok = true;
    for (const auto& xi : x) {
      auto q = recognize_rational(xi, maxden, small * (1 + abs(xi)));
      if (!q) {
        ok = false;
        break;
      }
      coords.push_back(*q);
    }
    if (ok && !seen.count(coords)) {
      NFElem cand(f, coords);
      if (accept(cand)) {
        seen.insert(coords);
        out.push_back(cand);
      }
    }
    std::size_t pos = 0;
    while (pos < idx.size()) {
      if (++idx[pos] < cands[pos].size()) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == idx.size()) break;
  }
}

std::size_t coeff_bits(const std::vector<Rat>& cs) {
  std::size_t cbits = 0;
  for (const auto& c : cs)
    cbits = std::max(cbits, mpz_sizeinbase(c.get_num().get_mpz_t(), 2) + mpz_sizeinbase(c.get_den().get_mpz_t(), 2));
  return cbits;
}

}  // namespace

std::vector<NFElem> roots_in_field(const QPoly& p0, const FieldSpec& f) {
  std::vector<NFElem> out;
  if (p0.degree() < 1) return out;
  QPoly g = poly_gcd(p0, p0.derivative()), p = p0, rem;
  if (g.degree() > 0) divmod(p0, g, p, rem);
  p = p.monic();
  if (f.degree == 1) {
    for (const auto& r : rational_roots(p)) out.push_back(NFElem::from_rat(f, r));
    return out;
  }
  // Rational factors contribute rational roots; only the rest needs the search.
  std::set<std::vector<Rat>> seen;
  for (const auto& r : rational_roots(p)) {
    out.push_back(NFElem::from_rat(f, r));
    seen.insert(out.back().coords());
  }
  unsigned bits = std::max<unsigned>(current_precision_bits(), static_cast<unsigned>(8 * coeff_bits(p.coeffs()) + 384));
  PrecisionScope ps(bits);
  std::vector<Complex> roots = numeric_roots(p);
  Real small = boost::multiprecision::ldexp(Real(1), -static_cast<int>(bits / 3));
  int nplaces = f.r1 + f.r2;
  std::vector<std::vector<Complex>> cands(static_cast<std::size_t>(nplaces));
  for (int i = 0; i < nplaces; ++i)
    for (const auto& z : roots)
      if (i >= f.r1 || abs(z.im) < small) cands[static_cast<std::size_t>(i)].push_back(i < f.r1 ? Complex(z.re) : z);
  search_by_embeddings(f, cands, bits, [&](const NFElem& c) { return eval_at(p, c).is_zero(); }, seen, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<NFElem> nth_root(const NFElem& x, int k) {
  if (k < 1) throw std::invalid_argument("nth_root: k must be positive");
  const FieldSpec& f = x.field();
  if (x.is_zero()) return x;
  if (f.degree == 1) {
    Rat q = x.rational_value();
    Int num = q.get_num(), den = q.get_den();
    bool neg = num < 0;
    if (neg && k % 2 == 0) return std::nullopt;
    if (neg) num = -num;
    auto rn = exact_root(num, static_cast<unsigned>(k));
    auto rd = exact_root(den, static_cast<unsigned>(k));
    if (!rn || !rd) return std::nullopt;
    return NFElem::from_rat(f, Rat(neg ? Int(-*rn) : *rn, *rd));
  }
  unsigned bits = std::max<unsigned>(current_precision_bits(), static_cast<unsigned>(8 * coeff_bits(x.coords()) / static_cast<unsigned>(k) + 384));
  PrecisionScope ps(bits);
  int nplaces = f.r1 + f.r2;
  std::vector<std::vector<Complex>> cands(static_cast<std::size_t>(nplaces));
  Real two_pi = 2 * real_pi();
  for (int i = 1; i <= nplaces; ++i) {
    Complex z = embed_value(x, i);
    Real r = boost::multiprecision::pow(abs(z), Real(1) / k);
    Real a = arg(z) / k;
    auto& c = cands[static_cast<std::size_t>(i - 1)];
    for (int j = 0; j < k; ++j) {
      Real ang = a + two_pi * j / k;
      Complex y(r * boost::multiprecision::cos(ang), r * boost::multiprecision::sin(ang));
      if (i <= f.r1) {
        // Real place: keep only real roots.
        if (abs(y.im) > r * Real("1e-30")) continue;
        y = Complex(y.re);
      }
      c.push_back(y);
    }
  }
  std::set<std::vector<Rat>> seen;
  std::vector<NFElem> out;
  search_by_embeddings(f, cands, bits, [&](const NFElem& c) { return c.pow(k) == x; }, seen, out);
  if (out.empty()) return std::nullopt;
  std::sort(out.begin(), out.end());
  return out.front();
}

const std::vector<NFElem>& automorphism_images(const FieldSpec& f) {
  static std::mutex mu;
  static std::map<FieldLabel, std::vector<NFElem>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(f.label);
  if (it != cache.end()) return it->second;
  std::vector<NFElem> imgs = roots_in_field(f.min_poly_q(), f);
  NFElem th = NFElem::gen(f);
  std::stable_partition(imgs.begin(), imgs.end(), [&](const NFElem& x) { return x == th; });
  return cache.emplace(f.label, imgs).first->second;
}

NFElem apply_automorphism(const NFElem& sigma_theta, const NFElem& a) {
  return eval_at(QPoly(a.coords()), sigma_theta);
}

}  // namespace picard

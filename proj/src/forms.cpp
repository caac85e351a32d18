#include "picard/forms.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace picard {

namespace {

Int int_gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// g = s a + t b.
Int int_gcdext(const Int& a, const Int& b, Int& s, Int& t) {
  Int g;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// Coefficient vectors of homogeneous polynomials, indexed by the X power.
template <class T>
std::vector<T> hmul(const std::vector<T>& p, const std::vector<T>& q, const T& zero) {
  std::vector<T> r(p.size() + q.size() - 1, zero);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] = r[i + j] + p[i] * q[j];
  return r;
}

// 2x2 matrix over the closure field.
struct NMat2 {
  NFElem a, b, c, d;
  NMat2 operator*(const NMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  NMat2 operator+(const NMat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  NFElem det() const { return a * d - b * c; }
  NMat2 inverse() const {
    NFElem di = det().inverse();
    return {d * di, -b * di, -c * di, a * di};
  }
  bool operator==(const NMat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  FactorVector apply(const FactorVector& v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
};

NMat2 lift(const FieldSpec& m, const QMat2& q) {
  return {NFElem::from_rat(m, q.a), NFElem::from_rat(m, q.b), NFElem::from_rat(m, q.c), NFElem::from_rat(m, q.d)};
}

// Projective point (X : Z) in P^1(M).
using P1 = std::array<NFElem, 2>;

// Matrix sending e1, e2, (1, 1) to multiples of p, q, s.
std::optional<NMat2> frame_matrix(const P1& p, const P1& q, const P1& s) {
  NFElem dd = p[0] * q[1] - q[0] * p[1];
  if (dd.is_zero()) return std::nullopt;
  // s = x p + y q.
  NFElem x = (s[0] * q[1] - q[0] * s[1]) / dd;
  NFElem y = (p[0] * s[1] - s[0] * p[1]) / dd;
  if (x.is_zero() || y.is_zero()) return std::nullopt;
  return NMat2{p[0] * x, q[0] * y, p[1] * x, q[1] * y};
}

// Rational primitive integral matrix proportional to u, if one exists.
std::optional<QMat2> rational_primitive(const NMat2& u) {
  std::array<const NFElem*, 4> e{&u.a, &u.b, &u.c, &u.d};
  const NFElem* piv = nullptr;
  for (auto* x : e)
    if (!x->is_zero()) {
      piv = x;
      break;
    }
  if (!piv) return std::nullopt;
  NFElem inv = piv->inverse();
  std::array<Rat, 4> q;
  for (std::size_t i = 0; i < 4; ++i) {
    NFElem y = *e[i] * inv;
    if (!y.is_rational()) return std::nullopt;
    q[i] = y.rational_value();
  }
  Int den = 1, num = 0;
  for (auto& x : q) den = lcm(den, Int(x.get_den()));
  for (auto& x : q) num = int_gcd(num, Int(Rat(x * den).get_num()));
  for (auto& x : q) x = x * den / num;
  return QMat2{q[0], q[1], q[2], q[3]};
}

Int prime_to_3_part(const Rat& x) {
  Int n = x.get_num();
  Int d = x.get_den();
  n = strip3(n);
  d = strip3(d);
  if (n < 0) n = -n;
  return n * d;
}

}  // namespace

// ---------------------------------------------------------------- BinaryForm

BinaryForm::BinaryForm(std::vector<Rat> low_to_high) : a_(std::move(low_to_high)) {
  if (a_.empty()) throw std::invalid_argument("binary form needs at least one coefficient");
}

BinaryForm BinaryForm::from_high(const std::vector<Rat>& h) { return BinaryForm(std::vector<Rat>(h.rbegin(), h.rend())); }

BinaryForm BinaryForm::linear(const Rat& x_coeff, const Rat& z_coeff) { return BinaryForm({z_coeff, x_coeff}); }

std::vector<Rat> BinaryForm::coeffs_high() const { return std::vector<Rat>(a_.rbegin(), a_.rend()); }

bool BinaryForm::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Rat& x) { return x == 0; });
}

QPoly BinaryForm::dehomogenize() const { return QPoly(a_); }

BinaryForm BinaryForm::homogenize(const QPoly& p, int degree) {
  if (p.degree() > degree) throw std::invalid_argument("homogenize: degree too small");
  std::vector<Rat> a(static_cast<std::size_t>(degree + 1), Rat(0));
  for (int i = 0; i <= p.degree(); ++i) a[static_cast<std::size_t>(i)] = p.coeff(i);
  return BinaryForm(a);
}

Rat BinaryForm::eval(const Rat& x, const Rat& z) const {
  Rat acc = 0;
  int r = degree();
  for (int i = 0; i <= r; ++i) acc += a_[static_cast<std::size_t>(i)] * rpow(x, i) * rpow(z, r - i);
  return acc;
}

BinaryForm BinaryForm::operator*(const BinaryForm& o) const { return BinaryForm(hmul(a_, o.a_, Rat(0))); }

BinaryForm BinaryForm::operator*(const Rat& s) const {
  std::vector<Rat> r = a_;
  for (auto& x : r) x *= s;
  return BinaryForm(r);
}

BinaryForm BinaryForm::primitive() const {
  if (is_zero()) throw std::invalid_argument("primitive: zero form");
  Int den = 1, num = 0;
  for (const auto& x : a_) den = lcm(den, Int(x.get_den()));
  for (const auto& x : a_) num = int_gcd(num, Int(Rat(x * den).get_num()));
  Rat s = Rat(den) / Rat(num);
  for (auto it = a_.rbegin(); it != a_.rend(); ++it)
    if (*it != 0) {
      if (*it < 0) s = -s;
      break;
    }
  return *this * s;
}

std::string BinaryForm::to_string() const {
  std::ostringstream os;
  os << "[";
  auto h = coeffs_high();
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? ", " : "") << rat_to_string(h[i]);
  os << "]";
  return os.str();
}

QMat2 QMat2::operator*(const QMat2& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Rat discriminant(const BinaryForm& f) {
  int r = f.degree();
  if (r < 2) throw std::invalid_argument("discriminant needs degree >= 2");
  if (f.is_zero()) return 0;
  // F(X, tX + Z) has the same discriminant and leading coefficient F(1, t).
  for (int t = 0;; ++t) {
    if (f.eval(1, t) == 0) continue;
    BinaryForm g = t == 0 ? f : act(f, QMat2{1, 0, t, 1});
    return discriminant(g.dehomogenize());
  }
}

BinaryForm act(const BinaryForm& f, const QMat2& u, const Rat& lambda) {
  if (u.det() == 0) throw std::invalid_argument("act: singular matrix");
  int r = f.degree();
  std::vector<Rat> x{u.b, u.a}, z{u.d, u.c};
  std::vector<std::vector<Rat>> xp{{Rat(1)}}, zp{{Rat(1)}};
  for (int i = 1; i <= r; ++i) {
    xp.push_back(hmul(xp.back(), x, Rat(0)));
    zp.push_back(hmul(zp.back(), z, Rat(0)));
  }
  std::vector<Rat> out(static_cast<std::size_t>(r + 1), Rat(0));
  for (int i = 0; i <= r; ++i) {
    if (f.coeff(i) == 0) continue;
    auto term = hmul(xp[static_cast<std::size_t>(i)], zp[static_cast<std::size_t>(r - i)], Rat(0));
    for (int k = 0; k <= r; ++k) out[static_cast<std::size_t>(k)] += lambda * f.coeff(i) * term[static_cast<std::size_t>(k)];
  }
  return BinaryForm(out);
}

bool good_reduction_outside_3(const BinaryForm& f) {
  if (f.is_zero()) throw std::invalid_argument("good_reduction_outside_3: zero form");
  if (f.degree() == 1) {
    BinaryForm p = f.primitive();
    // Coefficients generate Z[1/3] iff the content is a power of 3.
    Rat content = f.coeff(0) != 0 ? f.coeff(0) / p.coeff(0) : f.coeff(1) / p.coeff(1);
    return is_pm_power_of_3(content);
  }
  Rat d = discriminant(f);
  return d != 0 && is_pm_power_of_3(d);
}

// --------------------------------------------------------------- FieldSystem

FieldSystem::FieldSystem(std::vector<FieldLabel> comps) {
  if (comps.empty()) throw std::invalid_argument("empty field system");
  int n0 = 0;
  bool k1 = false, k2 = false, k3 = false;
  for (auto l : comps) {
    switch (l) {
      case FieldLabel::K0: ++n0; break;
      case FieldLabel::K1: k1 = true; break;
      case FieldLabel::K2: k2 = true; break;
      case FieldLabel::K3: k3 = true; break;
      default: throw std::invalid_argument("field system component must be one of K0..K3");
    }
  }
  if (k2 && (k1 || k3)) throw std::invalid_argument("unsupported field system: K2 with K1 or K3");
  closure_ = k3 ? FieldLabel::L3 : k2 ? FieldLabel::K2 : k1 ? FieldLabel::K1 : FieldLabel::K0;
  std::sort(comps.begin(), comps.end());
  if (n0 == 1 && comps.size() > 1) std::rotate(comps.begin(), comps.begin() + 1, comps.end());
  comps_ = comps;
}

int FieldSystem::degree() const {
  int d = 0;
  for (auto l : comps_) d += field(l).degree;
  return d;
}

std::string FieldSystem::name() const {
  auto s = comps_;
  std::sort(s.begin(), s.end());
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + to_string(s[i]);
  return out + ")";
}

FieldSystem FieldSystem::from_name(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (ch != '(' && ch != ')' && ch != ' ') t += ch;
  std::vector<FieldLabel> comps;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) comps.push_back(field_label_from_string(item));
  return FieldSystem(comps);
}

std::vector<FieldSystem> quartic_field_systems() {
  using L = FieldLabel;
  return {FieldSystem({L::K0, L::K0, L::K0, L::K0}), FieldSystem({L::K0, L::K0, L::K1}), FieldSystem({L::K0, L::K2}),
          FieldSystem({L::K0, L::K3}), FieldSystem({L::K1, L::K1})};
}

// --------------------------------------------------------------- SystemFrame

SystemFrame::SystemFrame(const FieldSystem& fs) : fs_(fs), m_(&field(fs.closure())) {
  const FieldSpec& m = *m_;
  autos_ = automorphism_images(m);
  g_ = &SUnitGroupSpec::load(m.label);
  const auto& comps = fs.components();
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const FieldSpec& cf = field(comps[c]);
    start_.push_back(r());
    if (cf.degree == 1) {
      roots_.push_back(NFElem::from_rat(m, 1));
      comp_of_.push_back(static_cast<int>(c));
      continue;
    }
    std::vector<NFElem> rts = roots_in_field(cf.min_poly_q(), m);
    std::sort(rts.begin(), rts.end());
    if (rts.empty()) throw std::logic_error("component field does not embed in the closure");
    std::vector<NFElem> block{rts.front()};
    for (std::size_t s = 0; s < autos_.size(); ++s) {
      NFElem y = apply(static_cast<int>(s), block.front());
      if (std::find(block.begin(), block.end(), y) == block.end()) block.push_back(y);
    }
    if (static_cast<int>(block.size()) != cf.degree) throw std::logic_error("conjugates of a component are not all in M");
    for (auto& y : block) {
      roots_.push_back(y);
      comp_of_.push_back(static_cast<int>(c));
    }
  }
  for (std::size_t s = 0; s < autos_.size(); ++s) {
    std::vector<int> p(static_cast<std::size_t>(r()));
    for (int i = 0; i < r(); ++i) {
      int st = block_start(i);
      if (field(comps[static_cast<std::size_t>(component_of(i))]).degree == 1) {
        p[static_cast<std::size_t>(i)] = i;
        continue;
      }
      NFElem y = apply(static_cast<int>(s), roots_[static_cast<std::size_t>(i)]);
      int found = -1;
      for (int j = st; j < r() && component_of(j) == component_of(i); ++j)
        if (roots_[static_cast<std::size_t>(j)] == y) found = j;
      if (found < 0) throw std::logic_error("Galois action does not permute component roots");
      p[static_cast<std::size_t>(i)] = found;
    }
    perms_.push_back(p);
  }
  const NFElem& z = g_->rho0();
  for (std::size_t s = 0; s < autos_.size(); ++s) {
    NFElem y = apply(static_cast<int>(s), z);
    int k = -1;
    NFElem acc = NFElem::from_rat(m, 1);
    for (int e = 0; e < g_->w(); ++e) {
      if (acc == y) {
        k = e;
        break;
      }
      acc = acc * z;
    }
    if (k < 0) throw std::logic_error("automorphism does not preserve roots of unity");
    chi_.push_back(k);
  }
  for (std::size_t s = 0; s < autos_.size(); ++s) {
    std::vector<ExponentVector> imgs;
    for (const auto& gj : g_->free_gens()) {
      auto e = g_->exponents_of(apply(static_cast<int>(s), gj));
      if (!e) throw std::logic_error("conjugate of an S-unit generator is not an S-unit");
      imgs.push_back(*e);
    }
    gen_images_.push_back(imgs);
  }
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const SUnitGroupSpec& cg = SUnitGroupSpec::load(comps[c]);
    std::vector<ExponentVector> gens;
    std::vector<NFElem> src{cg.rho0()};
    for (const auto& x : cg.free_gens()) src.push_back(x);
    for (const auto& x : src) {
      auto e = g_->exponents_of(embed(start_[c], x));
      if (!e) throw std::logic_error("component S-unit is not an S-unit of M");
      gens.push_back(*e);
    }
    comp_gens_.push_back(gens);
  }
  for (int i = 0; i < r(); ++i) {
    int st = block_start(i), found = -1;
    for (int s = 0; s < group_order() && found < 0; ++s)
      if (perm(s, st) == i) found = s;
    if (found < 0) throw std::logic_error("Galois group is not transitive on a component block");
    carrier_.push_back(found);
  }
}

NFElem SystemFrame::embed(int i, const NFElem& x) const {
  if (x.field().degree == 1) return NFElem::from_rat(*m_, x.coords()[0]);
  return eval_at(QPoly(x.coords()), roots_[static_cast<std::size_t>(i)]);
}

NFElem SystemFrame::apply(int s, const NFElem& x) const {
  if (m_->degree == 1) return x;
  return apply_automorphism(autos_[static_cast<std::size_t>(s)], x);
}

ExponentVector SystemFrame::add(const ExponentVector& x, const ExponentVector& y) const {
  ExponentVector r;
  r.a0 = static_cast<int>(pos_mod(x.a0 + y.a0, g_->w()));
  r.a.resize(x.a.size());
  for (std::size_t j = 0; j < x.a.size(); ++j) r.a[j] = x.a[j] + y.a[j];
  return r;
}

ExponentVector SystemFrame::scale(const ExponentVector& x, long k) const {
  ExponentVector r;
  r.a0 = static_cast<int>(pos_mod(static_cast<std::int64_t>(x.a0) * k, g_->w()));
  r.a.resize(x.a.size());
  for (std::size_t j = 0; j < x.a.size(); ++j) r.a[j] = x.a[j] * k;
  return r;
}

ExponentVector SystemFrame::minus_one() const {
  ExponentVector r;
  r.a0 = g_->w() / 2;
  r.a.assign(static_cast<std::size_t>(g_->t()), 0);
  return r;
}

ExponentVector SystemFrame::act(int s, const ExponentVector& v) const {
  ExponentVector r;
  r.a0 = static_cast<int>(pos_mod(static_cast<std::int64_t>(v.a0) * chi(s), g_->w()));
  r.a.assign(v.a.size(), 0);
  const auto& imgs = gen_images_[static_cast<std::size_t>(s)];
  for (std::size_t j = 0; j < v.a.size(); ++j)
    if (v.a[j] != 0) r = add(r, scale(imgs[j], v.a[j]));
  return r;
}

// ------------------------------------------------------------ field systems

namespace {

FieldLabel classify_factor(const QPoly& g) {
  switch (g.degree()) {
    case 1: return FieldLabel::K0;
    case 2:
      if (!roots_in_field(g, field(FieldLabel::K1)).empty()) return FieldLabel::K1;
      break;
    case 3:
      if (roots_in_field(g, field(FieldLabel::K2)).size() == 3) return FieldLabel::K2;
      if (!roots_in_field(g, field(FieldLabel::L3)).empty()) return FieldLabel::K3;
      break;
    default: break;
  }
  throw std::invalid_argument("factor field is not one of K0..K3");
}

struct FactorInfo {
  QPoly poly;  // empty for the factor Z
  FieldLabel label;
};

std::vector<FactorInfo> rational_factors(const BinaryForm& f) {
  if (f.is_zero()) throw std::invalid_argument("zero form");
  QPoly p = f.dehomogenize();
  int drop = f.degree() - p.degree();
  if (drop > 1) throw std::invalid_argument("form is not squarefree (Z^2 divides it)");
  std::vector<FactorInfo> out;
  if (drop == 1) out.push_back({QPoly(), FieldLabel::K0});
  if (p.degree() > 0)
    for (auto& g : factor_squarefree(p)) out.push_back({g, classify_factor(g)});
  return out;
}

}  // namespace

FieldSystem field_system_of(const BinaryForm& f) {
  std::vector<FieldLabel> comps;
  for (auto& fi : rational_factors(f)) comps.push_back(fi.label);
  return FieldSystem(comps);
}

// ------------------------------------------------------ proper factorization

BinaryForm expand_factors(const std::vector<FactorVector>& v, const Rat& lambda) {
  if (v.empty()) throw std::invalid_argument("expand_factors: no factors");
  const FieldSpec& m = v.front()[0].field();
  NFElem zero = NFElem::from_rat(m, 0);
  std::vector<NFElem> acc{NFElem::from_rat(m, lambda)};
  for (const auto& a : v) acc = hmul(acc, std::vector<NFElem>{a[1], a[0]}, zero);
  std::vector<Rat> out;
  for (const auto& x : acc) {
    if (!x.is_rational()) throw std::logic_error("factor product has an irrational coefficient");
    out.push_back(x.rational_value());
  }
  return BinaryForm(out);
}

ProperFactorization s_proper_factorization(const BinaryForm& f0) {
  if (f0.degree() < 2 || !good_reduction_outside_3(f0))
    throw std::invalid_argument("s_proper_factorization: form must have good reduction outside 3");
  auto factors = rational_factors(f0);
  std::vector<FieldLabel> labels;
  for (auto& fi : factors) labels.push_back(fi.label);
  FieldSystem fs(labels);
  SystemFrame frame(fs);
  const FieldSpec& m = frame.closure();
  std::vector<FactorVector> vec(static_cast<std::size_t>(frame.r()));
  std::vector<bool> used(factors.size(), false);
  const auto& comps = fs.components();
  int k0_block = -1;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::size_t pick = 0;
    while (used[pick] || factors[pick].label != comps[c]) ++pick;
    used[pick] = true;
    const FactorInfo& fi = factors[pick];
    int b = -1;
    for (int i = 0; i < frame.r(); ++i)
      if (frame.component_of(i) == static_cast<int>(c)) {
        b = i;
        break;
      }
    if (comps[c] == FieldLabel::K0) {
      if (k0_block < 0) k0_block = b;
      if (fi.poly.degree() < 0) {
        vec[static_cast<std::size_t>(b)] = {NFElem::from_rat(m, 0), NFElem::from_rat(m, 1)};
      } else {
        Rat x = -fi.poly.coeff(0) / fi.poly.coeff(1);
        vec[static_cast<std::size_t>(b)] = {NFElem::from_rat(m, Rat(x.get_den())), NFElem::from_rat(m, Rat(-x.get_num()))};
      }
      continue;
    }
    const FieldSpec& cf = field(comps[c]);
    // g = lc * prod (X - rho Z); find mu with (mu, mu rho) = O_S and
    // N(mu) = lc up to a unit, so the conjugate vectors multiply to g.
    QPoly g = fi.poly;
    Int den = 1, num = 0;
    for (const auto& x : g.coeffs()) den = lcm(den, Int(x.get_den()));
    for (const auto& x : g.coeffs()) num = int_gcd(num, Int(Rat(x * den).get_num()));
    g = g * (Rat(den) / Rat(num));
    Rat lc = g.lead();
    NFElem rho = roots_in_field(g, cf).front();
    Int target = prime_to_3_part(lc);
    std::optional<NFElem> mu;
    auto try_mu = [&](const NFElem& cand) {
      if (cand.is_zero()) return false;
      if (prime_to_3_part(norm(cand)) != target) return false;
      if (!is_s_integral(cand) || !is_s_integral(cand * rho)) return false;
      mu = cand;
      return true;
    };
    if (!try_mu(NFElem::from_rat(cf, 1))) {
      for (int bound = 1; bound <= 8 && !mu; ++bound) {
        std::vector<int> d(static_cast<std::size_t>(cf.degree), -bound);
        while (!mu) {
          bool edge = std::any_of(d.begin(), d.end(), [&](int x) { return std::abs(x) == bound; });
          if (edge) {
            std::vector<Rat> cs(d.begin(), d.end());
            if (try_mu(NFElem(cf, cs))) break;
          }
          std::size_t k = 0;
          while (k < d.size() && d[k] == bound) d[k++] = -bound;
          if (k == d.size()) break;
          ++d[k];
        }
      }
    }
    if (!mu) throw std::runtime_error("s_proper_factorization: no generator found for the content ideal");
    FactorVector base{frame.embed(b, *mu), -frame.embed(b, *mu * rho)};
    for (int i = b; i < frame.r() && frame.component_of(i) == static_cast<int>(c); ++i) {
      int s = frame.carrier(i);
      vec[static_cast<std::size_t>(i)] = {frame.apply(s, base[0]), frame.apply(s, base[1])};
    }
  }
  BinaryForm e = expand_factors(vec);
  Rat lambda = 0;
  for (int i = 0; i <= e.degree(); ++i)
    if (e.coeff(i) != 0) {
      lambda = f0.coeff(i) / e.coeff(i);
      break;
    }
  if (!(e * lambda == f0)) throw std::logic_error("factor vectors do not reproduce the form");
  if (!is_pm_power_of_3(lambda)) throw std::logic_error("form content is not an S-unit");
  ProperFactorization pf{f0, fs, Rat(1), vec};
  if (lambda != 1) {
    if (k0_block >= 0) {
      auto& a = pf.vectors[static_cast<std::size_t>(k0_block)];
      a = {a[0] * lambda, a[1] * lambda};
    } else {
      pf.form = f0 * (1 / lambda);
    }
  }
  return pf;
}

// ---------------------------------------------------------- companion data

CompanionMatrix companion_matrix(const std::vector<FactorVector>& v) {
  std::size_t r = v.size();
  CompanionMatrix d(r, std::vector<NFElem>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) d[i][j] = v[i][0] * v[j][1] - v[j][0] * v[i][1];
  return d;
}

CompanionData companion_data(const ProperFactorization& pf) {
  CompanionData out;
  out.delta = companion_matrix(pf.vectors);
  int r = static_cast<int>(pf.vectors.size());
  const auto& d = out.delta;
  const FieldSpec& m = pf.vectors.front()[0].field();
  NFElem prod = NFElem::from_rat(m, 1);
  for (int i = 0; i < r; ++i) {
    NFElem om = NFElem::from_rat(m, 1);
    for (int k = 0; k < r; ++k) {
      if (k == i) continue;
      const NFElem& x = d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (x.is_zero()) throw std::logic_error("zero off-diagonal companion entry (form not squarefree)");
      om = om * x;
    }
    out.omega.push_back(om);
    prod = prod * om;
  }
  NFElem one = NFElem::from_rat(m, 1);
  auto D = [&](int i, int j) { return d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
          out.cross[{i, j, k, l}] = D(i, j) * D(k, l) / (D(i, k) * D(j, l));
        }
  for (const auto& [q, x] : out.cross) {
    const NFElem& y = out.cross.at({q[2], q[1], q[0], q[3]});
    if (x + y != one) throw std::logic_error("cross-ratio identity fails");
  }
  Rat disc = discriminant(pf.form);
  if (!prod.is_rational()) throw std::logic_error("product of companion entries is irrational");
  Rat sign = (r * (r - 1) / 2) % 2 == 0 ? 1 : -1;
  if (disc != sign * prod.rational_value()) throw std::logic_error("discriminant product formula fails");
  return out;
}

NFElem delta_equation_rhs(const std::vector<NFElem>& omega, const std::map<std::array<int, 4>, NFElem>& cross, int i,
                          int j) {
  std::vector<int> rest;
  for (int k = 0; k < 4; ++k)
    if (k != i && k != j) rest.push_back(k);
  NFElem all = omega[0] * omega[1] * omega[2] * omega[3];
  NFElem oij = omega[static_cast<std::size_t>(i)] * omega[static_cast<std::size_t>(j)];
  return oij.pow(3) * cross.at({i, j, rest[0], rest[1]}) * cross.at({i, j, rest[1], rest[0]}) / all;
}

// --------------------------------------------------------- cross ratios

int anharmonic_index(const std::array<int, 4>& p) {
  // Generic rational points; the six values of f_k(lambda0) are distinct.
  const std::array<Rat, 4> x{Rat(0), Rat(1), Rat(5), Rat(17)};
  auto cr = [&](int i, int j, int k, int l) -> Rat { return (x[i] - x[j]) * (x[k] - x[l]) / ((x[i] - x[k]) * (x[j] - x[l])); };
  Rat l0 = cr(0, 1, 2, 3);
  Rat target = cr(p[0], p[1], p[2], p[3]);
  std::array<Rat, 6> v{l0, 1 - l0, 1 / l0, 1 / (1 - l0), l0 / (l0 - 1), (l0 - 1) / l0};
  for (int k = 0; k < 6; ++k)
    if (v[static_cast<std::size_t>(k)] == target) return k;
  throw std::invalid_argument("anharmonic_index: indices not pairwise distinct");
}

NFElem anharmonic(int k, const NFElem& l) {
  NFElem one = NFElem::from_rat(l.field(), 1);
  switch (k) {
    case 0: return l;
    case 1: return one - l;
    case 2: return l.inverse();
    case 3: return (one - l).inverse();
    case 4: return l / (l - one);
    case 5: return (l - one) / l;
    default: throw std::invalid_argument("anharmonic: index out of range");
  }
}

namespace {

ExponentVector anharmonic_exps(const SystemFrame& fr, int k, const TauValue& t) {
  switch (k) {
    case 0: return t.e;
    case 1: return t.e1;
    case 2: return fr.scale(t.e, -1);
    case 3: return fr.scale(t.e1, -1);
    case 4: return fr.add(fr.add(t.e, fr.scale(t.e1, -1)), fr.minus_one());
    case 5: return fr.add(fr.add(t.e1, fr.scale(t.e, -1)), fr.minus_one());
    default: throw std::invalid_argument("anharmonic_exps: index out of range");
  }
}

}  // namespace

std::vector<TauValue> tau_values(const SUnitGroupSpec& g, const std::set<SUnitSolution>& sols) {
  std::vector<TauValue> out;
  for (const auto& s : sols) {
    NFElem x = g.value(s.tau0), y = g.value(s.tau1);
    out.push_back({x, g.normalize(s.tau0), g.normalize(s.tau1)});
    if (x != y) out.push_back({y, g.normalize(s.tau1), g.normalize(s.tau0)});
  }
  std::sort(out.begin(), out.end(), [](const TauValue& a, const TauValue& b) { return a.value < b.value; });
  out.erase(std::unique(out.begin(), out.end(), [](const TauValue& a, const TauValue& b) { return a.value == b.value; }),
            out.end());
  return out;
}

// ------------------------------------------------------------- Omega lists

OmegaIterator::OmegaIterator(const SystemFrame& frame) : frame_(&frame) {
  for (auto l : frame.system().components()) {
    const SUnitGroupSpec& g = SUnitGroupSpec::load(l);
    groups_.push_back(&g);
    bounds_.push_back(g.w());
    for (int j = 0; j < g.t(); ++j) bounds_.push_back(12);
  }
  for (int b : bounds_) total_ *= static_cast<std::uint64_t>(b);
  digit_.assign(bounds_.size(), 0);
}

bool OmegaIterator::next(OmegaCandidate& out) {
  if (done_) return false;
  const SystemFrame& fr = *frame_;
  out.exponents.clear();
  out.omega.assign(static_cast<std::size_t>(fr.r()), ExponentVector{});
  std::size_t pos = 0;
  for (std::size_t c = 0; c < groups_.size(); ++c) {
    ExponentVector ce;
    ce.a0 = digit_[pos++];
    for (int j = 0; j < groups_[c]->t(); ++j) ce.a.push_back(digit_[pos++]);
    out.exponents.push_back(ce);
    ExponentVector m = fr.scale(fr.component_generator(static_cast<int>(c), 0), ce.a0);
    for (std::size_t j = 0; j < ce.a.size(); ++j)
      m = fr.add(m, fr.scale(fr.component_generator(static_cast<int>(c), static_cast<int>(j + 1)), ce.a[j]));
    for (int i = 0; i < fr.r(); ++i)
      if (fr.component_of(i) == static_cast<int>(c)) out.omega[static_cast<std::size_t>(i)] = fr.act(fr.carrier(i), m);
  }
  std::size_t k = 0;
  while (k < digit_.size() && ++digit_[k] == bounds_[k]) digit_[k++] = 0;
  if (k == digit_.size()) done_ = true;
  return true;
}

std::vector<NFElem> omega_values(const SystemFrame& frame, const OmegaCandidate& c) {
  std::vector<NFElem> out;
  for (const auto& e : c.omega) out.push_back(frame.group().value(e));
  return out;
}

std::vector<TauValue> compatible_lambdas(const SystemFrame& frame, const std::vector<TauValue>& taus) {
  if (frame.r() != 4) throw std::invalid_argument("compatible_lambdas: r must be 4");
  std::vector<int> idx;
  for (int s = 0; s < frame.group_order(); ++s)
    idx.push_back(anharmonic_index({frame.perm(s, 0), frame.perm(s, 1), frame.perm(s, 2), frame.perm(s, 3)}));
  std::vector<TauValue> out;
  for (const auto& t : taus) {
    bool ok = true;
    for (int s = 0; s < frame.group_order() && ok; ++s)
      ok = frame.act(s, t.e) == anharmonic_exps(frame, idx[static_cast<std::size_t>(s)], t);
    if (ok) out.push_back(t);
  }
  return out;
}

// ------------------------------------------------------ companion matrices

namespace {

constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

int pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  for (int p = 0; p < 6; ++p)
    if (kPairs[static_cast<std::size_t>(p)][0] == i && kPairs[static_cast<std::size_t>(p)][1] == j) return p;
  throw std::logic_error("bad pair");
}

// sum coef[v] * e_v + c == 0 (mod w)
struct Congruence {
  std::vector<long> coef;
  long c = 0;
};

}  // namespace

std::vector<CompanionMatrix> delta_candidates(const SystemFrame& fr, const OmegaCandidate& om, const TauValue& lambda) {
  if (fr.r() != 4) throw std::invalid_argument("delta_candidates: r must be 4");
  const int w = fr.group().w();
  const long half = w / 2;
  auto cross = [&](int i, int j, int k, int l) { return anharmonic_exps(fr, anharmonic_index({i, j, k, l}), lambda); };
  ExponentVector all = fr.add(fr.add(om.omega[0], om.omega[1]), fr.add(om.omega[2], om.omega[3]));
  // Sixth roots (torsion-free part) of the right side for each pair.
  std::array<ExponentVector, 6> root;
  for (int p = 0; p < 6; ++p) {
    int i = kPairs[static_cast<std::size_t>(p)][0], j = kPairs[static_cast<std::size_t>(p)][1];
    std::vector<int> rest;
    for (int k = 0; k < 4; ++k)
      if (k != i && k != j) rest.push_back(k);
    ExponentVector rhs = fr.scale(fr.add(om.omega[static_cast<std::size_t>(i)], om.omega[static_cast<std::size_t>(j)]), 3);
    rhs = fr.add(rhs, cross(i, j, rest[0], rest[1]));
    rhs = fr.add(rhs, cross(i, j, rest[1], rest[0]));
    rhs = fr.add(rhs, fr.scale(all, -1));
    if (rhs.a0 % w != 0) return {};
    ExponentVector rt;
    rt.a0 = 0;
    for (long x : rhs.a) {
      if (x % 6 != 0) return {};
      rt.a.push_back(x / 6);
    }
    root[static_cast<std::size_t>(p)] = rt;
  }
  // Orbit representatives of unordered pairs; Delta_p = base_p * zeta^(chi e_rep).
  std::array<int, 6> rep{-1, -1, -1, -1, -1, -1}, via{}, var{};
  std::array<ExponentVector, 6> base;
  int nvars = 0;
  for (int p = 0; p < 6; ++p) {
    if (rep[static_cast<std::size_t>(p)] >= 0) continue;
    int v = nvars++;
    for (int s = 0; s < fr.group_order(); ++s) {
      int i = fr.perm(s, kPairs[static_cast<std::size_t>(p)][0]), j = fr.perm(s, kPairs[static_cast<std::size_t>(p)][1]);
      int q = pair_index(i, j);
      if (rep[static_cast<std::size_t>(q)] >= 0) continue;
      rep[static_cast<std::size_t>(q)] = p;
      via[static_cast<std::size_t>(q)] = s;
      var[static_cast<std::size_t>(q)] = v;
      ExponentVector b = fr.act(s, root[static_cast<std::size_t>(p)]);
      if (i > j) b = fr.add(b, fr.minus_one());
      base[static_cast<std::size_t>(q)] = b;
    }
  }
  // Torsion exponent of Delta_p is base_p.a0 + chi(via_p) * e_var(p).
  auto delta_term = [&](int p, long sign, Congruence& cg, ExponentVector& free) {
    const auto& b = base[static_cast<std::size_t>(p)];
    cg.c += sign * b.a0;
    cg.coef[static_cast<std::size_t>(var[static_cast<std::size_t>(p)])] += sign * fr.chi(via[static_cast<std::size_t>(p)]);
    for (std::size_t j = 0; j < b.a.size(); ++j) free.a[j] += sign * b.a[j];
  };
  std::vector<Congruence> cons;
  auto fresh = [&]() {
    Congruence c;
    c.coef.assign(static_cast<std::size_t>(nvars), 0);
    return c;
  };
  auto zero_free = [&]() {
    ExponentVector e;
    e.a.assign(static_cast<std::size_t>(fr.group().t()), 0);
    return e;
  };
  auto free_is_zero = [](const ExponentVector& e) {
    return std::all_of(e.a.begin(), e.a.end(), [](long x) { return x == 0; });
  };
  // Galois equivariance: sigma(Delta_p) = +-Delta_q.
  for (int s = 0; s < fr.group_order(); ++s)
    for (int p = 0; p < 6; ++p) {
      int i = fr.perm(s, kPairs[static_cast<std::size_t>(p)][0]), j = fr.perm(s, kPairs[static_cast<std::size_t>(p)][1]);
      int q = pair_index(i, j);
      Congruence cg = fresh();
      ExponentVector free = zero_free();
      ExponentVector sb = fr.act(s, base[static_cast<std::size_t>(p)]);
      cg.c += sb.a0;
      cg.coef[static_cast<std::size_t>(var[static_cast<std::size_t>(p)])] +=
          static_cast<long>(fr.chi(s)) * fr.chi(via[static_cast<std::size_t>(p)]);
      for (std::size_t k = 0; k < sb.a.size(); ++k) free.a[k] += sb.a[k];
      delta_term(q, -1, cg, free);
      if (i > j) cg.c -= half;
      if (!free_is_zero(free)) return {};
      cons.push_back(cg);
    }
  // Omega_i = prod_k Delta_ik.
  for (int i = 0; i < 4; ++i) {
    Congruence cg = fresh();
    ExponentVector free = zero_free();
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      delta_term(pair_index(i, k), 1, cg, free);
      if (k < i) cg.c += half;
    }
    const auto& o = om.omega[static_cast<std::size_t>(i)];
    cg.c -= o.a0;
    for (std::size_t k = 0; k < o.a.size(); ++k) free.a[k] -= o.a[k];
    if (!free_is_zero(free)) return {};
    cons.push_back(cg);
  }
  // lambda = Delta01 Delta23 / (Delta02 Delta13).
  {
    Congruence cg = fresh();
    ExponentVector free = zero_free();
    delta_term(pair_index(0, 1), 1, cg, free);
    delta_term(pair_index(2, 3), 1, cg, free);
    delta_term(pair_index(0, 2), -1, cg, free);
    delta_term(pair_index(1, 3), -1, cg, free);
    cg.c -= lambda.e.a0;
    for (std::size_t k = 0; k < lambda.e.a.size(); ++k) free.a[k] -= lambda.e.a[k];
    if (!free_is_zero(free)) return {};
    cons.push_back(cg);
  }
  std::vector<CompanionMatrix> out;
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  const FieldSpec& m = fr.closure();
  while (true) {
    bool ok = true;
    for (const auto& cg : cons) {
      long acc = cg.c;
      for (int v = 0; v < nvars; ++v) acc += cg.coef[static_cast<std::size_t>(v)] * e[static_cast<std::size_t>(v)];
      if (pos_mod(acc, w) != 0) {
        ok = false;
        break;
      }
    }
    if (ok) {
      CompanionMatrix d(4, std::vector<NFElem>(4, NFElem::from_rat(m, 0)));
      for (int p = 0; p < 6; ++p) {
        ExponentVector x = base[static_cast<std::size_t>(p)];
        x.a0 = static_cast<int>(pos_mod(x.a0 + static_cast<long>(fr.chi(via[static_cast<std::size_t>(p)])) *
                                                   e[static_cast<std::size_t>(var[static_cast<std::size_t>(p)])],
                                        w));
        NFElem val = fr.group().value(x);
        int i = kPairs[static_cast<std::size_t>(p)][0], j = kPairs[static_cast<std::size_t>(p)][1];
        d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = val;
        d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = -val;
      }
      out.push_back(std::move(d));
    }
    std::size_t k = 0;
    while (k < e.size() && ++e[k] == w) e[k++] = 0;
    if (k == e.size()) break;
  }
  return out;
}

// ------------------------------------------------------------ reconstruction

std::vector<UBetaMatrix> u_delta(const Int& abs_delta) {
  if (abs_delta <= 0) throw std::invalid_argument("u_delta: |delta|_S must be positive");
  std::vector<UBetaMatrix> out;
  for (const Int& theta : divisors(abs_delta)) {
    Int phi = abs_delta / theta;
    for (Int psi = 0; psi < phi; ++psi) out.push_back({theta, psi, phi});
  }
  return out;
}

namespace {

// Basis (rows) of {u in Q^2 : u . g in Z for all generators g}.
std::optional<QMatrix> dual_lattice(const std::vector<std::array<Rat, 2>>& gens) {
  Int den = 1;
  for (const auto& g : gens) den = lcm(lcm(den, Int(g[0].get_den())), Int(g[1].get_den()));
  std::vector<std::array<Int, 2>> v;
  for (const auto& g : gens) {
    Rat x = g[0] * den, y = g[1] * den;
    v.push_back({x.get_num(), y.get_num()});
  }
  // Hermite basis (g, y0), (0, h).
  Int g = 0, s, t;
  std::array<Int, 2> e1{0, 0};
  for (const auto& x : v) {
    if (x[0] == 0) continue;
    if (g == 0) {
      g = x[0];
      e1 = x;
      continue;
    }
    Int ng = int_gcdext(g, x[0], s, t);
    e1 = {ng, s * e1[1] + t * x[1]};
    g = ng;
  }
  if (g == 0) return std::nullopt;
  Int h = 0;
  for (const auto& x : v) {
    Int q = x[0] / g;
    h = int_gcd(h, Int(x[1] - q * e1[1]));
  }
  // The generators' reductions against e1 miss e1's own combinations only
  // through integer multiples of e1, so the kernel is spanned by them.
  if (h == 0) return std::nullopt;
  QMatrix basis{{Rat(g) / Rat(den), Rat(0)}, {Rat(e1[1]) / Rat(den), Rat(h) / Rat(den)}};  // columns are basis vectors
  return q_inverse(basis);
}

std::vector<Rat> s_basis_coords(const NFElem& x) {
  const FieldSpec& f = x.field();
  const auto& c = x.coords();
  std::vector<Rat> d(c.size(), Rat(0));
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t i = 0; i < c.size(); ++i) d[j] += c[i] * f.s_integral_basis_inv[i][j];
  return d;
}

bool coefficients_in_os(const BinaryForm& f) {
  return std::all_of(f.coeffs().begin(), f.coeffs().end(), [](const Rat& x) { return x == 0 || is_3_integral(x); });
}

}  // namespace

std::vector<ReconstructedForm> reconstruct_forms(const SystemFrame& fr, const CompanionMatrix& delta, Int* beta_s) {
  const FieldSpec& m = fr.closure();
  int r = fr.r();
  auto D = [&](int i, int j) { return delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  NFElem d10inv = D(1, 0).inverse();
  std::vector<FactorVector> v;
  for (int i = 0; i < r; ++i) v.push_back({D(1, i) * d10inv, D(i, 0) * d10inv});
  std::vector<NMat2> R;
  for (int s = 0; s < fr.group_order(); ++s) {
    const auto& p = v[static_cast<std::size_t>(fr.perm(s, 0))];
    const auto& q = v[static_cast<std::size_t>(fr.perm(s, 1))];
    R.push_back({p[0], q[0], p[1], q[1]});
  }
  // Hilbert 90: N = sum_s R_s s(P) satisfies s(N) = R_s^{-1} N, so A0 = N^{-1}
  // satisfies s(A0) = A0 R_s, the relation forced by a_i^s = a_{s(i)}.
  NFElem th = NFElem::gen(m);
  std::optional<NMat2> a0;
  for (int t = 0; t < 8 && !a0; ++t) {
    NMat2 p{NFElem::from_rat(m, 1), th + NFElem::from_rat(m, t), th * th - NFElem::from_rat(m, 2 * t + 1),
            NFElem::from_rat(m, 2) + th * Rat(t + 3)};
    NMat2 n{NFElem::from_rat(m, 0), NFElem::from_rat(m, 0), NFElem::from_rat(m, 0), NFElem::from_rat(m, 0)};
    for (int s = 0; s < fr.group_order(); ++s) {
      NMat2 sp{fr.apply(s, p.a), fr.apply(s, p.b), fr.apply(s, p.c), fr.apply(s, p.d)};
      n = n + R[static_cast<std::size_t>(s)] * sp;
    }
    if (!n.det().is_zero()) a0 = n.inverse();
  }
  if (!a0) return {};
  for (int s = 0; s < fr.group_order(); ++s) {
    NMat2 sa{fr.apply(s, a0->a), fr.apply(s, a0->b), fr.apply(s, a0->c), fr.apply(s, a0->d)};
    if (!(sa == *a0 * R[static_cast<std::size_t>(s)])) return {};
  }
  NFElem du = D(0, 1) / a0->det();
  if (!du.is_rational()) return {};
  std::vector<FactorVector> w;
  for (const auto& x : v) w.push_back(a0->apply(x));
  std::vector<std::array<Rat, 2>> gens;
  for (const auto& x : w) {
    auto c0 = s_basis_coords(x[0]), c1 = s_basis_coords(x[1]);
    for (std::size_t k = 0; k < c0.size(); ++k) gens.push_back({c0[k], c1[k]});
  }
  auto lam = dual_lattice(gens);
  if (!lam) return {};
  Rat beta = du.rational_value() / q_det(*lam);
  if (!is_3_integral(beta)) return {};
  Int bs = prime_to_3_part(beta);
  if (beta_s) *beta_s = bs;
  QMat2 lq{(*lam)[0][0], (*lam)[0][1], (*lam)[1][0], (*lam)[1][1]};
  std::vector<ReconstructedForm> out;
  for (const auto& ub : u_delta(bs)) {
    QMat2 b{Rat(ub.theta), Rat(ub.psi), Rat(0), Rat(ub.phi)};
    NMat2 a = lift(m, b * lq) * *a0;
    std::vector<FactorVector> vec;
    for (const auto& x : v) vec.push_back(a.apply(x));
    BinaryForm g;
    try {
      g = expand_factors(vec);
    } catch (const std::logic_error&) {
      continue;
    }
    if (!coefficients_in_os(g) || !good_reduction_outside_3(g)) continue;
    out.push_back({g, vec, ub});
  }
  return out;
}

// --------------------------------------------------------------- equivalence

namespace {

struct RootedForm {
  BinaryForm form;
  FieldSystem system;
  std::vector<P1> roots;
};

RootedForm rooted(const BinaryForm& f) {
  RootedForm out{f, field_system_of(f), {}};
  const FieldSpec& m = field(out.system.closure());
  for (auto& fi : rational_factors(f)) {
    if (fi.poly.degree() < 0) {
      out.roots.push_back({NFElem::from_rat(m, 1), NFElem::from_rat(m, 0)});
      continue;
    }
    for (auto& x : roots_in_field(fi.poly, m)) out.roots.push_back({x, NFElem::from_rat(m, 1)});
  }
  return out;
}

RootedForm rooted_from_vectors(const BinaryForm& f, const FieldSystem& fs, const std::vector<FactorVector>& vec) {
  RootedForm out{f, fs, {}};
  for (const auto& a : vec) out.roots.push_back({-a[1], a[0]});
  return out;
}

std::optional<EquivWitness> check_candidate(const BinaryForm& f, const BinaryForm& g, const NMat2& u, EquivMode mode) {
  auto q = rational_primitive(u);
  if (!q) return std::nullopt;
  if (mode == EquivMode::OS0 && q->c != 0) return std::nullopt;
  if (!is_pm_power_of_3(q->det())) return std::nullopt;
  BinaryForm h = act(f, *q);
  Rat lambda = 0;
  for (int i = 0; i <= h.degree(); ++i)
    if (h.coeff(i) != 0) {
      lambda = g.coeff(i) / h.coeff(i);
      break;
    }
  if (lambda == 0 || !is_pm_power_of_3(lambda) || !(h * lambda == g)) return std::nullopt;
  return EquivWitness{lambda, *q};
}

bool is_inf(const P1& p) { return p[1].is_zero(); }

std::optional<EquivWitness> equiv_rooted(const RootedForm& f, const RootedForm& g, EquivMode mode) {
  if (f.form.degree() != g.form.degree() || f.system != g.system) return std::nullopt;
  if (f.roots.size() != g.roots.size()) return std::nullopt;
  const std::size_t n = f.roots.size();
  if (mode == EquivMode::OS) {
    if (n < 3) throw std::invalid_argument("equiv_test: need at least three roots");
    auto pg = frame_matrix(g.roots[0], g.roots[1], g.roots[2]);
    if (!pg) return std::nullopt;
    NMat2 pgi = pg->inverse();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) {
          if (a == b || a == c || b == c) continue;
          auto pf = frame_matrix(f.roots[a], f.roots[b], f.roots[c]);
          if (!pf) continue;
          if (auto w = check_candidate(f.form, g.form, *pf * pgi, mode)) return w;
        }
    return std::nullopt;
  }
  // Affine maps x -> a x + b fix infinity.
  std::vector<NFElem> fx, gx;
  bool finf = false, ginf = false;
  for (const auto& p : f.roots) {
    if (is_inf(p)) finf = true;
    else fx.push_back(p[0] / p[1]);
  }
  for (const auto& p : g.roots) {
    if (is_inf(p)) ginf = true;
    else gx.push_back(p[0] / p[1]);
  }
  if (finf != ginf || gx.size() < 2) return std::nullopt;
  const FieldSpec& m = field(f.system.closure());
  NFElem gd = gx[0] - gx[1];
  for (std::size_t a = 0; a < fx.size(); ++a)
    for (std::size_t b = 0; b < fx.size(); ++b) {
      if (a == b) continue;
      NFElem sl = (fx[a] - fx[b]) / gd;
      NFElem off = fx[a] - sl * gx[0];
      NMat2 u{sl, off, NFElem::from_rat(m, 0), NFElem::from_rat(m, 1)};
      if (auto w = check_candidate(f.form, g.form, u, mode)) return w;
    }
  return std::nullopt;
}

}  // namespace

std::optional<EquivWitness> equiv_test(const BinaryForm& f, const BinaryForm& g, EquivMode mode) {
  if (f.degree() != g.degree()) return std::nullopt;
  return equiv_rooted(rooted(f), rooted(g), mode);
}

std::string quartic_invariant_key(const BinaryForm& f) {
  if (f.degree() != 4) throw std::invalid_argument("quartic_invariant_key: degree must be 4");
  const Rat &a = f.coeff(4), &b = f.coeff(3), &c = f.coeff(2), &d = f.coeff(1), &e = f.coeff(0);
  Rat I = 12 * a * e - 3 * b * d + c * c;
  Rat J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c;
  if (J == 0) return "inf";
  return rat_to_string(I * I * I / (J * J));
}

// ------------------------------------------------------------------ build_F4

std::vector<F4Record> build_F4(const FieldSystem& fs, const std::vector<TauValue>& taus, F4Stats* stats) {
  if (fs.degree() != 4) throw std::invalid_argument("build_F4: field system must have degree 4");
  SystemFrame frame(fs);
  F4Stats st;
  auto lambdas = compatible_lambdas(frame, taus);
  st.lambdas = lambdas.size();
  std::vector<F4Record> reps;
  std::vector<RootedForm> rep_roots;
  std::map<std::string, std::vector<std::size_t>> buckets;
  std::set<BinaryForm> seen;
  OmegaIterator it(frame);
  OmegaCandidate om;
  if (!lambdas.empty()) {
    while (it.next(om)) {
      ++st.omega_candidates;
      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        for (const auto& d : delta_candidates(frame, om, lambdas[li])) {
          ++st.companion_matrices;
          Int bs = 1;
          for (auto& rf : reconstruct_forms(frame, d, &bs)) {
            ++st.raw_forms;
            st.max_beta = std::max<std::uint64_t>(st.max_beta, bs.get_ui());
            BinaryForm key = rf.form.primitive();
            if (!seen.insert(key).second) continue;
            RootedForm rr = rooted_from_vectors(rf.form, fs, rf.vectors);
            auto& bucket = buckets[quartic_invariant_key(rf.form)];
            bool dup = false;
            for (std::size_t k : bucket)
              if (equiv_rooted(rep_roots[k], rr, EquivMode::OS)) {
                dup = true;
                break;
              }
            if (dup) continue;
            bucket.push_back(reps.size());
            rep_roots.push_back(rr);
            reps.push_back({rf.form, rf.vectors, om.exponents, static_cast<int>(li), rf.b});
          }
        }
      }
    }
  } else {
    st.omega_candidates = it.size();
  }
  if (stats) *stats = st;
  return reps;
}

// ---------------------------------------------------------------- quintics

std::vector<BinaryForm> extend_to_quintic(const F4Record& h, const std::vector<TauValue>& taus) {
  const auto& a = h.vectors;
  if (a.size() != 4) throw std::invalid_argument("extend_to_quintic: quartic expected");
  CompanionMatrix d = companion_matrix(a);
  std::set<BinaryForm> out;
  for (const auto& t : taus)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          if (i == j || i == k || j == k) continue;
          const NFElem& dik = d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
          const NFElem& djk = d[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
          const auto& ai = a[static_cast<std::size_t>(i)];
          const auto& aj = a[static_cast<std::size_t>(j)];
          // [0,i,j,k] = tau is linear in (a00, a10).
          NFElem x = t.value * dik * aj[0] - djk * ai[0];
          NFElem y = t.value * dik * aj[1] - djk * ai[1];
          BinaryForm l;
          if (x.is_zero()) {
            if (y.is_zero()) continue;
            l = BinaryForm::linear(0, 1);
          } else {
            NFElem q = y / x;
            if (!q.is_rational()) continue;
            l = BinaryForm::linear(1, q.rational_value()).primitive();
          }
          if (h.form.eval(-l.coeff(0), l.coeff(1)) == 0) continue;
          BinaryForm g = l * h.form;
          if (!good_reduction_outside_3(g)) continue;
          out.insert(g.primitive());
        }
  return {out.begin(), out.end()};
}

QMat2 linear_to_z(const BinaryForm& l0) {
  if (l0.degree() != 1) throw std::invalid_argument("linear_to_z: linear form expected");
  if (!good_reduction_outside_3(l0)) throw std::invalid_argument("linear_to_z: content is not a unit");
  BinaryForm l = l0.primitive();
  Int u = l.coeff(1).get_num(), v = l.coeff(0).get_num(), s, t;
  Int g = int_gcdext(u, v, s, t);
  if (g != 1) throw std::logic_error("linear_to_z: primitive form with content");
  // (u a + v c) = 0 and (u b + v d) = 1 with det 1.
  return QMat2{Rat(v), Rat(s), Rat(-u), Rat(t)};
}

std::vector<QuinticLinearPair> to_quintic_linear_pairs(const BinaryForm& g) {
  if (g.degree() != 5) throw std::invalid_argument("to_quintic_linear_pairs: quintic expected");
  std::vector<BinaryForm> lins;
  QPoly p = g.dehomogenize();
  if (p.degree() < 5) lins.push_back(BinaryForm::linear(0, 1));
  for (const Rat& x : rational_roots(p)) lins.push_back(BinaryForm::linear(Rat(x.get_den()), Rat(-x.get_num())));
  std::vector<QuinticLinearPair> out;
  for (const auto& l : lins) {
    QMat2 u = linear_to_z(l);
    BinaryForm gu = act(g, u);
    if (gu.coeff(5) != 0) throw std::logic_error("transformed quintic is not divisible by Z");
    std::vector<Rat> q(gu.coeffs().begin(), gu.coeffs().end() - 1);
    out.push_back({gu, BinaryForm::linear(0, 1), BinaryForm(q), u});
  }
  return out;
}

std::vector<BinaryForm> pair_quartic_classes(const std::vector<BinaryForm>& quintics) {
  std::vector<BinaryForm> out;
  std::vector<RootedForm> roots;
  for (const auto& g : quintics)
    for (const auto& p : to_quintic_linear_pairs(g)) {
      RootedForm rf = rooted(p.quartic);
      bool dup = false;
      for (const auto& r : roots)
        if (equiv_rooted(r, rf, EquivMode::OS0)) {
          dup = true;
          break;
        }
      if (dup) continue;
      out.push_back(p.quartic);
      roots.push_back(std::move(rf));
    }
  return out;
}

}  // namespace picard

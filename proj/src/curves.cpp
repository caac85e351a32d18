#include "picard/curves.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace picard {

namespace {

using L = FieldLabel;

bool all_integral(const QPoly& f) {
  return std::all_of(f.coeffs().begin(), f.coeffs().end(), [](const Rat& x) { return x.get_den() == 1; });
}

CurveModel to_model(const QPoly& f) {
  if (f.degree() != 4 || f.lead() != 1) throw std::logic_error("model polynomial must be a monic quartic");
  CurveModel m;
  for (int k = 0; k < 4; ++k) {
    if (f.coeff(k).get_den() != 1) throw std::logic_error("model polynomial is not integral");
    m[static_cast<std::size_t>(3 - k)] = f.coeff(k).get_num();
  }
  return m;
}

// s^-12 f(s^3 x + b).
QPoly tschirnhaus_poly(const QPoly& f, const Rat& s, const Rat& b) {
  Rat s3 = s * s * s;
  return f.compose(QPoly({b, s3})) * (1 / rpow(s, 12));
}

// Rational k-th root of x (k >= 1), if any.
std::optional<Rat> rational_root(const Rat& x, unsigned k) {
  if (x == 0) return Rat(0);
  if (x < 0 && k % 2 == 0) return std::nullopt;
  Int n = x.get_num(), d = x.get_den();
  bool neg = n < 0;
  if (neg) n = -n;
  auto rn = exact_root(n, k), rd = exact_root(d, k);
  if (!rn || !rd) return std::nullopt;
  Rat r = Rat(*rn) / Rat(*rd);
  return neg ? -r : r;
}

Int max_abs(const CurveModel& m) {
  Int mx = 0;
  for (const auto& x : m) mx = std::max(mx, Int(abs(x)));
  return mx;
}

// Smaller is preferred: sum |a_i|, then max |a_i|, then lexicographically
// larger tuples.
bool model_less(const CurveModel& a, const CurveModel& b) {
  Int sa = 0, sb = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sa += abs(a[i]);
    sb += abs(b[i]);
  }
  if (sa != sb) return sa < sb;
  Int ma = max_abs(a), mb = max_abs(b);
  if (ma != mb) return ma < mb;
  return a > b;
}

constexpr int kShiftWindow = 64;

}  // namespace

std::string to_string(const CurveModel& m) {
  std::ostringstream os;
  os << "(" << m[0] << ", " << m[1] << ", " << m[2] << ", " << m[3] << ")";
  return os.str();
}

QPoly model_polynomial(const CurveModel& m) { return QPoly({Rat(m[3]), Rat(m[2]), Rat(m[1]), Rat(m[0]), Rat(1)}); }

Rat model_discriminant(const CurveModel& m) { return discriminant(model_polynomial(m)); }

CurveModel normalize_model(const QPoly& f0) {
  if (f0.degree() != 4 || f0.lead() != 1) throw std::invalid_argument("normalize_model: monic quartic expected");
  for (const auto& c : f0.coeffs())
    if (c != 0 && !is_3_integral(c)) throw std::invalid_argument("normalize_model: coefficients must lie in Z[1/3]");
  QPoly f = f0;
  // x -> x / 27 scales a_k by 3^(12 - 3k).
  while (!all_integral(f)) f = tschirnhaus_poly(f, Rat(1, 3), 0);
  // x -> 27 x + r while the result stays integral.
  for (bool again = true; again;) {
    again = false;
    for (int r = 0; r < 27 && !again; ++r) {
      QPoly g = tschirnhaus_poly(f, 3, r);
      if (all_integral(g)) {
        f = g;
        again = true;
      }
    }
  }
  std::optional<CurveModel> best;
  Rat center = -f.coeff(3) / 4;
  Int c0 = center.get_num() / center.get_den();
  for (int sign : {1, -1})
    for (int dr = -kShiftWindow; dr <= kShiftWindow; ++dr) {
      CurveModel m = to_model(tschirnhaus_poly(f, sign, Rat(c0 + dr)));
      if (!best || model_less(m, *best)) best = m;
    }
  return *best;
}

PicardCurve curve_from_quartic(const BinaryForm& f, int alpha) {
  if (f.degree() != 4 || f.coeff(4) == 0) throw std::invalid_argument("curve_from_quartic: quartic with X^4 term expected");
  if (discriminant(f) == 0) throw std::invalid_argument("curve_from_quartic: quartic is not squarefree");
  // (x, y) -> (x / L, y / L) with L = alpha a4 makes y^3 = alpha F(x, 1) monic.
  Rat l = Rat(alpha) * f.coeff(4);
  std::vector<Rat> c(5);
  for (int k = 0; k <= 4; ++k) c[static_cast<std::size_t>(k)] = Rat(alpha) * f.coeff(k) * rpow(l, 3 - k);
  return {field_system_of(f), f, alpha, normalize_model(QPoly(c))};
}

PicardCurve curve_from_pair(const QuinticLinearPair& p, int alpha) {
  if (!(p.linear == BinaryForm::linear(0, 1))) throw std::invalid_argument("curve_from_pair: pair must be (ZF, Z)");
  return curve_from_quartic(p.quartic, alpha);
}

CurveModel twist_model(const CurveModel& m, int alpha) {
  return curve_from_quartic(BinaryForm(model_polynomial(m).coeffs()), alpha).model;
}

std::array<std::array<Rat, 3>, 3> Tschirnhaus::matrix() const {
  Rat s3 = s * s * s;
  return {{{s3, Rat(0), b}, {Rat(0), s3 * s, Rat(0)}, {Rat(0), Rat(0), Rat(1)}}};
}

CurveModel apply_tschirnhaus(const CurveModel& c1, const Tschirnhaus& t) {
  return to_model(tschirnhaus_poly(model_polynomial(c1), t.s, t.b));
}

std::optional<Tschirnhaus> is_isomorphic_q(const CurveModel& c1, const CurveModel& c2) {
  QPoly f1 = model_polynomial(c1), f2 = model_polynomial(c2);
  Rat h1 = Rat(c1[0]) / 4, h2 = Rat(c2[0]) / 4;
  // Depressed quartics; then g2(x) = a^-4 g1(a x) with a = s^3.
  QPoly g1 = f1.compose(QPoly({-h1, Rat(1)})), g2 = f2.compose(QPoly({-h2, Rat(1)}));
  for (int k = 0; k < 3; ++k)
    if ((g1.coeff(k) == 0) != (g2.coeff(k) == 0)) return std::nullopt;
  std::vector<Rat> cands;
  if (g1.coeff(1) != 0) {
    if (auto a = rational_root(g1.coeff(1) / g2.coeff(1), 3)) cands.push_back(*a);
  } else if (g1.coeff(2) != 0) {
    if (auto a = rational_root(g1.coeff(2) / g2.coeff(2), 2)) cands = {*a, -*a};
  } else if (auto a = rational_root(g1.coeff(0) / g2.coeff(0), 4)) {
    cands = {*a, -*a};
  }
  for (const Rat& a : cands) {
    auto s = rational_cube_root(a);
    if (!s) continue;
    Tschirnhaus t{*s, a * h2 - h1};
    if (tschirnhaus_poly(f1, t.s, t.b) == f2) return t;
  }
  return std::nullopt;
}

// ------------------------------------------------------------------ pipeline

SystemPipeline run_system_pipeline(const FieldSystem& fs, const std::vector<TauValue>& taus) {
  SystemPipeline out;
  out.system = fs;
  out.f4 = build_F4(fs, taus, &out.stats);
  std::set<BinaryForm> qs;
  for (const auto& h : out.f4)
    for (auto& g : extend_to_quintic(h, taus)) qs.insert(g);
  out.f5.assign(qs.begin(), qs.end());
  out.pair_quartics = pair_quartic_classes(out.f5);
  return out;
}

std::vector<TwistBlock> blocks_from_quartics(const FieldSystem& fs, const std::vector<BinaryForm>& quartics) {
  std::vector<TwistBlock> out;
  for (const auto& f : quartics) {
    TwistBlock b;
    b.system = fs;
    std::size_t k = 0;
    for (int alpha : {1, 3, 9}) b.members[k++] = curve_from_quartic(f, alpha);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<TwistBlock> enumerate_all() {
  std::map<FieldLabel, std::vector<TauValue>> taus;
  std::vector<TwistBlock> out;
  for (const auto& fs : quartic_field_systems()) {
    L m = fs.closure();
    if (!taus.count(m)) taus[m] = tau_values(SUnitGroupSpec::load(m), solve_all(m).solutions);
    SystemPipeline p = run_system_pipeline(fs, taus[m]);
    for (auto& b : blocks_from_quartics(fs, p.pair_quartics)) out.push_back(std::move(b));
  }
  return out;
}

// ------------------------------------------------------------ golden tables

namespace {

struct TableSpec {
  const char* name;
  FieldSystem system;
};

const std::vector<TableSpec>& table_specs() {
  static const std::vector<TableSpec> t{{"QQK1", FieldSystem({L::K0, L::K0, L::K1})},
                                        {"QK3", FieldSystem({L::K0, L::K3})},
                                        {"QK2", FieldSystem({L::K0, L::K2})}};
  return t;
}

std::vector<GoldenRow> make_rows(const std::map<std::string, std::vector<std::array<long, 4>>>& tables) {
  std::vector<GoldenRow> out;
  for (const auto& spec : table_specs()) {
    auto it = tables.find(spec.name);
    if (it == tables.end()) continue;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      const auto& r = it->second[i];
      out.push_back({spec.name, spec.system, static_cast<int>(i / 3), {Int(r[0]), Int(r[1]), Int(r[2]), Int(r[3])}});
    }
  }
  return out;
}

}  // namespace

const std::vector<GoldenRow>& golden_rows() {
  static const std::vector<GoldenRow> rows = make_rows({
      {"QQK1",
       {{0, 0, 1, 0}, {0, 0, 27, 0}, {0, 0, 729, 0},
        {2, 2, 1, 0}, {2, 6, 5, -14}, {14, 114, 455, -584},
        {-2, 0, 1, -2}, {-2, -12, 13, -140}, {50, 816, 4775, -5642}}},
      {"QK3",
       {{0, 0, 3, 0}, {0, 0, 81, 0}, {0, 0, 2187, 0},
        {0, 0, 9, 0}, {0, 0, 243, 0}, {0, 0, 6561, 0},
        {-2, 0, 11, 8}, {-18, 108, 27, 0}, {-54, 972, 729, 0},
        {12, -6, 1, 0}, {36, -54, 27, 0}, {112, -156, 85, 352}}},
      {"QK2",
       {{-3, 0, 1, 0}, {-5, -21, 4, 19}, {-31, 87, 644, -701},
        {0, -3, 1, 0}, {0, -27, 27, 0}, {0, -243, 729, 0},
        {-2, -3, 1, 1}, {-14, 33, 31, -17}, {-38, 177, 1309, -284},
        {-1, -3, 2, 1}, {13, 33, -50, -71}, {31, 87, -2102, -2159},
        {-2, -3, 3, 3}, {18, 81, 27, 0}, {-50, 573, 571, -53},
        {-5, -3, 4, 1}, {-23, 87, 4, -107}, {-57, 216, 3051, -3078},
        {-6, 3, 1, 0}, {-18, 27, 27, 0}, {-58, 411, 77, -431},
        {3, -6, 1, 0}, {-13, -21, 50, -17}, {-31, -399, 158, 271},
        {9, 6, 1, 0}, {-23, -21, 4, 1}, {-69, -189, 108, 81},
        {6, -9, 3, 0}, {-22, -21, 23, 19}, {78, 459, 135, -162},
        {0, -9, 9, 0}, {0, -81, 243, 0}, {0, -729, 6561, 0},
        {9, 18, -9, 0}, {27, 162, -243, 0}, {93, 2241, 4482, -4293},
        {24, 3, -1, 0}, {72, 27, -27, 0}, {216, 243, -729, 0},
        {3, -24, 1, 0}, {9, -216, 27, 0}, {27, -1944, 729, 0}}},
  });
  return rows;
}

std::vector<GoldenRow> load_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  std::map<std::string, std::vector<std::array<long, 4>>> tables;
  for (const auto& spec : table_specs()) {
    if (!j.contains(spec.name)) continue;
    for (const auto& r : j.at(spec.name)) {
      if (!r.is_array() || r.size() != 4) throw std::runtime_error("golden rows must have four entries");
      tables[spec.name].push_back({r[0].get<long>(), r[1].get<long>(), r[2].get<long>(), r[3].get<long>()});
    }
  }
  return make_rows(tables);
}

MatchReport match_golden(const std::vector<TwistBlock>& blocks, const std::vector<GoldenRow>& rows) {
  MatchReport rep;
  rep.blocks = blocks.size();
  rep.rows = rows.size();
  std::vector<const PicardCurve*> flat;
  std::vector<std::pair<std::size_t, std::size_t>> where;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t k = 0; k < 3; ++k) {
      flat.push_back(&blocks[b].members[k]);
      where.emplace_back(b, k);
    }
  rep.curves = flat.size();
  for (std::size_t i = 0; i < flat.size(); ++i)
    for (std::size_t j = i + 1; j < flat.size(); ++j)
      if (is_isomorphic_q(flat[i]->model, flat[j]->model)) rep.duplicate_curves.emplace_back(i, j);
  // Classes are disjoint, so a curve matches at most one row once duplicates
  // are excluded; matching is a plain search within the same field system.
  std::vector<bool> row_used(rows.size(), false);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    bool found = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (row_used[r] || rows[r].system != flat[i]->system) continue;
      if (auto w = is_isomorphic_q(flat[i]->model, rows[r].model)) {
        row_used[r] = true;
        bool exact = flat[i]->model == rows[r].model;
        rep.matches.push_back({where[i].first, where[i].second, r, *w, exact});
        if (exact) ++rep.exact_matches;
        found = true;
        break;
      }
    }
    if (!found) rep.unmatched_curves.push_back(where[i]);
  }
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (!row_used[r]) rep.unmatched_rows.push_back(r);
  std::map<std::size_t, std::set<std::pair<std::string, int>>> targets;
  for (const auto& m : rep.matches) targets[m.block].insert({rows[m.row].table, rows[m.row].block});
  for (const auto& [b, t] : targets)
    if (t.size() != 1) rep.split_blocks.push_back(b);
  return rep;
}

std::vector<SimpleFamilyEntry> check_simple_family(const std::vector<TwistBlock>& blocks) {
  std::vector<SimpleFamilyEntry> out;
  for (int s = 0; s <= 8; ++s) {
    SimpleFamilyEntry e;
    e.s = s;
    CurveModel target{0, 0, Int(pow3(s).get_num()), 0};
    for (std::size_t b = 0; b < blocks.size() && !e.found; ++b)
      for (std::size_t k = 0; k < 3 && !e.found; ++k)
        if (auto w = is_isomorphic_q(blocks[b].members[k].model, target)) {
          e.found = true;
          e.block = b;
          e.member = k;
          e.witness = *w;
        }
    out.push_back(e);
  }
  return out;
}

}  // namespace picard

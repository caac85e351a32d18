#include <doctest.h>

#include "picard/curves.hpp"

using namespace picard;

namespace {

using L = FieldLabel;

CurveModel cm(long a3, long a2, long a1, long a0) { return {Int(a3), Int(a2), Int(a1), Int(a0)}; }

bool iso(const CurveModel& a, const CurveModel& b) {
  auto w = is_isomorphic_q(a, b);
  if (w) CHECK(apply_tschirnhaus(a, *w) == b);
  return w.has_value();
}

}  // namespace

TEST_CASE("curves from quartics") {
  BinaryForm f = BinaryForm::from_high({1, 0, 0, 1, 0});
  PicardCurve c1 = curve_from_quartic(f, 1);
  CHECK(c1.system == FieldSystem({L::K0, L::K0, L::K1}));
  CHECK(iso(c1.model, cm(0, 0, 1, 0)));
  CHECK(iso(curve_from_quartic(f, 3).model, cm(0, 0, 27, 0)));
  CHECK(iso(curve_from_quartic(f, 9).model, cm(0, 0, 729, 0)));
  // Non-monic and 3-fractional input.
  BinaryForm g = act(f, QMat2{3, 1, 0, 1}, Rat(1, 27));
  CHECK(iso(curve_from_quartic(g, 1).model, cm(0, 0, 1, 0)));
  CHECK_THROWS_AS(curve_from_quartic(BinaryForm::from_high({0, 1, 0, 1, 0}), 1), std::invalid_argument);
  CHECK_THROWS_AS(curve_from_quartic(BinaryForm::from_high({1, 0, 1, 0, 0}), 1), std::invalid_argument);
  QuinticLinearPair p{f * BinaryForm::linear(0, 1), BinaryForm::linear(0, 1), f, QMat2{}};
  CHECK(curve_from_pair(p, 1).model == c1.model);
}

TEST_CASE("normal form") {
  CurveModel m = normalize_model(QPoly({Rat(0), Rat(1, 27), Rat(0), Rat(0), Rat(1)}));
  CHECK(m == cm(0, 0, 729, 0));
  CHECK(normalize_model(model_polynomial(m)) == m);
  CHECK(normalize_model(model_polynomial(cm(0, 0, 19683, 0))) == normalize_model(model_polynomial(cm(0, 0, 1, 0))));
  CHECK_THROWS_AS(normalize_model(QPoly({Rat(1, 2), Rat(0), Rat(0), Rat(0), Rat(1)})), std::invalid_argument);
}

TEST_CASE("isomorphism over Q") {
  CHECK(iso(cm(0, 0, 1, 0), cm(0, 0, 1, 0)));
  BinaryForm f = BinaryForm::from_high({1, 0, 0, -1, 0});
  BinaryForm g = act(f, QMat2{1, 1, 2, 1});
  CHECK_FALSE(iso(curve_from_quartic(f, 1).model, curve_from_quartic(g, 1).model));
  CHECK_FALSE(iso(curve_from_quartic(f, 1).model, curve_from_quartic(f, 3).model));
  // x -> -x + 5 with s = -1.
  CurveModel m = cm(-2, 0, 1, -2);
  Tschirnhaus t{Rat(-1), Rat(5)};
  QPoly moved = model_polynomial(m).compose(QPoly({Rat(5), Rat(-1)}));
  CurveModel mm{moved.coeff(3).get_num(), moved.coeff(2).get_num(), moved.coeff(1).get_num(), moved.coeff(0).get_num()};
  CHECK(apply_tschirnhaus(m, t) == mm);
  CHECK(iso(m, mm));
  CHECK(iso(mm, m));
  // y^3 = x^4 + x and y^3 = x^4 + 8x differ by a non-cube scaling.
  CHECK_FALSE(iso(cm(0, 0, 1, 0), cm(0, 0, 8, 0)));
  CHECK(iso(cm(0, 0, 1, 0), cm(0, 0, 512, 0)));
  auto w = is_isomorphic_q(cm(0, 0, 1, 0), cm(0, 0, 512, 0));
  REQUIRE(w);
  auto mat = w->matrix();
  CHECK(mat[0][0] == w->s * w->s * w->s);
  CHECK(mat[1][1] == w->s * w->s * w->s * w->s);
}

TEST_CASE("twist arithmetic") {
  CurveModel base = cm(2, 2, 1, 0);
  CurveModel t3 = twist_model(base, 3), t9 = twist_model(base, 9);
  CHECK(iso(twist_model(t3, 3), t9));
  CHECK(iso(twist_model(t9, 3), base));
  CHECK(iso(twist_model(t3, 9), base));
  CHECK(iso(twist_model(base, 27), base));
  CHECK(iso(twist_model(base, 8), base));
  CHECK_FALSE(iso(t3, base));
  CHECK_FALSE(iso(t3, t9));
}

TEST_CASE("golden tables") {
  const auto& rows = golden_rows();
  CHECK(rows.size() == 63);
  std::size_t q = 0, k3 = 0, k2 = 0;
  for (const auto& r : rows) {
    Rat d = model_discriminant(r.model);
    CHECK(is_pm_power_of_3(d));
    if (r.table == "QQK1") ++q;
    if (r.table == "QK3") ++k3;
    if (r.table == "QK2") ++k2;
    CHECK(field_system_of(BinaryForm(model_polynomial(r.model).coeffs())) == r.system);
  }
  CHECK(q == 9);
  CHECK(k3 == 12);
  CHECK(k2 == 42);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) CHECK_FALSE(is_isomorphic_q(rows[i].model, rows[j].model));
  // Rows of a published block are the three twists of its first row.
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    CHECK(iso(twist_model(rows[i].model, 3), rows[i + 1].model));
    CHECK(iso(twist_model(rows[i].model, 9), rows[i + 2].model));
  }
}

TEST_CASE("matching and the simple family on published blocks") {
  const auto& rows = golden_rows();
  std::vector<TwistBlock> blocks;
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    BinaryForm f(model_polynomial(rows[i].model).coeffs());
    blocks.push_back(blocks_from_quartics(rows[i].system, {f}).front());
  }
  MatchReport rep = match_golden(blocks, rows);
  CHECK(rep.perfect());
  CHECK(rep.curves == 63);
  CHECK(rep.blocks == 21);
  auto fam = check_simple_family(blocks);
  REQUIRE(fam.size() == 9);
  for (const auto& e : fam) CHECK(e.found);
  CHECK(blocks[fam[0].block].system == FieldSystem({L::K0, L::K0, L::K1}));
  CHECK(blocks[fam[1].block].system == FieldSystem({L::K0, L::K3}));
  CHECK(blocks[fam[2].block].system == FieldSystem({L::K0, L::K3}));

  // Dropping one block leaves three rows unmatched.
  std::vector<TwistBlock> fewer(blocks.begin() + 1, blocks.end());
  MatchReport r2 = match_golden(fewer, rows);
  CHECK_FALSE(r2.perfect());
  CHECK(r2.unmatched_rows.size() == 3);
  // A duplicated block is reported.
  std::vector<TwistBlock> more = blocks;
  more.push_back(blocks.front());
  MatchReport r3 = match_golden(more, rows);
  CHECK_FALSE(r3.perfect());
  CHECK(r3.duplicate_curves.size() == 3);
}

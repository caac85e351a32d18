#include <doctest.h>

#include <random>

#include "picard/forms.hpp"

using namespace picard;

namespace {

using L = FieldLabel;

BinaryForm hf(std::vector<Rat> high) { return BinaryForm::from_high(high); }

const BinaryForm kQQK1 = BinaryForm::from_high({1, 0, 0, 1, 0});   // X^4 + X Z^3
const BinaryForm kQK3 = BinaryForm::from_high({1, 0, 0, 3, 0});    // X^4 + 3 X Z^3
const BinaryForm kQK2 = BinaryForm::from_high({1, -3, 0, 1, 0});   // X^4 - 3 X^3 Z + X Z^3

Rat random_s_rational(std::mt19937_64& rng, int h) {
  std::uniform_int_distribution<int> d(-h, h), e(0, 2);
  return Rat(d(rng)) / pow3(e(rng));
}

// Checks the conjugation formulas for Delta, Omega and cross ratios.
void check_galois(const ProperFactorization& pf) {
  SystemFrame fr(pf.system);
  CompanionData cd = companion_data(pf);
  int r = fr.r();
  for (int s = 0; s < fr.group_order(); ++s) {
    for (int i = 0; i < r; ++i) {
      CHECK(fr.apply(s, cd.omega[static_cast<std::size_t>(i)]) == cd.omega[static_cast<std::size_t>(fr.perm(s, i))]);
      for (int j = 0; j < r; ++j)
        CHECK(fr.apply(s, cd.delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) ==
              cd.delta[static_cast<std::size_t>(fr.perm(s, i))][static_cast<std::size_t>(fr.perm(s, j))]);
    }
    for (const auto& [q, x] : cd.cross)
      CHECK(fr.apply(s, x) == cd.cross.at({fr.perm(s, q[0]), fr.perm(s, q[1]), fr.perm(s, q[2]), fr.perm(s, q[3])}));
  }
}

}  // namespace

TEST_CASE("discriminant examples") {
  CHECK(discriminant(hf({1, 0, 0, -1, 0})) == -27);
  CHECK(discriminant(hf({0, 0, 1, 0, 0})) == 0);
  // X^3 Z - X Z^3: product formula over (1,0), (0,1), (1,-1), (1,1) gives 4.
  CHECK(discriminant(hf({0, 1, 0, -1, 0})) == 4);
  CHECK_THROWS_AS(discriminant(hf({1, 2})), std::invalid_argument);
  // D(mu F) = mu^(2r-2) D(F).
  CHECK(discriminant(hf({1, 0, 0, -1, 0}) * Rat(2)) == Rat(-27 * 64));
}

TEST_CASE("act examples and covariance") {
  BinaryForm f = hf({1, 0, 0, -1, 0});
  CHECK(act(f, QMat2{}) == f);
  BinaryForm g = act(f, QMat2{1, 1, 2, 1});
  CHECK(discriminant(g) == -27);
  BinaryForm g9 = act(f, QMat2{}, 9);
  CHECK(g9 == f * Rat(9));
  CHECK(good_reduction_outside_3(g9));
  CHECK_THROWS_AS(act(f, QMat2{1, 2, 2, 4}), std::invalid_argument);

  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> deg(2, 5);
  int done = 0;
  while (done < 500) {
    int r = deg(rng);
    std::vector<Rat> c(static_cast<std::size_t>(r + 1));
    for (auto& x : c) x = random_s_rational(rng, 9);
    QMat2 u{random_s_rational(rng, 4), random_s_rational(rng, 4), random_s_rational(rng, 4), random_s_rational(rng, 4)};
    if (u.det() == 0) continue;
    BinaryForm fr(c);
    Rat lhs = discriminant(act(fr, u));
    Rat rhs = rpow(u.det(), r * (r - 1)) * discriminant(fr);
    CHECK(lhs == rhs);
    ++done;
  }
}

TEST_CASE("good reduction outside 3") {
  CHECK(good_reduction_outside_3(hf({1, 0, 0, -1, 0})));
  CHECK_FALSE(good_reduction_outside_3(hf({1, -6, 11, -6, 0})));
  CHECK(good_reduction_outside_3(BinaryForm::linear(3, 1)));
  CHECK_FALSE(good_reduction_outside_3(BinaryForm::linear(2, 4)));
  CHECK(good_reduction_outside_3(BinaryForm::linear(Rat(1, 3), 3)));
  CHECK_THROWS_AS(good_reduction_outside_3(hf({0, 0, 0})), std::invalid_argument);
}

TEST_CASE("field systems") {
  CHECK(field_system_of(kQQK1) == FieldSystem({L::K0, L::K0, L::K1}));
  CHECK(field_system_of(kQK3) == FieldSystem({L::K0, L::K3}));
  CHECK(field_system_of(kQK2) == FieldSystem({L::K0, L::K2}));
  FieldSystem qk3({L::K0, L::K3});
  CHECK(qk3.components().front() == L::K3);
  CHECK(qk3.closure() == L::L3);
  CHECK(qk3.name() == "(K0,K3)");
  CHECK(FieldSystem::from_name("(K0,K0,K1)") == FieldSystem({L::K1, L::K0, L::K0}));
  CHECK(quartic_field_systems().size() == 5);
  CHECK_THROWS_AS(field_system_of(hf({1, 0, 0, 0, 2})), std::invalid_argument);
}

TEST_CASE("S-proper factorizations and companion data") {
  for (const auto& f : {kQQK1, kQK3, kQK2, hf({1, 0, 0, -1, 0}), act(kQK2, QMat2{1, 1, 2, 1}), kQQK1 * Rat(9)}) {
    CAPTURE(f.to_string());
    ProperFactorization pf = s_proper_factorization(f);
    CHECK(expand_factors(pf.vectors, pf.lambda) == pf.form);
    CHECK(pf.form.primitive() == f.primitive());
    for (const auto& a : pf.vectors) {
      CHECK(is_s_integral(a[0]));
      CHECK(is_s_integral(a[1]));
    }
    CompanionData cd = companion_data(pf);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(cd.delta[i][j] == -cd.delta[j][i]);
        if (i != j) CHECK(is_s_unit(cd.delta[i][j]));
      }
    NFElem one = NFElem::from_rat(cd.delta[0][1].field(), 1);
    CHECK(cd.cross.size() == 24);
    for (const auto& [q, x] : cd.cross) CHECK(x + cd.cross.at({q[2], q[1], q[0], q[3]}) == one);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        CHECK(delta_equation_rhs(cd.omega, cd.cross, i, j) ==
              cd.delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].pow(6));
    check_galois(pf);
  }
  CHECK_THROWS_AS(s_proper_factorization(hf({1, -6, 11, -6, 0})), std::invalid_argument);
}

TEST_CASE("anharmonic functions") {
  const std::array<Rat, 4> x{Rat(2), Rat(-7), Rat(11, 3), Rat(40)};
  auto cr = [&](int i, int j, int k, int l) -> Rat {
    return (x[i] - x[j]) * (x[k] - x[l]) / ((x[i] - x[k]) * (x[j] - x[l]));
  };
  const FieldSpec& q = field(L::K0);
  NFElem lam = NFElem::from_rat(q, cr(0, 1, 2, 3));
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    CHECK(anharmonic(anharmonic_index(p), lam) == NFElem::from_rat(q, cr(p[0], p[1], p[2], p[3])));
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK_THROWS_AS(anharmonic_index({0, 0, 1, 2}), std::invalid_argument);
}

TEST_CASE("delta candidates recover a known companion matrix") {
  for (const auto& f : {kQQK1, kQK2}) {
    ProperFactorization pf = s_proper_factorization(f);
    SystemFrame fr(pf.system);
    CompanionData cd = companion_data(pf);
    const auto& g = fr.group();
    OmegaCandidate om;
    for (const auto& x : cd.omega) om.omega.push_back(*g.exponents_of(x));
    const NFElem& lv = cd.cross.at({0, 1, 2, 3});
    TauValue lam{lv, *g.exponents_of(lv), *g.exponents_of(NFElem::from_rat(fr.closure(), 1) - lv)};
    CHECK(compatible_lambdas(fr, {lam}).size() == 1);
    auto ds = delta_candidates(fr, om, lam);
    CHECK(std::find(ds.begin(), ds.end(), cd.delta) != ds.end());
    for (const auto& d : ds) {
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(d[i][j] == -d[j][i]);
      CHECK(d[0][1] * d[2][3] / (d[0][2] * d[1][3]) == lv);
    }
    auto forms = reconstruct_forms(fr, cd.delta);
    REQUIRE_FALSE(forms.empty());
    bool found = false;
    for (const auto& rf : forms) {
      CHECK(good_reduction_outside_3(rf.form));
      CHECK(field_system_of(rf.form) == pf.system);
      if (equiv_test(f, rf.form, EquivMode::OS)) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("U_delta sets") {
  CHECK(u_delta(1) == std::vector<UBetaMatrix>{{1, 0, 1}});
  auto u2 = u_delta(2);
  CHECK(u2.size() == 3);
  CHECK(std::find(u2.begin(), u2.end(), UBetaMatrix{1, 0, 2}) != u2.end());
  CHECK(std::find(u2.begin(), u2.end(), UBetaMatrix{1, 1, 2}) != u2.end());
  CHECK(std::find(u2.begin(), u2.end(), UBetaMatrix{2, 0, 1}) != u2.end());
  CHECK(u_delta(4).size() == 7);
}

TEST_CASE("equivalence tests") {
  BinaryForm f = hf({1, 0, 0, -1, 0});
  auto self = equiv_test(f, f, EquivMode::OS0);
  REQUIRE(self);
  CHECK(act(f, self->u, self->lambda) == f);
  BinaryForm g = act(f, QMat2{1, 1, 2, 1});
  auto w = equiv_test(f, g, EquivMode::OS);
  REQUIRE(w);
  CHECK(act(f, w->u, w->lambda) == g);
  CHECK_FALSE(equiv_test(f, g, EquivMode::OS0));
  auto w9 = equiv_test(f, f * Rat(9), EquivMode::OS0);
  REQUIRE(w9);
  CHECK(act(f, w9->u, w9->lambda) == f * Rat(9));
  CHECK_FALSE(equiv_test(f, f * Rat(2), EquivMode::OS));
  CHECK_FALSE(equiv_test(kQQK1, kQK3, EquivMode::OS));
  // Symmetry and transitivity with composed witnesses.
  BinaryForm h = act(g, QMat2{1, 0, 3, 1}, Rat(1, 3));
  auto gh = equiv_test(g, h, EquivMode::OS);
  auto hg = equiv_test(h, g, EquivMode::OS);
  auto fh = equiv_test(f, h, EquivMode::OS);
  CHECK(gh);
  CHECK(hg);
  REQUIRE(fh);
  CHECK(act(f, w->u * gh->u, w->lambda * gh->lambda) == h);
  CHECK(quartic_invariant_key(f) == quartic_invariant_key(h));
}

TEST_CASE("quartic reconstruction for systems without forms") {
  using V = std::vector<TauValue>;
  CHECK(build_F4(FieldSystem({L::K0, L::K0, L::K0, L::K0}), V{}).empty());
  auto taus = tau_values(SUnitGroupSpec::load(L::K1), solve_all(L::K1).solutions);
  CHECK(taus.size() == 8);
  F4Stats st;
  CHECK(build_F4(FieldSystem({L::K1, L::K1}), taus, &st).empty());
  CHECK(st.lambdas == 0);
}

TEST_CASE("quintic extension and pairs") {
  ProperFactorization pf = s_proper_factorization(kQQK1);
  F4Record h{pf.form, pf.vectors, {}, 0, {1, 0, 1}};
  auto taus = tau_values(SUnitGroupSpec::load(L::K1), solve_all(L::K1).solutions);
  auto qs = extend_to_quintic(h, taus);
  CHECK_FALSE(qs.empty());
  for (const auto& g : qs) {
    CHECK(g.degree() == 5);
    CHECK(good_reduction_outside_3(g));
    auto pairs = to_quintic_linear_pairs(g);
    CHECK(pairs.size() >= 3);
    for (const auto& p : pairs) {
      CHECK(p.quintic == act(g, p.u));
      CHECK(p.quintic == p.quartic * p.linear);
      CHECK(p.u.det() == 1);
      CHECK(good_reduction_outside_3(p.quartic));
    }
  }
  BinaryForm zf = kQQK1 * BinaryForm::linear(0, 1);
  bool identity_pair = false;
  for (const auto& p : to_quintic_linear_pairs(zf))
    if (p.quartic == kQQK1) identity_pair = true;
  CHECK(identity_pair);
  QMat2 ux = linear_to_z(BinaryForm::linear(1, 0));
  CHECK(act(BinaryForm::linear(1, 0), ux) == BinaryForm::linear(0, 1));
  QMat2 u3 = linear_to_z(BinaryForm::linear(3, 1));
  CHECK(u3.det() == 1);
  CHECK(act(BinaryForm::linear(3, 1), u3) == BinaryForm::linear(0, 1));
  CHECK_THROWS_AS(linear_to_z(BinaryForm::linear(2, 4)), std::invalid_argument);
}

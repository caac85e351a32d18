#include <doctest.h>

#include <cmath>
#include <random>

#include "picard/sunit.hpp"

using namespace picard;

namespace {

ExponentVector ev(int a0, std::vector<long> a) { return ExponentVector{a0, std::move(a)}; }

NFElem el(FieldLabel l, std::vector<Rat> c) { return NFElem(field(l), std::move(c)); }

ExponentVector random_vector(const SUnitGroupSpec& g, long H, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(-H, H);
  std::uniform_int_distribution<int> tor(0, g.w() - 1);
  std::uniform_int_distribution<int> pick(0, g.t() - 1);
  ExponentVector v{tor(rng), std::vector<long>(static_cast<std::size_t>(g.t()))};
  for (auto& x : v.a) x = d(rng);
  v.a[static_cast<std::size_t>(pick(rng))] = (rng() & 1) ? H : -H;
  return v;
}

// Minimum over places of log |tau|_p, evaluated directly from embeddings.
Real min_log_valuation(const NFElem& x) {
  const FieldSpec& f = x.field();
  Real mn = -Real(ord_at_3(x)) * boost::multiprecision::log(Real(3));
  for (int i = 1; i <= f.r1 + f.r2; ++i) {
    Real v = boost::multiprecision::log(abs(embed_value(x, i)));
    if (i > f.r1) v *= 2;
    if (v < mn) mn = v;
  }
  return mn;
}

std::set<SUnitSolution> restrict_box(const std::set<SUnitSolution>& s, long bound) {
  std::set<SUnitSolution> out;
  for (const auto& x : s)
    if (height_H(x) <= bound) out.insert(x);
  return out;
}

}  // namespace

TEST_CASE("height_H examples") {
  CHECK(height_H(ev(1, {0})) == 0);
  CHECK(height_H(ev(0, {-3})) == 3);
  CHECK(height_H(ev(5, {2, -7, 1})) == 7);
}

TEST_CASE("generator data loads and validates") {
  for (auto l : kAllFields) {
    const auto& g = SUnitGroupSpec::load(l);
    const auto& f = g.field();
    CHECK(g.t() == f.r1 + f.r2);
    auto sat = g.saturation_primes();
    REQUIRE(sat.size() >= 2);
    CHECK(sat[0] == 2);
    CHECK(sat[1] == 3);
  }
}

TEST_CASE("validation rejects unsaturated or degenerate generators") {
  const FieldSpec& k1 = field(FieldLabel::K1);
  NFElem rho0 = el(FieldLabel::K1, {0, -1});
  NFElem rho1 = el(FieldLabel::K1, {1, 2});
  // rho1^2 = -3 leaves index 2.
  CHECK_THROWS_AS(SUnitGroupSpec(k1, rho0, {rho1 * rho1}).validate(), std::runtime_error);
  // Torsion of the wrong order.
  CHECK_THROWS_AS(SUnitGroupSpec(k1, rho0 * rho0, {rho1}).validate(), std::runtime_error);
  // The first L3 basis tried: rho0 * rho2 * rho3^2 is a cube.
  const FieldSpec& l3 = field(FieldLabel::L3);
  std::vector<NFElem> gens{el(FieldLabel::L3, {0, 1, 0, 0, 0, 0}), el(FieldLabel::L3, {-2, 0, 0, 0, 1, 0}),
                           el(FieldLabel::L3, {-2, Rat(3, 2), 0, 0, Rat(-1, 2), 0})};
  SUnitGroupSpec bad(l3, el(FieldLabel::L3, {Rat(1, 2), 0, 0, Rat(1, 2), 0, 0}), gens);
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
}

TEST_CASE("exponent recovery round trip") {
  std::mt19937_64 rng(11);
  for (auto l : kAllFields) {
    const auto& g = SUnitGroupSpec::load(l);
    for (int k = 0; k < 20; ++k) {
      ExponentVector v = random_vector(g, 1 + k * 3, rng);
      auto back = g.exponents_of(g.value(v));
      REQUIRE(back);
      CHECK(*back == v);
    }
    CHECK_FALSE(g.exponents_of(NFElem::from_rat(g.field(), 2)));
  }
}

TEST_CASE("extremal index examples") {
  const auto& k1 = SUnitGroupSpec::load(FieldLabel::K1);
  auto three = k1.exponents_of(NFElem::from_rat(k1.field(), 3));
  auto third = k1.exponents_of(NFElem::from_rat(k1.field(), Rat(1, 3)));
  REQUIRE(three);
  REQUIRE(third);
  CHECK(extremal_index(k1, *three).index == 0);
  CHECK(extremal_index(k1, *third).index == 1);
  CHECK(extremal_index(k1, *third).kind == PlaceKind::Complex);
  for (auto l : kAllFields) {
    const auto& g = SUnitGroupSpec::load(l);
    for (int a0 = 0; a0 < g.w(); ++a0)
      CHECK(extremal_index(g, ev(a0, std::vector<long>(static_cast<std::size_t>(g.t()), 0))).index == g.t());
  }
}

TEST_CASE("extremal index of tau and its inverse agree only on roots of unity") {
  std::mt19937_64 rng(5);
  for (auto l : kAllFields) {
    const auto& g = SUnitGroupSpec::load(l);
    for (int k = 0; k < 30; ++k) {
      ExponentVector v = random_vector(g, 1 + k % 7, rng);
      ExponentVector inv = v;
      inv.a0 = (g.w() - v.a0) % g.w();
      for (auto& x : inv.a) x = -x;
      CHECK(extremal_index(g, v).index != extremal_index(g, inv).index);
    }
  }
}

TEST_CASE("c3 decay property on random exponent vectors") {
  PrecisionScope ps(256);
  std::mt19937_64 rng(2024);
  for (auto l : kAllFields) {
    const auto& g = SUnitGroupSpec::load(l);
    Real c3 = compute_c3(g);
    CHECK(c3 > 0);
    for (int k = 0; k < 100; ++k) {
      long H = 1 + k % 25;
      ExponentVector v = random_vector(g, H, rng);
      Real mn = min_log_valuation(g.value(v));
      CHECK(mn <= -c3 * H + Real("1e-30"));
    }
  }
}

TEST_CASE("c3 bracket for L3") {
  Real c3 = compute_c3(SUnitGroupSpec::load(FieldLabel::L3));
  CHECK(c3 > Real("0.1"));
  CHECK(c3 < Real("0.3"));
}

TEST_SUITE("conflicts") {
  // For K1 (t = 1) the generator 2*theta+1 has log valuations (-log 3, log 3),
  // so the best possible decay constant is log 3 > 0.3.
  TEST_CASE("c3 bracket for K1") {
    Real c3 = compute_c3(SUnitGroupSpec::load(FieldLabel::K1));
    CHECK(c3 > Real("0.1"));
    CHECK(c3 < Real("0.3"));
  }

  TEST_CASE("C0 within a factor of ten of the tabulated values") {
    for (auto l : {FieldLabel::K1, FieldLabel::L3, FieldLabel::K2}) {
      double c0 = baker_bound(SUnitGroupSpec::load(l)).C0.convert_to<double>();
      double ref = reference_C0(l);
      CHECK(c0 <= 10 * ref);
      CHECK(c0 >= ref / 10);
    }
  }
}

TEST_CASE("Baker-Wustholz constant matches its closed form") {
  PrecisionScope ps(128);
  // C(1, 2) = 18 * 3! * 2^3 * 64^4 * log 8.
  double expect = 18.0 * 6 * 8 * std::pow(64.0, 4) * std::log(8.0);
  CHECK(std::abs(bw_constant(1, 2).convert_to<double>() / expect - 1) < 1e-12);
  // C(4, 6) = 18 * 6! * 5^6 * 192^7 * log 60.
  expect = 18.0 * 720 * std::pow(5.0, 6) * std::pow(192.0, 7) * std::log(60.0);
  CHECK(std::abs(bw_constant(4, 6).convert_to<double>() / expect - 1) < 1e-12);
}

TEST_CASE("modified heights") {
  PrecisionScope ps(256);
  // 2*theta+1 = i*sqrt(3) in K1: h0 = log 3, |log| = |log sqrt 3 + i pi/2|.
  auto r = el(FieldLabel::K1, {1, 2});
  double h = modified_height(r, 1).convert_to<double>();
  double lg = std::hypot(0.5 * std::log(3.0), std::acos(-1.0) / 2);
  CHECK(h == doctest::Approx(std::max({std::log(3.0), lg, 1.0}) / 2));
  // zeta_6 in degree 2: max(2 pi / 6, 1) / 2.
  CHECK(modified_height_root_of_unity(6, 2).convert_to<double>() == doctest::Approx(std::acos(-1.0) / 3 / 2));
  CHECK(modified_height_root_of_unity(2, 3).convert_to<double>() == doctest::Approx(std::acos(-1.0) / 3));
}

TEST_CASE("bound reduction for small fields satisfies the lattice condition") {
  for (auto l : {FieldLabel::K0, FieldLabel::K1, FieldLabel::K3}) {
    const auto& g = SUnitGroupSpec::load(l);
    BoundReport r = reduce_bound(g, baker_bound(g));
    CHECK(r.C0p >= 1);
    CHECK(r.C0p <= 2 * reference_C0p(l));
    REQUIRE(!r.C0_history.empty());
    Real C0 = r.C0_history.back();
    for (std::size_t h = 0; h < r.C1.size(); ++h)
      CHECK(r.C1[h] * r.C1[h] > r.T_L[h] * r.T_L[h] + Real(g.t() - 1) * C0 * C0);
  }
}

TEST_CASE("K1 self-cyclic solution of sixth roots of unity") {
  const auto& g = SUnitGroupSpec::load(FieldLabel::K1);
  SUnitSolution s(ev(1, {0}), ev(5, {0}));
  CHECK(is_solution(g, s));
  auto c = cycle(g, s);
  CHECK(c.size() == 1);
  CHECK(*c.begin() == s);
}

TEST_CASE("K0, K1 and K3 solution sets") {
  CHECK(solve_all(FieldLabel::K0).solutions.empty());
  CHECK(solve_all(FieldLabel::K3).solutions.empty());
  const auto& g = SUnitGroupSpec::load(FieldLabel::K1);
  auto res = solve_all(FieldLabel::K1);
  CHECK(res.solutions.size() == 4);
  CHECK(res.solutions.count(SUnitSolution(ev(1, {0}), ev(5, {0}))) == 1);
  for (const auto& s : res.solutions) {
    CHECK(is_solution(g, s));
    auto c = cycle(g, s);
    bool nonzero = false;
    for (const auto& x : c) {
      CHECK(res.solutions.count(x) == 1);
      CHECK(cycle(g, x) == c);
      nonzero = nonzero || extremal_index(g, x).index != 0;
    }
    CHECK(nonzero);
  }
}

TEST_CASE("sieve agrees with brute force on small boxes") {
  const auto& k1 = SUnitGroupSpec::load(FieldLabel::K1);
  CHECK(brute_force(k1, 5) == restrict_box(sieve_box(k1, 5), 5));
  CHECK(restrict_box(sieve_solve(k1, 5), 5) == brute_force(k1, 5));
  const auto& l3 = SUnitGroupSpec::load(FieldLabel::L3);
  auto bf = brute_force(l3, 3);
  CHECK(!bf.empty());
  CHECK(bf == restrict_box(sieve_box(l3, 3), 3));
}

TEST_CASE("Galois images of solutions are solutions") {
  for (auto l : {FieldLabel::K1, FieldLabel::L3}) {
    const auto& g = SUnitGroupSpec::load(l);
    std::set<SUnitSolution> sols = l == FieldLabel::K1 ? solve_all(l).solutions : sieve_solve(g, 3);
    const auto& autos = automorphism_images(g.field());
    for (const auto& s : sols)
      for (const auto& sig : autos) {
        NFElem x = apply_automorphism(sig, g.value(s.tau0));
        NFElem y = apply_automorphism(sig, g.value(s.tau1));
        CHECK(x + y == NFElem::from_rat(g.field(), 1));
        auto ex = g.exponents_of(x);
        auto ey = g.exponents_of(y);
        REQUIRE(ex);
        REQUIRE(ey);
        if (l == FieldLabel::K1) CHECK(sols.count(SUnitSolution(*ex, *ey)) == 1);
      }
  }
}

#include <doctest.h>

#include "picard/arith.hpp"
#include "picard/linalg.hpp"
#include "picard/poly.hpp"
#include "picard/real.hpp"

using namespace picard;

TEST_CASE("3-adic helpers") {
  CHECK(v3(Int(162)) == 4);
  CHECK(v3(Rat(2, 27)) == -3);
  CHECK(strip3(Int(-54)) == -2);
  CHECK(is_pm_power_of_3(Rat(-1, 9)));
  CHECK(!is_pm_power_of_3(Rat(2, 3)));
  CHECK(is_3_integral(Rat(5, 81)));
  CHECK(!is_3_integral(Rat(5, 6)));
  CHECK(pow3(-2) == Rat(1, 9));
}

TEST_CASE("roots and cubes") {
  CHECK(*exact_root(Int(343), 3) == 7);
  CHECK(!exact_root(Int(344), 3));
  CHECK(is_rational_cube(Rat(-8, 27)));
  CHECK(*rational_cube_root(Rat(-8, 27)) == Rat(-2, 3));
  CHECK(!is_rational_cube(Rat(3)));
}

TEST_CASE("rational serialization round trip") {
  Rat x(-22, 6);
  x.canonicalize();
  CHECK(rat_to_string(x) == "-11/3");
  CHECK(rat_from_string("-11/3") == x);
  CHECK(rat_from_string("7") == Rat(7));
}

TEST_CASE("factorization multiplies back") {
  Int n("1234567890123456789");
  Int prod = 1;
  for (auto& [p, e] : factor(n)) {
    CHECK(is_prime_u64(p.get_ui()));
    prod *= ipow(p, e);
  }
  CHECK(prod == n);
  CHECK(divisors(Int(12)).size() == 6);
}

TEST_CASE("modular helpers") {
  CHECK(powmod_u64(3, 6, 7) == 1);
  CHECK((invmod_u64(3, 7) * 3) % 7 == 1);
  CHECK(mod_rat(Rat(1, 3), 7) == 5);
  CHECK(pos_mod(-1, 5) == 4);
  CHECK(floor_div(-7, 2) == -4);
}

TEST_CASE("matrix inverse and kernel") {
  QMatrix a{{Rat(2), Rat(1)}, {Rat(1), Rat(1)}};
  CHECK(q_det(a) == 1);
  CHECK(q_mul(a, q_inverse(a)) == q_identity(2));
  QMatrix s{{Rat(1), Rat(2)}, {Rat(2), Rat(4)}};
  CHECK_THROWS_AS(q_inverse(s), std::domain_error);
  auto k = q_kernel(s);
  REQUIRE(k.size() == 1);
  CHECK(q_mul(s, k[0]) == QVector{Rat(0), Rat(0)});
  // x^2 - 3x + 1 for [[2,1],[1,1]]
  CHECK(q_charpoly(a) == std::vector<Rat>{Rat(1), Rat(-3), Rat(1)});
}

TEST_CASE("polynomial resultant and discriminant") {
  QPoly f({Rat(1), Rat(1), Rat(1)});
  QPoly g({Rat(1), Rat(2)});
  CHECK(resultant(f, g) == 3);
  CHECK(discriminant(f) == -3);
  CHECK(discriminant(QPoly({Rat(1), Rat(-3), Rat(0), Rat(1)})) == 81);
  CHECK(discriminant(QPoly({Rat(-3), Rat(0), Rat(0), Rat(1)})) == -243);
}

TEST_CASE("factorization over Q") {
  // (x^2+x+1)(x-2)(3x+1)
  QPoly f = QPoly({Rat(1), Rat(1), Rat(1)}) * QPoly({Rat(-2), Rat(1)}) * QPoly({Rat(1), Rat(3)});
  PrecisionScope ps(256);
  auto fac = factor_squarefree(f);
  REQUIRE(fac.size() == 3);
  QPoly prod({Rat(1)});
  for (auto& q : fac) prod = prod * q;
  CHECK(prod == f.monic());
  auto rr = rational_roots(f * QPoly({Rat(-2), Rat(1)}));
  CHECK(rr == std::vector<Rat>{Rat(-1, 3), Rat(2)});
}

TEST_CASE("rational recognition") {
  PrecisionScope ps(256);
  Real x = to_real(Rat(355, 113));
  auto q = recognize_rational(x, Int(1000), Real("1e-60"));
  REQUIRE(q);
  CHECK(*q == Rat(355, 113));
}

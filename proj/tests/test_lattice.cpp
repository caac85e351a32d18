#include <doctest.h>

#include <random>

#include "picard/lattice.hpp"
#include "picard/linalg.hpp"

using namespace picard;

namespace {

IntLattice diag_lattice(std::vector<long> d) {
  IntLattice l;
  for (std::size_t j = 0; j < d.size(); ++j) {
    IntVector c(d.size(), Int(0));
    c[j] = d[j];
    l.cols.push_back(c);
  }
  return l;
}

// Old basis expressed in the new one must be an integer matrix of det +-1.
bool same_lattice(const IntLattice& a, const IntLattice& b) {
  std::size_t n = a.cols.size();
  QMatrix mb(n, QVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mb[i][j] = b.cols[j][i];
  QMatrix inv = q_inverse(mb);
  QMatrix u(n, QVector(n));
  for (std::size_t j = 0; j < n; ++j) {
    QVector col(a.cols[j].begin(), a.cols[j].end());
    QVector c = q_mul(inv, col);
    for (std::size_t i = 0; i < n; ++i) {
      if (c[i].get_den() != 1) return false;
      u[i][j] = c[i];
    }
  }
  return abs(q_det(u)) == 1;
}

}  // namespace

TEST_CASE("identity basis is already reduced") {
  auto l = diag_lattice({1, 1, 1});
  auto r = lll_reduce(l);
  CHECK(r.cols == l.cols);
}

TEST_CASE("unimodular plane lattice") {
  IntLattice l{{{Int(1), Int(0)}, {Int(10), Int(1)}}};
  auto r = lll_reduce(l);
  Int n2 = r.cols[0][0] * r.cols[0][0] + r.cols[0][1] * r.cols[0][1];
  CHECK(n2 <= 2);
  CHECK(same_lattice(l, r));
  CHECK(is_lll_reduced(r));
}

TEST_CASE("random unimodular transforms of diag(1,2,3)") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> d(-5, 5);
  for (int trial = 0; trial < 30; ++trial) {
    auto l = diag_lattice({1, 2, 3});
    // Random elementary column operations keep the lattice.
    for (int s = 0; s < 12; ++s) {
      std::size_t i = static_cast<std::size_t>(rng() % 3), j = static_cast<std::size_t>(rng() % 3);
      if (i == j) continue;
      int k = d(rng);
      for (std::size_t r = 0; r < 3; ++r) l.cols[i][r] += k * l.cols[j][r];
    }
    auto r = lll_reduce(l);
    CHECK(is_lll_reduced(r, Rat(3, 4)));
    CHECK(same_lattice(l, r));
    CHECK(lattice_det(r) == 6);
  }
}

TEST_CASE("dependent columns rejected") {
  IntLattice l{{{Int(1), Int(2)}, {Int(2), Int(4)}}};
  CHECK_THROWS_AS(lll_reduce(l), std::domain_error);
}

TEST_CASE("shortest vector lower bound formula") {
  PrecisionScope ps(128);
  CHECK(abs(shortest_vector_lower_bound(diag_lattice({1, 1})) - boost::multiprecision::sqrt(Real(2)) / 2) < Real("1e-30"));
  CHECK(abs(shortest_vector_lower_bound(diag_lattice({5, 5, 5})) - Real(5) / 2) < Real("1e-30"));
  IntLattice bad{{{Int(1), Int(0)}, {Int(10), Int(1)}}};
  CHECK_THROWS_AS(shortest_vector_lower_bound(bad), std::invalid_argument);
}

TEST_CASE("lower bound holds for small-box lattice vectors") {
  PrecisionScope ps(128);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> d(-40, 40);
  for (int trial = 0; trial < 10; ++trial) {
    IntLattice l;
    for (int j = 0; j < 3; ++j) l.cols.push_back({Int(d(rng)), Int(d(rng)), Int(d(rng))});
    if (lattice_det(l) == 0) continue;
    auto r = lll_reduce(l);
    Real lb = shortest_vector_lower_bound(r);
    for (int a = -4; a <= 4; ++a)
      for (int b = -4; b <= 4; ++b)
        for (int c = -4; c <= 4; ++c) {
          if (!a && !b && !c) continue;
          Int n2 = 0;
          for (int i = 0; i < 3; ++i) {
            Int x = a * l.cols[0][i] + b * l.cols[1][i] + c * l.cols[2][i];
            n2 += x * x;
          }
          CHECK(boost::multiprecision::sqrt(to_real(n2)) >= lb);
        }
  }
}

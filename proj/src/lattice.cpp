#include "picard/lattice.hpp"

#include <stdexcept>

#include "picard/linalg.hpp"

namespace picard {

namespace {

Rat dot(const IntVector& a, const IntVector& b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return Rat(s);
}

Rat dot(const QVector& a, const IntVector& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct GramSchmidt {
  std::vector<Rat> bstar2;           // |b*_i|^2
  std::vector<std::vector<Rat>> mu;  // mu[i][j], j < i
};

GramSchmidt gram_schmidt(const std::vector<IntVector>& b) {
  std::size_t n = b.size();
  GramSchmidt g;
  g.bstar2.assign(n, Rat(0));
  g.mu.assign(n, std::vector<Rat>(n, Rat(0)));
  std::vector<QVector> bs(n);
  for (std::size_t i = 0; i < n; ++i) {
    bs[i] = QVector(b[i].begin(), b[i].end());
    for (std::size_t j = 0; j < i; ++j) {
      if (g.bstar2[j] == 0) throw std::domain_error("dependent lattice columns");
      g.mu[i][j] = dot(bs[j], b[i]) / g.bstar2[j];
      for (std::size_t k = 0; k < bs[i].size(); ++k) bs[i][k] -= g.mu[i][j] * bs[j][k];
    }
    Rat s = 0;
    for (const auto& x : bs[i]) s += x * x;
    g.bstar2[i] = s;
    if (s == 0) throw std::domain_error("dependent lattice columns");
  }
  return g;
}

Int round_rat(const Rat& x) {
  // Nearest integer, halves rounded down.
  Rat y = x + Rat(1, 2);
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  return q;
}

}  // namespace

IntLattice IntLattice::from_matrix_columns(const std::vector<IntVector>& rows) {
  IntLattice l;
  std::size_t n = rows.size();
  l.cols.assign(n, IntVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) l.cols[j][i] = rows[i][j];
  return l;
}

IntLattice lll_reduce(const IntLattice& l, const Rat& delta) {
  if (delta <= Rat(1, 4) || delta >= 1) throw std::invalid_argument("LLL parameter out of range");
  std::vector<IntVector> b = l.cols;
  std::size_t n = b.size();
  GramSchmidt g = gram_schmidt(b);
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t j = k; j-- > 0;) {
      Int r = round_rat(g.mu[k][j]);
      if (r == 0) continue;
      for (std::size_t i = 0; i < b[k].size(); ++i) b[k][i] -= r * b[j][i];
      g = gram_schmidt(b);
    }
    if (g.bstar2[k] >= (delta - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.bstar2[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      g = gram_schmidt(b);
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return IntLattice{b};
}

bool is_lll_reduced(const IntLattice& l, const Rat& delta) {
  GramSchmidt g = gram_schmidt(l.cols);
  std::size_t n = l.cols.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (abs(g.mu[i][j]) > Rat(1, 2)) return false;
  for (std::size_t k = 1; k < n; ++k)
    if (g.bstar2[k] < (delta - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.bstar2[k - 1]) return false;
  return true;
}

Real shortest_vector_lower_bound(const IntLattice& l) {
  if (l.cols.empty() || !is_lll_reduced(l)) throw std::invalid_argument("lattice basis is not LLL-reduced");
  int t = l.dim() - 1;
  Real len = boost::multiprecision::sqrt(to_real(dot(l.cols[0], l.cols[0]).get_num()));
  return len * boost::multiprecision::pow(Real(2), Real(-t) / 2);
}

Int lattice_det(const IntLattice& l) {
  QMatrix m(l.cols.size(), QVector(l.cols.size()));
  for (std::size_t i = 0; i < l.cols.size(); ++i)
    for (std::size_t j = 0; j < l.cols.size(); ++j) m[i][j] = l.cols[j][i];
  return abs(q_det(m).get_num());
}

}  // namespace picard

#include "picard/linalg.hpp"

#include <stdexcept>

namespace picard {

QMatrix q_identity(std::size_t n) {
  QMatrix m(n, QVector(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

QMatrix q_mul(const QMatrix& a, const QMatrix& b) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  QMatrix c(n, QVector(m, Rat(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

QVector q_mul(const QMatrix& a, const QVector& v) {
  QVector r(a.size(), Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

QMatrix q_transpose(const QMatrix& a) {
  if (a.empty()) return {};
  QMatrix t(a[0].size(), QVector(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

Rat q_det(QMatrix a) {
  std::size_t n = a.size();
  Rat det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      Rat f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

std::size_t q_rank(QMatrix a) {
  if (a.empty()) return 0;
  std::size_t rows = a.size(), cols = a[0].size(), rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      Rat f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

QMatrix q_inverse(const QMatrix& m) {
  std::size_t n = m.size();
  QMatrix a = m, inv = q_identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rat piv = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= piv;
      inv[c][k] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rat f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

QVector q_solve(const QMatrix& a, const QVector& b) { return q_mul(q_inverse(a), b); }

std::vector<QVector> q_kernel(QMatrix a) {
  if (a.empty()) return {};
  std::size_t rows = a.size(), cols = a[0].size();
  std::vector<std::size_t> pivcol;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Rat piv = a[r][c];
    for (std::size_t k = 0; k < cols; ++k) a[r][k] /= piv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (std::size_t k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
    }
    pivcol.push_back(c);
    ++r;
  }
  std::vector<QVector> basis;
  std::vector<bool> is_piv(cols, false);
  for (auto c : pivcol) is_piv[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_piv[f]) continue;
    QVector v(cols, Rat(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = -a[i][f];
    basis.push_back(v);
  }
  return basis;
}

std::vector<Rat> q_charpoly(const QMatrix& a) {
  // Faddeev-LeVerrier.
  std::size_t n = a.size();
  std::vector<Rat> c(n + 1, Rat(0));
  c[n] = 1;
  QMatrix mk(n, QVector(n, Rat(0)));
  for (std::size_t k = 1; k <= n; ++k) {
    QMatrix prod = q_mul(a, mk);
    for (std::size_t i = 0; i < n; ++i) prod[i][i] += c[n - k + 1];
    mk = prod;
    QMatrix am = q_mul(a, mk);
    Rat tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am[i][i];
    c[n - k] = -tr / Rat(static_cast<long>(k));
  }
  return c;
}

}  // namespace picard

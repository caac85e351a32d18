#pragma once

#include <vector>

#include "picard/arith.hpp"

namespace picard {

// Dense row-major matrix over Q.
using QMatrix = std::vector<std::vector<Rat>>;
using QVector = std::vector<Rat>;

QMatrix q_identity(std::size_t n);
QMatrix q_mul(const QMatrix& a, const QMatrix& b);
QVector q_mul(const QMatrix& a, const QVector& v);
QMatrix q_transpose(const QMatrix& a);
Rat q_det(QMatrix a);
std::size_t q_rank(QMatrix a);
// Throws std::domain_error on singular input.
QMatrix q_inverse(const QMatrix& a);
QVector q_solve(const QMatrix& a, const QVector& b);
// Basis of the right kernel {x : a x = 0}.
std::vector<QVector> q_kernel(QMatrix a);

// Characteristic polynomial det(xI - a), coefficients low to high.
std::vector<Rat> q_charpoly(const QMatrix& a);

}  // namespace picard

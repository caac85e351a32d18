#pragma once

#include <vector>

#include "picard/arith.hpp"
#include "picard/real.hpp"

namespace picard {

using IntVector = std::vector<Int>;

// Full-rank integer lattice; cols[j] is the j-th basis vector.
struct IntLattice {
  std::vector<IntVector> cols;
  int dim() const { return static_cast<int>(cols.size()); }
  // Builds from a row-major square matrix whose columns are the generators.
  static IntLattice from_matrix_columns(const std::vector<IntVector>& rows);
};

// Exact LLL reduction with parameter delta in (1/4, 1). Throws
// std::domain_error on dependent columns.
IntLattice lll_reduce(const IntLattice& l, const Rat& delta = Rat(3, 4));
bool is_lll_reduced(const IntLattice& l, const Rat& delta = Rat(3, 4));

// 2^{-t/2} |b_0| for a lattice of dimension t + 1; requires an LLL-reduced
// basis and throws std::invalid_argument otherwise.
Real shortest_vector_lower_bound(const IntLattice& l);

// Absolute determinant.
Int lattice_det(const IntLattice& l);

}  // namespace picard

#pragma once

#include <vector>

#include "gridla/matrix.hpp"

// Serial reference algorithms. These are deliberately self-contained and do
// not share code with the distributed implementations they validate.

namespace gridla {

struct SerialLU {
  Permutation perm;
  DenseMatrix l;  // unit lower triangular
  DenseMatrix u;  // upper triangular
};

/// Textbook Gaussian elimination with partial pivoting; PA = LU.
SerialLU serial_lu_oracle(const DenseMatrix& a);

struct SerialEig {
  std::vector<double> eigenvalues;  // in diagonal position order, unsorted
  DenseMatrix v;                    // orthogonal, B = V diag V^T
};

/// Cyclic-by-rows Jacobi eigensolver for a symmetric matrix.
SerialEig serial_jacobi_oracle(const DenseMatrix& b, int max_sweeps = 50);

/// Serial solve of Ux = rhs for upper triangular U.
std::vector<double> serial_back_substitute(const DenseMatrix& u,
                                           const std::vector<double>& rhs);

}  // namespace gridla

#pragma once

#include <cstdint>
#include <optional>

#include "gridla/fabric.hpp"
#include "gridla/layout.hpp"
#include "gridla/matrix.hpp"

namespace gridla {

struct BlockParams {
  int omega = 1;  // strip width
};

struct LUFactorization {
  int n = 0;
  Permutation perm;
  DenseMatrix lu;  // strict lower = multipliers, upper = U, unit diag implicit
  CostLedger ledger;
  /// Max over elimination steps and processors of words moved (sent +
  /// received) by one processor within that step.
  std::int64_t max_step_words = 0;

  DenseMatrix lower() const;
  DenseMatrix upper() const;
  double max_multiplier() const;
  /// inf-norm of PA - LU against the original matrix.
  double residual(const DenseMatrix& a) const;
};

/// Distributed Gaussian elimination with partial pivoting. The blocked
/// variant defers trailing updates until omega pivots have been chosen; it
/// performs bit-identical arithmetic in a different communication pattern.
LUFactorization lu_factor(const DenseMatrix& a, const Layout& layout,
                          const GridConfig& config,
                          std::optional<BlockParams> block = std::nullopt);

struct SolveResult {
  DenseMatrix x;  // n x 1
  CostLedger ledger;
};

/// Solve Ax = b by eliminating the augmented matrix [A | b] and
/// back-substituting the resulting triangular system.
SolveResult lu_solve(const DenseMatrix& a, const DenseMatrix& b,
                     const Layout& layout, const GridConfig& config);

struct TriangularSolve {
  DenseMatrix x;  // n x 1
  CostLedger ledger;
};

/// Distributed solve of Ux = rhs for upper triangular U.
TriangularSolve back_substitute(const DenseMatrix& u, const DenseMatrix& rhs,
                                const Layout& layout, const GridConfig& config);

/// Default strip width, omega ~ sqrt(n).
int default_omega(int n);

}  // namespace gridla

#pragma once

#include <vector>

#include "gridla/fabric.hpp"
#include "gridla/layout.hpp"
#include "gridla/matrix.hpp"

namespace gridla {

struct GivensRotation {
  int row_top = 0;  // rotation mixes rows (row_top, row_top + 1)
  int col = 0;      // entry (row_top + 1, col) is annihilated
  double c = 1.0;
  double s = 0.0;
};

struct QRFactorization {
  int m = 0, n = 0;
  DenseMatrix r;  // n x n upper triangular
  std::vector<std::vector<double>> reflectors;  // Householder u vectors, length m
  std::vector<GivensRotation> rotations;        // Givens variant
  CostLedger ledger;

  /// Materialize the thin m x n Q for verification.
  DenseMatrix thin_q() const;
  /// Apply Q^T to a length-m vector.
  std::vector<double> apply_qt(const std::vector<double>& v) const;
};

/// Householder QR; the u vectors are broadcast over the grid like the pivot
/// row and multiplier column in Gaussian elimination.
QRFactorization qr_householder(const DenseMatrix& a, const Layout& layout,
                               const GridConfig& config);

/// Givens QR with a diagonal-wavefront rotation schedule.
QRFactorization qr_givens(const DenseMatrix& a, const Layout& layout,
                          const GridConfig& config);

/// Least squares via Householder QR: min ||Ax - b||_2 for full-rank A.
DenseMatrix least_squares(const DenseMatrix& a, const DenseMatrix& b,
                          const Layout& layout, const GridConfig& config);

}  // namespace gridla

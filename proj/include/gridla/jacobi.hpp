#pragma once

#include <utility>
#include <vector>

#include "gridla/fabric.hpp"
#include "gridla/layout.hpp"
#include "gridla/matrix.hpp"

namespace gridla {

enum class SweepOrdering { CyclicRows, Tournament };

/// One sweep's worth of rotation rounds. Pairs within a round touch disjoint
/// indices and run in parallel. For the tournament ordering, board_of[r][i]
/// is the linear-array position of column i during round r, so the adjacency
/// of the between-round exchanges can be checked structurally.
struct SweepSchedule {
  int n = 0;
  std::vector<std::vector<std::pair<int, int>>> rounds;
  std::vector<std::vector<int>> board_of;  // tournament only

  int pair_count() const;
};

SweepSchedule make_schedule(int n, SweepOrdering ordering);

struct RotatedPair {
  std::vector<double> a_i, a_j;
  double theta = 0.0;
};

/// Plane-rotate two columns so they become orthogonal; |theta| <= pi/4.
RotatedPair rotate_pair(const std::vector<double>& a_i,
                        const std::vector<double>& a_j);

struct JacobiOptions {
  double tol = 1e-12;  // relative threshold
  int max_sweeps = 30;
  SweepOrdering ordering = SweepOrdering::Tournament;
  bool extra_step_even_n = true;
};

struct SVDResult {
  DenseMatrix u_tilde;          // m x n, orthonormal nonnull columns
  std::vector<double> sigma;    // nonincreasing
  DenseMatrix v;                // n x n orthogonal
  int sweeps_used = 0;
  std::int64_t rotations = 0;
  double max_abs_theta = 0.0;
  CostLedger ledger;
};

struct EigResult {
  std::vector<double> eigenvalues;  // nonincreasing
  DenseMatrix v;
  int sweeps_used = 0;
  std::int64_t rotations = 0;
  double max_abs_theta = 0.0;
  CostLedger ledger;
};

struct SvdNoConvergence : NoConvergenceError {
  SVDResult best;
  SvdNoConvergence(int sweeps, SVDResult b)
      : NoConvergenceError(sweeps), best(std::move(b)) {}
};

struct EigNoConvergence : NoConvergenceError {
  EigResult best;
  EigNoConvergence(int sweeps, EigResult b)
      : NoConvergenceError(sweeps), best(std::move(b)) {}
};

/// Hestenes one-sided Jacobi SVD. Costs are modeled on a linear array of
/// ceil(n/2) virtual processors, two columns each, folded onto the grid.
SVDResult hestenes_svd(const DenseMatrix& a, const JacobiOptions& options,
                       const Layout& layout, const GridConfig& config);

/// Symmetric eigensolver built on the same rotation engine.
EigResult jacobi_eig(const DenseMatrix& b, const JacobiOptions& options,
                     const GridConfig& config);

}  // namespace gridla

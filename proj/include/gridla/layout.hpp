#pragma once

#include <utility>
#include <vector>

#include "gridla/matrix.hpp"

namespace gridla {

enum class LayoutKind { ColumnWrapped, RowWrapped, Blocked, Scattered };

struct Placement {
  int proc_row = 0;
  int proc_col = 0;
  int local_row = 0;
  int local_col = 0;
  bool operator==(const Placement&) const = default;
};

/// Distribution scheme mapping global matrix indices onto an s x s grid.
/// Blocked and scattered pad the matrix with zero rows/columns up to
/// multiples of s; the original dimensions are retained so collect() can
/// strip the padding.
class Layout {
 public:
  Layout(LayoutKind kind, int s, int m, int n);

  LayoutKind kind() const { return kind_; }
  int grid_side() const { return s_; }
  int rows() const { return m_; }
  int cols() const { return n_; }
  int padded_rows() const { return mp_; }
  int padded_cols() const { return np_; }

  Placement place(int i, int j) const;
  std::pair<int, int> global_of(int proc_row, int proc_col, int local_row,
                                int local_col) const;
  /// Local storage dimensions at one processor (over the padded index set).
  std::pair<int, int> local_extent(int proc_row, int proc_col) const;

  /// Per-processor local matrices, indexed proc_row * s + proc_col.
  /// Processors with an empty local slice get a 1x1 zero placeholder.
  std::vector<DenseMatrix> distribute(const DenseMatrix& a) const;
  DenseMatrix collect(const std::vector<DenseMatrix>& locals) const;

 private:
  LayoutKind kind_;
  int s_;
  int m_, n_;    // original dimensions
  int mp_, np_;  // padded dimensions
};

/// The k x k wrap permutation relating scattered and blocked storage:
/// row i maps to (i*s) mod (k-1) for i < k-1 and k-1 maps to itself.
Permutation pi_permutation(int k, int s);

/// True iff the scattered distribution of A coincides, processor by
/// processor, with the blocked distribution of pi_m * A * pi_n^{-1}.
bool scattered_blocked_equivalent(const DenseMatrix& a, int s);

}  // namespace gridla

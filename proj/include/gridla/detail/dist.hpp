#pragma once

#include <cstdint>
#include <vector>

#include "gridla/fabric.hpp"
#include "gridla/layout.hpp"

// Shared cost-charging helpers for the distributed algorithm drivers.

namespace gridla::detail {

/// Number of j in [j0, j1) with j ≡ rem (mod m).
int count_mod(int j0, int j1, int m, int rem);

/// Batches per-processor flop charges over a layout and flushes them to the
/// fabric in processor order.
class Charger {
 public:
  Charger(const Layout& lay, GridFabric& fab);

  int grid_side() const { return s_; }
  int processors() const { return p_; }
  Coord coord_of(int id) const { return {id / s_, id % s_}; }
  int owner_id(int i, int j) const;

  void add(int proc, std::int64_t flops) { batch_[proc] += flops; }
  /// fpe flops per entry of row i, columns [j0, j1).
  void add_row_range(int i, int j0, int j1, int fpe);
  void flush();

  /// Columns in [j0, j1) owned by one grid column (Scattered/Blocked only).
  int cols_owned(int j0, int j1, int proc_col) const;
  int rows_owned(int i0, int i1, int proc_row) const;

  const Layout& layout() const { return lay_; }
  GridFabric& fabric() { return fab_; }

 private:
  const Layout& lay_;
  GridFabric& fab_;
  int s_, p_;
  std::vector<std::int64_t> batch_;
};

/// Charge a binomial-tree combine over the listed processors (words per
/// message); the combined value ends at procs.front() and the caller is
/// responsible for folding the actual values in the same order.
void tree_reduce(GridFabric& fab, const std::vector<int>& procs,
                 std::int64_t words);

}  // namespace gridla::detail

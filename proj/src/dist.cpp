#include "gridla/detail/dist.hpp"

#include <algorithm>

namespace gridla::detail {

int count_mod(int j0, int j1, int m, int rem) {
  if (j1 <= j0) return 0;
  const int first = j0 + ((rem - j0) % m + m) % m;
  if (first >= j1) return 0;
  return (j1 - first + m - 1) / m;
}

Charger::Charger(const Layout& lay, GridFabric& fab)
    : lay_(lay),
      fab_(fab),
      s_(lay.grid_side()),
      p_(s_ * s_),
      batch_(p_, 0) {}

int Charger::owner_id(int i, int j) const {
  const Placement p = lay_.place(i, j);
  return p.proc_row * s_ + p.proc_col;
}

void Charger::add_row_range(int i, int j0, int j1, int fpe) {
  if (j1 <= j0) return;
  switch (lay_.kind()) {
    case LayoutKind::Scattered: {
      const int pr = i % s_;
      for (int c = 0; c < s_; ++c) {
        add(pr * s_ + c, std::int64_t(fpe) * count_mod(j0, j1, s_, c));
      }
      break;
    }
    case LayoutKind::Blocked: {
      const int br = lay_.padded_rows() / s_;
      const int bc = lay_.padded_cols() / s_;
      const int pr = i / br;
      for (int c = 0; c < s_; ++c) {
        const int lo = std::max(j0, c * bc), hi = std::min(j1, (c + 1) * bc);
        if (hi > lo) add(pr * s_ + c, std::int64_t(fpe) * (hi - lo));
      }
      break;
    }
    case LayoutKind::ColumnWrapped: {
      for (int q = 0; q < p_; ++q) {
        add(q, std::int64_t(fpe) * count_mod(j0, j1, p_, q));
      }
      break;
    }
    case LayoutKind::RowWrapped: {
      add(i % p_, std::int64_t(fpe) * (j1 - j0));
      break;
    }
  }
}

void Charger::flush() {
  for (int q = 0; q < p_; ++q) {
    if (batch_[q] > 0) {
      fab_.charge_flops(coord_of(q), batch_[q]);
      batch_[q] = 0;
    }
  }
}

int Charger::cols_owned(int j0, int j1, int proc_col) const {
  if (lay_.kind() == LayoutKind::Scattered) {
    return count_mod(j0, j1, s_, proc_col);
  }
  const int bc = lay_.padded_cols() / s_;
  return std::max(
      0, std::min(j1, (proc_col + 1) * bc) - std::max(j0, proc_col * bc));
}

int Charger::rows_owned(int i0, int i1, int proc_row) const {
  if (lay_.kind() == LayoutKind::Scattered) {
    return count_mod(i0, i1, s_, proc_row);
  }
  const int br = lay_.padded_rows() / s_;
  return std::max(
      0, std::min(i1, (proc_row + 1) * br) - std::max(i0, proc_row * br));
}

void tree_reduce(GridFabric& fab, const std::vector<int>& procs,
                 std::int64_t words) {
  const int s = fab.config().s;
  auto coord = [s](int id) { return Coord{id / s, id % s}; };
  for (int gap = 1; gap < int(procs.size()); gap *= 2) {
    for (int a = 0; a + gap < int(procs.size()); a += 2 * gap) {
      fab.send(coord(procs[a + gap]), coord(procs[a]), words);
    }
  }
}

}  // namespace gridla::detail

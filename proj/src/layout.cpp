#include "gridla/layout.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridla {

namespace {
int round_up(int x, int mult) { return ((x + mult - 1) / mult) * mult; }
}  // namespace

Layout::Layout(LayoutKind kind, int s, int m, int n)
    : kind_(kind), s_(s), m_(m), n_(n) {
  if (s < 1) throw std::invalid_argument("layout: grid side must be >= 1");
  if (m < 1 || n < 1) {
    throw std::invalid_argument("layout: dimensions must be >= 1");
  }
  const bool pads =
      kind == LayoutKind::Blocked || kind == LayoutKind::Scattered;
  mp_ = pads ? round_up(m, s) : m;
  np_ = pads ? round_up(n, s) : n;
}

Placement Layout::place(int i, int j) const {
  if (i < 0 || i >= mp_ || j < 0 || j >= np_) {
    throw std::out_of_range("layout: index (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range");
  }
  switch (kind_) {
    case LayoutKind::ColumnWrapped: {
      const int p = s_ * s_;
      const int q = j % p;
      return {q / s_, q % s_, i, j / p};
    }
    case LayoutKind::RowWrapped: {
      const int p = s_ * s_;
      const int q = i % p;
      return {q / s_, q % s_, i / p, j};
    }
    case LayoutKind::Blocked: {
      const int br = mp_ / s_, bc = np_ / s_;
      return {i / br, j / bc, i % br, j % bc};
    }
    case LayoutKind::Scattered:
      return {i % s_, j % s_, i / s_, j / s_};
  }
  return {};
}

std::pair<int, int> Layout::global_of(int proc_row, int proc_col,
                                      int local_row, int local_col) const {
  switch (kind_) {
    case LayoutKind::ColumnWrapped: {
      const int q = proc_row * s_ + proc_col;
      return {local_row, local_col * s_ * s_ + q};
    }
    case LayoutKind::RowWrapped: {
      const int q = proc_row * s_ + proc_col;
      return {local_row * s_ * s_ + q, local_col};
    }
    case LayoutKind::Blocked: {
      const int br = mp_ / s_, bc = np_ / s_;
      return {proc_row * br + local_row, proc_col * bc + local_col};
    }
    case LayoutKind::Scattered:
      return {local_row * s_ + proc_row, local_col * s_ + proc_col};
  }
  return {};
}

std::pair<int, int> Layout::local_extent(int proc_row, int proc_col) const {
  switch (kind_) {
    case LayoutKind::ColumnWrapped: {
      const int p = s_ * s_;
      const int q = proc_row * s_ + proc_col;
      const int cols = (np_ > q) ? (np_ - q + p - 1) / p : 0;
      return {mp_, cols};
    }
    case LayoutKind::RowWrapped: {
      const int p = s_ * s_;
      const int q = proc_row * s_ + proc_col;
      const int rows = (mp_ > q) ? (mp_ - q + p - 1) / p : 0;
      return {rows, np_};
    }
    case LayoutKind::Blocked:
      return {mp_ / s_, np_ / s_};
    case LayoutKind::Scattered:
      return {mp_ / s_, np_ / s_};
  }
  return {};
}

std::vector<DenseMatrix> Layout::distribute(const DenseMatrix& a) const {
  if (a.rows() != m_ || a.cols() != n_) {
    throw std::invalid_argument("distribute: matrix does not match layout");
  }
  std::vector<DenseMatrix> locals;
  locals.reserve(std::size_t(s_) * s_);
  for (int pr = 0; pr < s_; ++pr) {
    for (int pc = 0; pc < s_; ++pc) {
      auto [lr, lc] = local_extent(pr, pc);
      locals.emplace_back(std::max(lr, 1), std::max(lc, 1));
    }
  }
  for (int i = 0; i < mp_; ++i) {
    for (int j = 0; j < np_; ++j) {
      const Placement p = place(i, j);
      const double v = (i < m_ && j < n_) ? a(i, j) : 0.0;
      locals[std::size_t(p.proc_row) * s_ + p.proc_col](p.local_row,
                                                        p.local_col) = v;
    }
  }
  return locals;
}

DenseMatrix Layout::collect(const std::vector<DenseMatrix>& locals) const {
  if (int(locals.size()) != s_ * s_) {
    throw std::invalid_argument("collect: wrong number of local matrices");
  }
  DenseMatrix a(m_, n_);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const Placement p = place(i, j);
      a(i, j) = locals[std::size_t(p.proc_row) * s_ + p.proc_col](p.local_row,
                                                                  p.local_col);
    }
  }
  return a;
}

Permutation pi_permutation(int k, int s) {
  if (k < 2 || s < 1 || k % s != 0) {
    throw std::invalid_argument("pi_permutation: s must divide k, k >= 2");
  }
  std::vector<int> map(k);
  for (int i = 0; i < k - 1; ++i) {
    map[i] = int((std::int64_t(i) * s) % (k - 1));
  }
  map[k - 1] = k - 1;
  return Permutation(std::move(map));
}

bool scattered_blocked_equivalent(const DenseMatrix& a, int s) {
  const int m = a.rows(), n = a.cols();
  if (m % s != 0 || n % s != 0) {
    throw std::invalid_argument("scattered_blocked_equivalent: s must divide both dimensions");
  }
  const Layout scattered(LayoutKind::Scattered, s, m, n);
  const Layout blocked(LayoutKind::Blocked, s, m, n);
  const DenseMatrix permuted =
      permute_cols_inv(permute_rows(pi_permutation(m, s), a),
                       pi_permutation(n, s));
  const auto lhs = scattered.distribute(a);
  const auto rhs = blocked.distribute(permuted);
  for (std::size_t p = 0; p < lhs.size(); ++p) {
    if (!(lhs[p] == rhs[p])) return false;
  }
  return true;
}

}  // namespace gridla

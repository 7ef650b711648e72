#include "gridla/lu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace gridla {

namespace {

// Number of j in [j0, j1) with j ≡ rem (mod m).
int count_mod(int j0, int j1, int m, int rem) {
  if (j1 <= j0) return 0;
  int first = j0 + ((rem - j0) % m + m) % m;
  if (first >= j1) return 0;
  return (j1 - first + m - 1) / m;
}

struct Candidate {
  double value = 0.0;
  int index = -1;
  bool valid() const { return index >= 0; }
};

// Magnitude-then-smallest-index winner; order independent, which keeps the
// pivot choice identical across layouts and fold trees.
Candidate better(const Candidate& a, const Candidate& b) {
  if (!a.valid()) return b;
  if (!b.valid()) return a;
  const double ma = std::fabs(a.value), mb = std::fabs(b.value);
  if (ma > mb) return a;
  if (mb > ma) return b;
  return a.index <= b.index ? a : b;
}

// Driver for the elimination of an n x ncols work matrix over the grid.
// The arithmetic happens on the global matrix; every flop and message is
// charged to the processor that owns the data under the layout.
class Eliminator {
 public:
  Eliminator(DenseMatrix& w, int pivot_cols, const Layout& lay,
             GridFabric& fab, int omega)
      : w_(w),
        lay_(lay),
        fab_(fab),
        n_(pivot_cols),
        ncols_(w.cols()),
        s_(lay.grid_side()),
        p_(s_ * s_),
        omega_(std::clamp(omega, 1, pivot_cols)),
        perm_(pivot_cols),
        batch_(p_, 0),
        step_base_(p_, 0) {
    DenseMatrix head(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) head(i, j) = w(i, j);
    }
    floor_ = singularity_floor(head);
  }

  Permutation run() {
    for (int k0 = 0; k0 < n_; k0 += omega_) {
      const int pe = std::min(k0 + omega_, n_);
      for (int k = k0; k < pe; ++k) {
        begin_step();
        pivot_step(k, pe);
        if (k < pe - 1) end_step();
      }
      finish_panel(k0, pe);
      end_step();
    }
    return perm_;
  }

  std::int64_t max_step_words() const { return max_step_words_; }

 private:
  Coord coord_of(int id) const { return {id / s_, id % s_}; }

  int owner_id(int i, int j) const {
    const Placement p = lay_.place(i, j);
    return p.proc_row * s_ + p.proc_col;
  }

  void charge(int proc, std::int64_t f) { batch_[proc] += f; }

  void flush() {
    for (int q = 0; q < p_; ++q) {
      if (batch_[q] > 0) {
        fab_.charge_flops(coord_of(q), batch_[q]);
        batch_[q] = 0;
      }
    }
  }

  // Charge fpe flops per entry of row i, columns [j0, j1), to the owners.
  void charge_row_range(int i, int j0, int j1, int fpe) {
    if (j1 <= j0) return;
    switch (lay_.kind()) {
      case LayoutKind::Scattered: {
        const int pr = i % s_;
        for (int c = 0; c < s_; ++c) {
          charge(pr * s_ + c, std::int64_t(fpe) * count_mod(j0, j1, s_, c));
        }
        break;
      }
      case LayoutKind::Blocked: {
        const int br = lay_.padded_rows() / s_;
        const int bc = lay_.padded_cols() / s_;
        const int pr = i / br;
        for (int c = 0; c < s_; ++c) {
          const int lo = std::max(j0, c * bc), hi = std::min(j1, (c + 1) * bc);
          if (hi > lo) charge(pr * s_ + c, std::int64_t(fpe) * (hi - lo));
        }
        break;
      }
      case LayoutKind::ColumnWrapped: {
        for (int q = 0; q < p_; ++q) {
          charge(q, std::int64_t(fpe) * count_mod(j0, j1, p_, q));
        }
        break;
      }
      case LayoutKind::RowWrapped: {
        charge(i % p_, std::int64_t(fpe) * (j1 - j0));
        break;
      }
    }
  }

  void begin_step() {
    for (int q = 0; q < p_; ++q) {
      const ProcStats& st = fab_.ledger().at(q);
      step_base_[q] = st.words_sent + st.words_received;
    }
  }

  void end_step() {
    for (int q = 0; q < p_; ++q) {
      const ProcStats& st = fab_.ledger().at(q);
      max_step_words_ = std::max(
          max_step_words_, st.words_sent + st.words_received - step_base_[q]);
    }
  }

  // Steps 1-5 for pivot column k; trailing updates past panel column pe are
  // deferred to finish_panel.
  void pivot_step(int k, int pe) {
    // 1. local scans for the pivot candidate, then a combining fold.
    std::map<int, Candidate> local;
    for (int i = k; i < n_; ++i) {
      const int q = owner_id(i, k);
      Candidate& cand = local[q];
      charge(q, 1);
      cand = better(cand, Candidate{w_(i, k), i});
    }
    flush();
    std::vector<std::pair<int, Candidate>> parts(local.begin(), local.end());
    for (int gap = 1; gap < int(parts.size()); gap *= 2) {
      for (int a = 0; a + gap < int(parts.size()); a += 2 * gap) {
        fab_.send(coord_of(parts[a + gap].first), coord_of(parts[a].first), 2);
        parts[a].second = better(parts[a].second, parts[a + gap].second);
      }
    }
    const Candidate pivot = parts.front().second;
    if (p_ > 1) fab_.broadcast_all(coord_of(parts.front().first), 1);
    if (std::fabs(pivot.value) < floor_) throw SingularMatrixError(k);
    const int prow = pivot.index;

    // 2. broadcast the pivot row vertically (panel columns only; the
    // trailing part travels once per panel in finish_panel).
    broadcast_row_segment(prow, k, pe);

    // 3. explicit exchange; only the displaced k-th row travels.
    if (prow != k) {
      exchange_rows(k, prow);
      perm_.swap(k, prow);
      for (int j = 0; j < ncols_; ++j) std::swap(w_(k, j), w_(prow, j));
    }
    if (k == n_ - 1) return;

    // 4. multipliers from the k-th column, broadcast horizontally.
    const double piv = w_(k, k);
    for (int i = k + 1; i < n_; ++i) {
      if (w_(i, k) != 0.0) {
        w_(i, k) /= piv;
        charge(owner_id(i, k), 1);
      }
    }
    flush();
    broadcast_multipliers(k);

    // 5. eliminate within the panel.
    for (int i = k + 1; i < n_; ++i) {
      const double m = w_(i, k);
      if (m == 0.0) continue;
      for (int j = k + 1; j < pe; ++j) w_(i, j) -= m * w_(k, j);
      charge_row_range(i, k + 1, pe, 2);
    }
    flush();
  }

  // Deferred trailing updates: first the horizontal strip of pivot rows,
  // then the rank-omega update of the lower right corner. Row operations
  // run in the same order as an unblocked elimination, so the arithmetic
  // is bit-identical.
  void finish_panel(int k0, int pe) {
    const int j0 = pe;
    if (j0 >= ncols_) return;
    for (int t = k0; t < pe; ++t) {
      if (t < n_ - 1 || ncols_ > n_) broadcast_row_segment(t, j0, ncols_);
      for (int i = t + 1; i < pe; ++i) {
        const double m = w_(i, t);
        if (m == 0.0) continue;
        for (int j = j0; j < ncols_; ++j) w_(i, j) -= m * w_(t, j);
        charge_row_range(i, j0, ncols_, 2);
      }
    }
    for (int t = k0; t < pe && t < n_ - 1; ++t) {
      for (int i = pe; i < n_; ++i) {
        const double m = w_(i, t);
        if (m == 0.0) continue;
        for (int j = j0; j < ncols_; ++j) w_(i, j) -= m * w_(t, j);
        charge_row_range(i, j0, ncols_, 2);
      }
    }
    flush();
  }

  // Vertical broadcast of row i's segment [j0, j1) to the processors that
  // hold matching columns.
  void broadcast_row_segment(int i, int j0, int j1) {
    if (j1 <= j0 || p_ == 1) return;
    switch (lay_.kind()) {
      case LayoutKind::ColumnWrapped:
        break;  // row entries already live with their columns
      case LayoutKind::RowWrapped:
        fab_.broadcast_all(coord_of(i % p_), j1 - j0);
        break;
      case LayoutKind::Scattered:
      case LayoutKind::Blocked: {
        const int pr = lay_.place(i, 0).proc_row;
        for (int c = 0; c < s_; ++c) {
          const int cnt = cols_owned(j0, j1, c);
          if (cnt > 0) fab_.col_broadcast({pr, c}, cnt);
        }
        break;
      }
    }
  }

  void exchange_rows(int k, int prow) {
    if (p_ == 1) return;
    switch (lay_.kind()) {
      case LayoutKind::ColumnWrapped:
        break;  // both rows are local to every column owner
      case LayoutKind::RowWrapped: {
        const int qk = k % p_, qp = prow % p_;
        if (qk != qp) fab_.send(coord_of(qk), coord_of(qp), ncols_);
        break;
      }
      case LayoutKind::Scattered:
      case LayoutKind::Blocked: {
        const int prk = lay_.place(k, 0).proc_row;
        const int prp = lay_.place(prow, 0).proc_row;
        if (prk != prp) {
          for (int c = 0; c < s_; ++c) {
            const int cnt = cols_owned(0, ncols_, c);
            if (cnt > 0) fab_.send({prk, c}, {prp, c}, cnt);
          }
        }
        break;
      }
    }
  }

  void broadcast_multipliers(int k) {
    if (p_ == 1 || k + 1 >= n_) return;
    switch (lay_.kind()) {
      case LayoutKind::ColumnWrapped:
        fab_.broadcast_all(coord_of(owner_id(k + 1, k)), n_ - 1 - k);
        break;
      case LayoutKind::RowWrapped:
        break;  // each row's multiplier is already local
      case LayoutKind::Scattered:
      case LayoutKind::Blocked: {
        const int pc = lay_.place(0, k).proc_col;
        for (int r = 0; r < s_; ++r) {
          const int cnt = rows_owned(k + 1, n_, r);
          if (cnt > 0) fab_.row_broadcast({r, pc}, cnt);
        }
        break;
      }
    }
  }

  int cols_owned(int j0, int j1, int proc_col) const {
    if (lay_.kind() == LayoutKind::Scattered) {
      return count_mod(j0, j1, s_, proc_col);
    }
    const int bc = lay_.padded_cols() / s_;
    return std::max(
        0, std::min(j1, (proc_col + 1) * bc) - std::max(j0, proc_col * bc));
  }

  int rows_owned(int i0, int i1, int proc_row) const {
    if (lay_.kind() == LayoutKind::Scattered) {
      return count_mod(i0, i1, s_, proc_row);
    }
    const int br = lay_.padded_rows() / s_;
    return std::max(
        0, std::min(i1, (proc_row + 1) * br) - std::max(i0, proc_row * br));
  }

  DenseMatrix& w_;
  const Layout& lay_;
  GridFabric& fab_;
  int n_, ncols_, s_, p_, omega_;
  Permutation perm_;
  double floor_ = 0.0;
  std::vector<std::int64_t> batch_;
  std::vector<std::int64_t> step_base_;
  std::int64_t max_step_words_ = 0;
};

void check_layout(const DenseMatrix& a, const Layout& lay,
                  const GridConfig& cfg) {
  if (lay.grid_side() != cfg.s) {
    throw std::invalid_argument("layout grid side does not match config");
  }
  if (lay.rows() != a.rows() || lay.cols() != a.cols()) {
    throw std::invalid_argument("layout dimensions do not match matrix");
  }
}

// Distributed triangular solve on the first n columns of w, right-hand side
// stored in column rhs_col.
std::vector<double> back_sub_core(GridFabric& fab, const Layout& lay,
                                  const DenseMatrix& w, int n, int rhs_col) {
  const int s = lay.grid_side();
  DenseMatrix head(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) head(i, j) = w(i, j);
  }
  const double floor = singularity_floor(head);

  auto coord = [&](int i, int j) {
    const Placement p = lay.place(i, j);
    return Coord{p.proc_row, p.proc_col};
  };

  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    const Coord diag = coord(i, i);
    double sum = w(i, rhs_col);
    std::map<int, std::int64_t> partial_flops;
    for (int j = i + 1; j < n; ++j) {
      sum -= w(i, j) * x[j];
      const Coord o = coord(i, j);
      partial_flops[o.r * s + o.c] += 2;
    }
    {
      const Coord o = coord(i, rhs_col);
      partial_flops[o.r * s + o.c] += 0;  // participates in the reduce
    }
    for (auto& [q, f] : partial_flops) {
      const Coord o{q / s, q % s};
      if (f > 0) fab.charge_flops(o, f);
      if (!(o == diag)) fab.send(o, diag, 1);
    }
    if (std::fabs(w(i, i)) < floor) throw SingularMatrixError(i);
    x[i] = sum / w(i, i);
    fab.charge_flops(diag, 2);
    // publish x[i] to the owners of column i above the diagonal
    if (s * s > 1 && i > 0) {
      switch (lay.kind()) {
        case LayoutKind::ColumnWrapped:
          break;  // column i lives on the diagonal owner already
        case LayoutKind::RowWrapped:
          fab.broadcast_all(diag, 1);
          break;
        case LayoutKind::Scattered:
        case LayoutKind::Blocked:
          fab.col_broadcast(diag, 1);
          break;
      }
    }
  }
  return x;
}

DenseMatrix column_vector(const std::vector<double>& x) {
  DenseMatrix v(int(x.size()), 1);
  for (int i = 0; i < int(x.size()); ++i) v(i, 0) = x[i];
  return v;
}

}  // namespace

DenseMatrix LUFactorization::lower() const {
  DenseMatrix l = DenseMatrix::identity(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) l(i, j) = lu(i, j);
  }
  return l;
}

DenseMatrix LUFactorization::upper() const {
  DenseMatrix u(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) u(i, j) = lu(i, j);
  }
  return u;
}

double LUFactorization::max_multiplier() const {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) best = std::max(best, std::fabs(lu(i, j)));
  }
  return best;
}

double LUFactorization::residual(const DenseMatrix& a) const {
  const DenseMatrix pa = permute_rows(perm, a);
  const DenseMatrix recon = multiply(lower(), upper());
  DenseMatrix diff(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) diff(i, j) = pa(i, j) - recon(i, j);
  }
  return norm(diff, NormKind::Inf);
}

int default_omega(int n) {
  return std::max(1, int(std::lround(std::ceil(std::sqrt(double(n))))));
}

LUFactorization lu_factor(const DenseMatrix& a, const Layout& layout,
                          const GridConfig& config,
                          std::optional<BlockParams> block) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("lu_factor: matrix must be square");
  }
  check_layout(a, layout, config);
  const int omega = block ? block->omega : 1;
  if (omega < 1 || omega > a.rows()) {
    throw std::invalid_argument("lu_factor: omega out of range");
  }

  GridFabric fab(config);
  DenseMatrix w = a;
  Eliminator elim(w, a.rows(), layout, fab, omega);
  Permutation perm = elim.run();

  LUFactorization out;
  out.n = a.rows();
  out.perm = std::move(perm);
  out.lu = std::move(w);
  out.ledger = fab.ledger();
  out.max_step_words = elim.max_step_words();
  return out;
}

SolveResult lu_solve(const DenseMatrix& a, const DenseMatrix& b,
                     const Layout& layout, const GridConfig& config) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("lu_solve: A must be square");
  if (b.rows() != n || b.cols() != 1) {
    throw std::invalid_argument("lu_solve: b must be n x 1");
  }
  check_layout(a, layout, config);

  // Eliminate the augmented matrix [A | b], then back-substitute.
  const Layout aug(layout.kind(), config.s, n, n + 1);
  DenseMatrix w(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = a(i, j);
    w(i, n) = b(i, 0);
  }
  GridFabric fab(config);
  Eliminator elim(w, n, aug, fab, 1);
  elim.run();
  std::vector<double> x = back_sub_core(fab, aug, w, n, n);
  return {column_vector(x), fab.ledger()};
}

TriangularSolve back_substitute(const DenseMatrix& u, const DenseMatrix& rhs,
                                const Layout& layout, const GridConfig& config) {
  const int n = u.rows();
  if (u.cols() != n) {
    throw std::invalid_argument("back_substitute: U must be square");
  }
  if (rhs.rows() != n || rhs.cols() != 1) {
    throw std::invalid_argument("back_substitute: rhs must be n x 1");
  }
  if (layout.grid_side() != config.s) {
    throw std::invalid_argument("layout grid side does not match config");
  }
  const Layout aug(layout.kind(), config.s, n, n + 1);
  DenseMatrix w(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = u(i, j);
    w(i, n) = rhs(i, 0);
  }
  GridFabric fab(config);
  std::vector<double> x = back_sub_core(fab, aug, w, n, n);
  return {column_vector(x), fab.ledger()};
}

}  // namespace gridla

#include "gridla/qr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gridla/detail/dist.hpp"
#include "gridla/lu.hpp"

namespace gridla {

namespace {

void check_inputs(const DenseMatrix& a, const Layout& lay,
                  const GridConfig& cfg) {
  if (a.rows() < a.cols()) {
    throw std::invalid_argument("qr: requires m >= n");
  }
  if (lay.grid_side() != cfg.s) {
    throw std::invalid_argument("layout grid side does not match config");
  }
  if (lay.rows() != a.rows() || lay.cols() != a.cols()) {
    throw std::invalid_argument("layout dimensions do not match matrix");
  }
}

// Processors owning entries of column j, rows [i0, i1), in ascending id.
std::vector<int> column_owner_set(const detail::Charger& ch, int j, int i0,
                                  int i1) {
  std::map<int, bool> seen;
  for (int i = i0; i < i1; ++i) seen[ch.owner_id(i, j)] = true;
  std::vector<int> out;
  for (auto& [q, _] : seen) out.push_back(q);
  return out;
}

// Broadcast a column-k resident vector (rows [i0, i1)) to the processors
// that need it for trailing updates, mirroring the multiplier broadcast of
// Gaussian elimination.
void broadcast_column_segment(detail::Charger& ch, int k, int i0, int i1) {
  GridFabric& fab = ch.fabric();
  const int s = ch.grid_side();
  if (s * s == 1 || i1 <= i0) return;
  switch (ch.layout().kind()) {
    case LayoutKind::ColumnWrapped:
      fab.broadcast_all(ch.coord_of(ch.owner_id(i0, k)), i1 - i0);
      break;
    case LayoutKind::RowWrapped:
      break;  // each row's entry is already local to the row owner
    case LayoutKind::Scattered:
    case LayoutKind::Blocked: {
      const int pc = ch.layout().place(0, k).proc_col;
      for (int r = 0; r < s; ++r) {
        const int cnt = ch.rows_owned(i0, i1, r);
        if (cnt > 0) fab.row_broadcast({r, pc}, cnt);
      }
      break;
    }
  }
}

// Charge the combine of per-processor partial column dot-products for
// columns [j0, j1); one partial word per owned column.
void combine_column_partials(detail::Charger& ch, int j0, int j1) {
  GridFabric& fab = ch.fabric();
  const int s = ch.grid_side();
  if (s * s == 1 || j1 <= j0) return;
  switch (ch.layout().kind()) {
    case LayoutKind::ColumnWrapped:
      break;  // every column is local to one processor
    case LayoutKind::RowWrapped: {
      std::vector<int> procs(s * s);
      for (int q = 0; q < s * s; ++q) procs[q] = q;
      detail::tree_reduce(fab, procs, j1 - j0);
      for (int q = 1; q < s * s; ++q) {
        fab.send(ch.coord_of(0), ch.coord_of(q), j1 - j0);
      }
      break;
    }
    case LayoutKind::Scattered:
    case LayoutKind::Blocked: {
      for (int c = 0; c < s; ++c) {
        const int cnt = ch.cols_owned(j0, j1, c);
        if (cnt == 0) continue;
        std::vector<int> procs(s);
        for (int r = 0; r < s; ++r) procs[r] = r * s + c;
        detail::tree_reduce(fab, procs, cnt);
        fab.col_broadcast({0, c}, cnt);
      }
      break;
    }
  }
}

struct HouseholderOut {
  QRFactorization qr;
  std::vector<double> qtb;  // transformed right-hand side, if provided
};

HouseholderOut householder_core(const DenseMatrix& a, const DenseMatrix* rhs,
                                const Layout& lay, const GridConfig& cfg) {
  const int m = a.rows(), n = a.cols();
  const int ncols = rhs ? n + 1 : n;
  const Layout work_lay(lay.kind(), cfg.s, m, ncols);
  DenseMatrix w(m, ncols);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = a(i, j);
    if (rhs) w(i, n) = (*rhs)(i, 0);
  }
  const double floor = singularity_floor(a);

  GridFabric fab(cfg);
  detail::Charger ch(work_lay, fab);

  std::vector<std::vector<double>> reflectors;
  reflectors.reserve(n);

  for (int k = 0; k < n; ++k) {
    // column norm below the diagonal, combined over the owning processors
    double sigma2 = 0.0;
    for (int i = k; i < m; ++i) {
      sigma2 += w(i, k) * w(i, k);
      ch.add(ch.owner_id(i, k), 2);
    }
    ch.flush();
    const std::vector<int> owners = column_owner_set(ch, k, k, m);
    detail::tree_reduce(fab, owners, 1);
    if (ch.processors() > 1) fab.broadcast_all(ch.coord_of(owners[0]), 1);
    const double sigma = std::sqrt(sigma2);
    if (sigma < floor) throw RankDeficientError(k);

    // reflector u, normalized to unit length; beta is the new diagonal
    const double alpha = w(k, k);
    const double beta = (alpha >= 0.0) ? -sigma : sigma;
    std::vector<double> u(m, 0.0);
    for (int i = k; i < m; ++i) u[i] = w(i, k);
    u[k] = alpha - beta;
    double unorm2 = 0.0;
    for (int i = k; i < m; ++i) unorm2 += u[i] * u[i];
    const double unorm = std::sqrt(unorm2);
    for (int i = k; i < m; ++i) u[i] /= unorm;
    ch.add(ch.owner_id(k, k), 4);
    for (int i = k; i < m; ++i) ch.add(ch.owner_id(i, k), 3);
    ch.flush();

    // u travels like the multiplier column of Gaussian elimination
    broadcast_column_segment(ch, k, k, m);

    // apply I - 2uu^T to the trailing columns
    w(k, k) = beta;
    for (int i = k + 1; i < m; ++i) w(i, k) = 0.0;
    std::vector<double> dots(ncols, 0.0);
    for (int i = k; i < m; ++i) {
      const double ui = u[i];
      if (ui == 0.0) continue;
      for (int j = k + 1; j < ncols; ++j) dots[j] += ui * w(i, j);
      ch.add_row_range(i, k + 1, ncols, 2);
    }
    combine_column_partials(ch, k + 1, ncols);
    for (int i = k; i < m; ++i) {
      const double ui = u[i];
      if (ui == 0.0) continue;
      for (int j = k + 1; j < ncols; ++j) w(i, j) -= 2.0 * dots[j] * ui;
      ch.add_row_range(i, k + 1, ncols, 2);
    }
    ch.flush();
    reflectors.push_back(std::move(u));
  }

  HouseholderOut out;
  out.qr.m = m;
  out.qr.n = n;
  out.qr.r = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out.qr.r(i, j) = w(i, j);
  }
  out.qr.reflectors = std::move(reflectors);
  out.qr.ledger = fab.ledger();
  if (rhs) {
    out.qtb.resize(m);
    for (int i = 0; i < m; ++i) out.qtb[i] = w(i, n);
  }
  return out;
}

}  // namespace

DenseMatrix QRFactorization::thin_q() const {
  DenseMatrix q(m, n);
  for (int j = 0; j < n; ++j) q(j, j) = 1.0;
  if (!reflectors.empty()) {
    for (int k = int(reflectors.size()) - 1; k >= 0; --k) {
      const std::vector<double>& u = reflectors[k];
      for (int j = 0; j < n; ++j) {
        double d = 0.0;
        for (int i = 0; i < m; ++i) d += u[i] * q(i, j);
        if (d == 0.0) continue;
        for (int i = 0; i < m; ++i) q(i, j) -= 2.0 * d * u[i];
      }
    }
  } else {
    // Q = G_1^T G_2^T ... G_N^T applied to the thin identity
    for (int k = int(rotations.size()) - 1; k >= 0; --k) {
      const GivensRotation& g = rotations[k];
      const int t = g.row_top;
      for (int j = 0; j < n; ++j) {
        const double top = q(t, j), bot = q(t + 1, j);
        q(t, j) = g.c * top - g.s * bot;
        q(t + 1, j) = g.s * top + g.c * bot;
      }
    }
  }
  return q;
}

std::vector<double> QRFactorization::apply_qt(
    const std::vector<double>& v) const {
  std::vector<double> x = v;
  if (!reflectors.empty()) {
    for (const auto& u : reflectors) {
      double d = 0.0;
      for (int i = 0; i < m; ++i) d += u[i] * x[i];
      for (int i = 0; i < m; ++i) x[i] -= 2.0 * d * u[i];
    }
  } else {
    for (const GivensRotation& g : rotations) {
      const int t = g.row_top;
      const double top = x[t], bot = x[t + 1];
      x[t] = g.c * top + g.s * bot;
      x[t + 1] = -g.s * top + g.c * bot;
    }
  }
  return x;
}

QRFactorization qr_householder(const DenseMatrix& a, const Layout& layout,
                               const GridConfig& config) {
  check_inputs(a, layout, config);
  return householder_core(a, nullptr, layout, config).qr;
}

QRFactorization qr_givens(const DenseMatrix& a, const Layout& layout,
                          const GridConfig& config) {
  check_inputs(a, layout, config);
  const int m = a.rows(), n = a.cols();
  const double floor = singularity_floor(a);

  GridFabric fab(config);
  detail::Charger ch(layout, fab);
  const int s = config.s;
  DenseMatrix w = a;

  // Diagonal-wavefront order: rotations with equal 2j + (m-1-i) touch
  // disjoint row pairs and run as one parallel round.
  struct Slot {
    int round, i, j;
  };
  std::vector<Slot> slots;
  for (int j = 0; j < n; ++j) {
    for (int i = m - 1; i > j; --i) slots.push_back({2 * j + (m - 1 - i), i, j});
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a_, const Slot& b_) {
                     return a_.round < b_.round;
                   });

  std::vector<GivensRotation> rotations;
  for (const Slot& slot : slots) {
    const int i = slot.i, j = slot.j;
    const double top = w(i - 1, j), bot = w(i, j);
    if (bot == 0.0) continue;
    const double r = std::hypot(top, bot);
    const double c = top / r, sn = bot / r;
    // generation: two squares, a sum, a root charged at three, two quotients
    ch.add(ch.owner_id(i, j), 8);

    const Placement ptop = layout.place(i - 1, 0);
    const Placement pbot = layout.place(i, 0);
    const bool cross =
        (layout.kind() == LayoutKind::RowWrapped)
            ? ((i - 1) % (s * s) != i % (s * s))
            : (layout.kind() != LayoutKind::ColumnWrapped &&
               ptop.proc_row != pbot.proc_row);
    if (s * s > 1) {
      // rotation parameters reach every column owner of the two rows
      switch (layout.kind()) {
        case LayoutKind::ColumnWrapped:
          fab.broadcast_all(ch.coord_of(ch.owner_id(i, j)), 2);
          break;
        case LayoutKind::RowWrapped:
          if (cross) {
            fab.send(ch.coord_of(i % (s * s)), ch.coord_of((i - 1) % (s * s)),
                     2);
          }
          break;
        case LayoutKind::Scattered:
        case LayoutKind::Blocked:
          fab.row_broadcast({ptop.proc_row, layout.place(0, j).proc_col}, 2);
          if (cross) {
            fab.row_broadcast({pbot.proc_row, layout.place(0, j).proc_col}, 2);
          }
          break;
      }
      // cross-processor row pairs swap their active segments
      if (cross) {
        if (layout.kind() == LayoutKind::RowWrapped) {
          fab.send(ch.coord_of((i - 1) % (s * s)), ch.coord_of(i % (s * s)),
                   n - j);
          fab.send(ch.coord_of(i % (s * s)), ch.coord_of((i - 1) % (s * s)),
                   n - j);
        } else if (layout.kind() != LayoutKind::ColumnWrapped) {
          for (int c_ = 0; c_ < s; ++c_) {
            const int cnt = ch.cols_owned(j, n, c_);
            if (cnt == 0) continue;
            fab.send({ptop.proc_row, c_}, {pbot.proc_row, c_}, cnt);
            fab.send({pbot.proc_row, c_}, {ptop.proc_row, c_}, cnt);
          }
        }
      }
    }

    w(i - 1, j) = r;
    w(i, j) = 0.0;
    for (int jj = j + 1; jj < n; ++jj) {
      const double t2 = w(i - 1, jj), b2 = w(i, jj);
      w(i - 1, jj) = c * t2 + sn * b2;
      w(i, jj) = -sn * t2 + c * b2;
    }
    ch.add_row_range(i - 1, j + 1, n, 3);
    ch.add_row_range(i, j + 1, n, 3);
    ch.flush();
    rotations.push_back({i - 1, j, c, sn});
  }

  QRFactorization out;
  out.m = m;
  out.n = n;
  out.r = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out.r(i, j) = w(i, j);
    if (std::fabs(w(i, i)) < floor) throw RankDeficientError(i);
  }
  out.rotations = std::move(rotations);
  out.ledger = fab.ledger();
  return out;
}

DenseMatrix least_squares(const DenseMatrix& a, const DenseMatrix& b,
                          const Layout& layout, const GridConfig& config) {
  check_inputs(a, layout, config);
  if (b.rows() != a.rows() || b.cols() != 1) {
    throw std::invalid_argument("least_squares: b must be m x 1");
  }
  HouseholderOut h = householder_core(a, &b, layout, config);
  const int n = a.cols();
  DenseMatrix rhs(n, 1);
  for (int i = 0; i < n; ++i) rhs(i, 0) = h.qtb[i];
  const Layout tri(layout.kind(), config.s, n, n);
  return back_substitute(h.qr.r, rhs, tri, config).x;
}

}  // namespace gridla

#include "gridla/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gridla {

namespace {

// Plane rotation zeroing the Gram entry of a column pair with Gram data
// alpha = a_i.a_i, beta = a_j.a_j, gamma = a_i.a_j.
struct Angle {
  double c = 1.0, s = 0.0, theta = 0.0;
  bool rotate = false;
};

Angle jacobi_angle(double alpha, double beta, double gamma) {
  Angle a;
  if (gamma == 0.0) return a;
  double t;
  if (alpha == beta) {
    t = (gamma > 0.0) ? 1.0 : -1.0;
  } else {
    const double tau = (alpha - beta) / (2.0 * gamma);
    t = ((tau >= 0.0) ? 1.0 : -1.0) / (std::fabs(tau) + std::hypot(1.0, tau));
  }
  a.c = 1.0 / std::sqrt(1.0 + t * t);
  a.s = t * a.c;
  a.theta = std::atan(t);
  a.rotate = true;
  return a;
}

// Per-round cost charging on a linear array of virtual processors (boards),
// two columns per board; folded onto the real grid afterwards.
class LinearArray {
 public:
  LinearArray(int boards, const GridConfig& cfg)
      : cfg_(cfg), fab_(unit_grid(cfg)), ledger_(boards) {}

  void charge(int b, std::int64_t flops) {
    ProcStats& st = ledger_.at(b);
    st.flops += flops;
    st.clock += double(flops) * cfg_.tau_f;
  }

  void send(int from, int to, std::int64_t words) {
    if (from == to) return;
    ProcStats& src = ledger_.at(from);
    ProcStats& dst = ledger_.at(to);
    src.clock += fab_.send_cost(std::abs(to - from), words);
    src.words_sent += words;
    src.messages_sent += 1;
    dst.words_received += words;
    dst.clock = std::max(dst.clock, src.clock);
  }

  CostLedger fold(int real_count) const {
    return ledger_.fold_virtual(real_count);
  }

 private:
  static GridConfig unit_grid(GridConfig cfg) {
    cfg.s = 1;
    return cfg;
  }
  GridConfig cfg_;
  GridFabric fab_;  // used only for send_cost
  CostLedger ledger_;
};

// Board movements between two consecutive tournament rounds.
void charge_exchanges(LinearArray& arr, const SweepSchedule& sched, int from,
                      int to, std::int64_t words_per_column) {
  if (sched.board_of.empty()) return;
  const std::vector<int>& a = sched.board_of[from];
  const std::vector<int>& b = sched.board_of[to];
  for (int col = 0; col < sched.n; ++col) {
    if (a[col] != b[col]) arr.send(a[col], b[col], words_per_column);
  }
}

template <typename RotateFn>
int run_sweep(const SweepSchedule& sched, const JacobiOptions& opt,
              LinearArray& arr, std::int64_t words_per_column,
              RotateFn&& rotate) {
  const bool tournament = !sched.board_of.empty();
  int performed = 0;
  auto run_round = [&](int r) {
    for (const auto& [i, j] : sched.rounds[r]) {
      const int b = tournament ? sched.board_of[r][i] : i / 2;
      if (!tournament) {
        // serial ordering: fetch column j to the board holding column i
        const int bj = j / 2;
        arr.send(bj, b, words_per_column);
        performed += rotate(i, j, b) ? 1 : 0;
        arr.send(b, bj, words_per_column);
      } else {
        performed += rotate(i, j, b) ? 1 : 0;
      }
    }
  };
  const int nrounds = int(sched.rounds.size());
  for (int r = 0; r < nrounds; ++r) {
    run_round(r);
    if (tournament && r + 1 < nrounds) {
      charge_exchanges(arr, sched, r, r + 1, words_per_column);
    }
  }
  if (tournament && opt.extra_step_even_n && sched.n % 2 == 0) {
    charge_exchanges(arr, sched, nrounds - 1, 0, words_per_column);
    run_round(0);
    charge_exchanges(arr, sched, 0, nrounds - 1, words_per_column);
  }
  return performed;
}

}  // namespace

int SweepSchedule::pair_count() const {
  int total = 0;
  for (const auto& r : rounds) total += int(r.size());
  return total;
}

SweepSchedule make_schedule(int n, SweepOrdering ordering) {
  if (n < 2) throw std::invalid_argument("make_schedule: n >= 2 required");
  SweepSchedule out;
  out.n = n;
  if (ordering == SweepOrdering::CyclicRows) {
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) out.rounds.push_back({{i, j}});
    }
    return out;
  }
  // circle method: fix the player in the first top seat, rotate the rest one
  // adjacent seat per round; odd n pads with a bye
  const int np = (n % 2 == 0) ? n : n + 1;
  const int m = np / 2;
  std::vector<int> top(m), bottom(m);
  std::iota(top.begin(), top.end(), 0);
  std::iota(bottom.begin(), bottom.end(), m);
  for (int r = 0; r < np - 1; ++r) {
    std::vector<std::pair<int, int>> round;
    std::vector<int> pos(n, 0);
    for (int b = 0; b < m; ++b) {
      const int x = top[b], y = bottom[b];
      if (x < n) pos[x] = b;
      if (y < n) pos[y] = b;
      if (x < n && y < n) round.push_back({std::min(x, y), std::max(x, y)});
    }
    out.rounds.push_back(std::move(round));
    out.board_of.push_back(std::move(pos));
    if (m > 1) {
      std::vector<int> nt(m), nb(m);
      nt[0] = top[0];
      nt[1] = bottom[0];
      for (int i = 2; i < m; ++i) nt[i] = top[i - 1];
      nb[m - 1] = top[m - 1];
      for (int i = 0; i < m - 1; ++i) nb[i] = bottom[i + 1];
      top = std::move(nt);
      bottom = std::move(nb);
    }
  }
  return out;
}

RotatedPair rotate_pair(const std::vector<double>& a_i,
                        const std::vector<double>& a_j) {
  if (a_i.size() != a_j.size()) {
    throw std::invalid_argument("rotate_pair: length mismatch");
  }
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  for (std::size_t k = 0; k < a_i.size(); ++k) {
    alpha += a_i[k] * a_i[k];
    beta += a_j[k] * a_j[k];
    gamma += a_i[k] * a_j[k];
  }
  RotatedPair out{a_i, a_j, 0.0};
  const Angle ang = jacobi_angle(alpha, beta, gamma);
  if (!ang.rotate) return out;
  for (std::size_t k = 0; k < a_i.size(); ++k) {
    out.a_i[k] = ang.c * a_i[k] + ang.s * a_j[k];
    out.a_j[k] = -ang.s * a_i[k] + ang.c * a_j[k];
  }
  out.theta = ang.theta;
  return out;
}

SVDResult hestenes_svd(const DenseMatrix& a, const JacobiOptions& options,
                       const Layout& layout, const GridConfig& config) {
  const int m = a.rows(), n = a.cols();
  if (m < n || n < 1) throw std::invalid_argument("hestenes_svd: m >= n >= 1");
  if (options.tol <= 0.0) throw std::invalid_argument("tol must be positive");
  if (layout.grid_side() != config.s || layout.rows() != m ||
      layout.cols() != n) {
    throw std::invalid_argument("layout does not match matrix and config");
  }

  DenseMatrix w = a;
  DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  SVDResult res;
  res.sweeps_used = 0;

  if (n == 1) {
    // nothing to orthogonalize
    LinearArray arr(1, config);
    arr.charge(0, 3 * m);
    res.ledger = arr.fold(config.processors());
  } else {
    const SweepSchedule sched = make_schedule(n, options.ordering);
    const int boards = (n + 1) / 2;
    LinearArray arr(boards, config);
    const std::int64_t words = std::int64_t(m) + n;  // data + V column

    auto rotate = [&](int i, int j, int board) {
      double alpha = 0.0, beta = 0.0, gamma = 0.0;
      for (int k = 0; k < m; ++k) {
        alpha += w(k, i) * w(k, i);
        beta += w(k, j) * w(k, j);
        gamma += w(k, i) * w(k, j);
      }
      arr.charge(board, 6 * std::int64_t(m));
      if (alpha == 0.0 || beta == 0.0) return false;
      if (std::fabs(gamma) <= options.tol * std::sqrt(alpha * beta)) {
        return false;
      }
      const Angle ang = jacobi_angle(alpha, beta, gamma);
      if (!ang.rotate) return false;
      for (int k = 0; k < m; ++k) {
        const double x = w(k, i), y = w(k, j);
        w(k, i) = ang.c * x + ang.s * y;
        w(k, j) = -ang.s * x + ang.c * y;
      }
      for (int k = 0; k < n; ++k) {
        const double x = v(k, i), y = v(k, j);
        v(k, i) = ang.c * x + ang.s * y;
        v(k, j) = -ang.s * x + ang.c * y;
      }
      arr.charge(board, 6 * (std::int64_t(m) + n) + 8);
      res.rotations += 1;
      res.max_abs_theta = std::max(res.max_abs_theta, std::fabs(ang.theta));
      return true;
    };

    bool converged = false;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const int performed = run_sweep(sched, options, arr, words, rotate);
      if (performed == 0) {
        converged = true;
        break;
      }
      res.sweeps_used += 1;
    }
    for (int j = 0; j < n; ++j) arr.charge(j / 2, 3 * std::int64_t(m));
    res.ledger = arr.fold(config.processors());
    if (!converged) {
      res.u_tilde = std::move(w);
      res.v = std::move(v);
      throw SvdNoConvergence(options.max_sweeps, std::move(res));
    }
  }

  // extract singular values, normalize nonnull columns, sort nonincreasing
  res.sigma.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s2 = 0.0;
    for (int i = 0; i < m; ++i) s2 += w(i, j) * w(i, j);
    res.sigma[j] = std::sqrt(s2);
    if (res.sigma[j] > 0.0) {
      for (int i = 0; i < m; ++i) w(i, j) /= res.sigma[j];
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return res.sigma[x] > res.sigma[y];
  });
  DenseMatrix u(m, n), vv(n, n);
  std::vector<double> sig(n);
  for (int j = 0; j < n; ++j) {
    sig[j] = res.sigma[order[j]];
    for (int i = 0; i < m; ++i) u(i, j) = w(i, order[j]);
    for (int i = 0; i < n; ++i) vv(i, j) = v(i, order[j]);
  }
  res.sigma = std::move(sig);
  res.u_tilde = std::move(u);
  res.v = std::move(vv);
  return res;
}

EigResult jacobi_eig(const DenseMatrix& b, const JacobiOptions& options,
                     const GridConfig& config) {
  const int n = b.rows();
  if (b.cols() != n || n < 1) {
    throw std::invalid_argument("jacobi_eig: square matrix required");
  }
  if (options.tol <= 0.0) throw std::invalid_argument("tol must be positive");
  const double fro = norm(b, NormKind::Frobenius);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::fabs(b(i, j) - b(j, i)) > 1e-12 * std::max(fro, 1.0)) {
        throw NotSymmetricError();
      }
    }
  }

  DenseMatrix w = b;
  DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  EigResult res;
  // off-diagonal threshold; the Frobenius norm is rotation invariant
  const double thresh = options.tol * std::max(fro, 1.0);

  if (n > 1) {
    const SweepSchedule sched = make_schedule(n, options.ordering);
    const int boards = (n + 1) / 2;
    LinearArray arr(boards, config);
    const std::int64_t words = 2 * std::int64_t(n);  // B column + V column

    auto rotate = [&](int i, int j, int board) {
      const double gamma = w(i, j);
      arr.charge(board, 2);
      if (std::fabs(gamma) <= thresh) return false;
      const Angle ang = jacobi_angle(w(i, i), w(j, j), gamma);
      if (!ang.rotate) return false;
      for (int k = 0; k < n; ++k) {  // B <- B Q
        const double x = w(k, i), y = w(k, j);
        w(k, i) = ang.c * x + ang.s * y;
        w(k, j) = -ang.s * x + ang.c * y;
      }
      for (int k = 0; k < n; ++k) {  // B <- Q^T B
        const double x = w(i, k), y = w(j, k);
        w(i, k) = ang.c * x + ang.s * y;
        w(j, k) = -ang.s * x + ang.c * y;
      }
      for (int k = 0; k < n; ++k) {
        const double x = v(k, i), y = v(k, j);
        v(k, i) = ang.c * x + ang.s * y;
        v(k, j) = -ang.s * x + ang.c * y;
      }
      arr.charge(board, 18 * std::int64_t(n) + 8);
      res.rotations += 1;
      res.max_abs_theta = std::max(res.max_abs_theta, std::fabs(ang.theta));
      return true;
    };

    bool converged = false;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const int performed = run_sweep(sched, options, arr, words, rotate);
      if (performed == 0) {
        converged = true;
        break;
      }
      res.sweeps_used += 1;
    }
    res.ledger = arr.fold(config.processors());
    if (!converged) {
      res.eigenvalues.resize(n);
      for (int i = 0; i < n; ++i) res.eigenvalues[i] = w(i, i);
      res.v = std::move(v);
      throw EigNoConvergence(options.max_sweeps, std::move(res));
    }
  } else {
    res.ledger = CostLedger(config.processors());
  }

  res.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) res.eigenvalues[i] = w(i, i);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return res.eigenvalues[x] > res.eigenvalues[y];
  });
  std::vector<double> ev(n);
  DenseMatrix vv(n, n);
  for (int j = 0; j < n; ++j) {
    ev[j] = res.eigenvalues[order[j]];
    for (int i = 0; i < n; ++i) vv(i, j) = v(i, order[j]);
  }
  res.eigenvalues = std::move(ev);
  res.v = std::move(vv);
  return res;
}

}  // namespace gridla

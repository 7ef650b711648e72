#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gridla/jacobi.hpp"
#include "gridla/oracles.hpp"

using namespace gridla;

namespace {

GridConfig cfg(int s) {
  GridConfig c;
  c.s = s;
  c.c0 = 2.0;
  c.c1 = 0.5;
  return c;
}

constexpr double kPi4 = 0.78539816339744831;

void check_schedule(const SweepSchedule& sched) {
  const int n = sched.n;
  std::set<std::pair<int, int>> seen;
  for (const auto& round : sched.rounds) {
    std::set<int> used;
    for (const auto& [i, j] : round) {
      CHECK(i < j);
      CHECK(j < n);
      CHECK(used.insert(i).second);  // disjoint within a round
      CHECK(used.insert(j).second);
      CHECK(seen.insert({i, j}).second);  // each pair at most once
    }
  }
  CHECK(int(seen.size()) == n * (n - 1) / 2);
}

void check_adjacency(const SweepSchedule& sched) {
  REQUIRE(sched.board_of.size() == sched.rounds.size());
  for (std::size_t r = 0; r + 1 < sched.board_of.size(); ++r) {
    for (int col = 0; col < sched.n; ++col) {
      CHECK(std::abs(sched.board_of[r][col] - sched.board_of[r + 1][col]) <= 1);
    }
  }
}

DenseMatrix random_symmetric(int n, std::uint64_t seed) {
  const DenseMatrix r = generate(MatrixKind::RandomUniform, n, n, seed);
  DenseMatrix b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = r(i, j) + r(j, i);
  }
  return b;
}

}  // namespace

TEST_CASE("cyclic schedule enumerates pairs row by row") {
  const SweepSchedule s = make_schedule(3, SweepOrdering::CyclicRows);
  REQUIRE(s.rounds.size() == 3);
  CHECK(s.rounds[0] == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(s.rounds[1] == std::vector<std::pair<int, int>>{{0, 2}});
  CHECK(s.rounds[2] == std::vector<std::pair<int, int>>{{1, 2}});
  check_schedule(s);
}

TEST_CASE("tournament schedule for even n") {
  const SweepSchedule s = make_schedule(4, SweepOrdering::Tournament);
  CHECK(s.rounds.size() == 3);  // n - 1 rounds
  for (const auto& round : s.rounds) CHECK(round.size() == 2);
  check_schedule(s);
  check_adjacency(s);
}

TEST_CASE("tournament schedule for odd n") {
  const SweepSchedule s = make_schedule(5, SweepOrdering::Tournament);
  CHECK(s.rounds.size() == 5);  // n rounds with a bye
  for (const auto& round : s.rounds) CHECK(round.size() <= 2);
  check_schedule(s);
  check_adjacency(s);
}

TEST_CASE("schedules cover every pair exactly once up to n = 64") {
  for (int n : {2, 3, 6, 7, 12, 17, 32, 64}) {
    for (SweepOrdering ord :
         {SweepOrdering::CyclicRows, SweepOrdering::Tournament}) {
      const SweepSchedule s = make_schedule(n, ord);
      check_schedule(s);
      if (ord == SweepOrdering::Tournament) {
        CHECK(int(s.rounds.size()) == (n % 2 == 0 ? n - 1 : n));
        check_adjacency(s);
      }
    }
  }
  CHECK_THROWS_AS(make_schedule(1, SweepOrdering::Tournament),
                  std::invalid_argument);
}

TEST_CASE("rotate_pair leaves orthogonal columns alone") {
  const std::vector<double> a = {1.0, 0.0, 2.0};
  const std::vector<double> b = {0.0, 3.0, 0.0};
  const RotatedPair r = rotate_pair(a, b);
  CHECK(r.theta == 0.0);
  CHECK(r.a_i == a);
  CHECK(r.a_j == b);
}

TEST_CASE("rotate_pair on identical columns uses the 45 degree angle") {
  const std::vector<double> a = {1.0, 2.0, -1.0};
  const RotatedPair r = rotate_pair(a, a);
  CHECK(std::fabs(r.theta) == doctest::Approx(kPi4));
  double dot = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) dot += r.a_i[k] * r.a_j[k];
  CHECK(std::fabs(dot) <= 1e-13);
}

TEST_CASE("rotate_pair postconditions on random columns") {
  const DenseMatrix c = generate(MatrixKind::RandomUniform, 6, 2, 71);
  std::vector<double> a(6), b(6);
  for (int i = 0; i < 6; ++i) {
    a[i] = c(i, 0);
    b[i] = c(i, 1);
  }
  const RotatedPair r = rotate_pair(a, b);
  CHECK(std::fabs(r.theta) <= kPi4 + 1e-15);
  double dot = 0.0, before = 0.0, after = 0.0;
  for (int k = 0; k < 6; ++k) {
    dot += r.a_i[k] * r.a_j[k];
    before += a[k] * a[k] + b[k] * b[k];
    after += r.a_i[k] * r.a_i[k] + r.a_j[k] * r.a_j[k];
  }
  CHECK(std::fabs(dot) <= 1e-13);
  CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("svd of a diagonal matrix") {
  DenseMatrix a(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  a(2, 2) = 2.0;
  const Layout lay(LayoutKind::Scattered, 1, 3, 3);
  const SVDResult r = hestenes_svd(a, JacobiOptions{}, lay, cfg(1));
  CHECK(r.sigma[0] == doctest::Approx(3.0));
  CHECK(r.sigma[1] == doctest::Approx(2.0));
  CHECK(r.sigma[2] == doctest::Approx(1.0));
  CHECK(r.sweeps_used == 0);
  // V is a permutation matrix
  for (int i = 0; i < 3; ++i) {
    int ones = 0;
    for (int j = 0; j < 3; ++j) {
      if (std::fabs(r.v(i, j)) == 1.0) ++ones;
      else CHECK(r.v(i, j) == 0.0);
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("svd of a matrix with orthogonal columns converges immediately") {
  DenseMatrix a(4, 2);
  a(0, 0) = 5.0;
  a(1, 1) = 4.0;
  const Layout lay(LayoutKind::Scattered, 1, 4, 2);
  const SVDResult r = hestenes_svd(a, JacobiOptions{}, lay, cfg(1));
  CHECK(r.sigma[0] == doctest::Approx(5.0));
  CHECK(r.sigma[1] == doctest::Approx(4.0));
  CHECK(r.sweeps_used == 0);
  CHECK(r.rotations == 0);
}

TEST_CASE("svd matches the Gram-matrix eigenvalue oracle") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 12, 8, 33);
  for (SweepOrdering ord :
       {SweepOrdering::CyclicRows, SweepOrdering::Tournament}) {
    JacobiOptions opt;
    opt.ordering = ord;
    const Layout lay(LayoutKind::Scattered, 2, 12, 8);
    const SVDResult r = hestenes_svd(a, opt, lay, cfg(2));

    const SerialEig e = serial_jacobi_oracle(multiply(transpose(a), a));
    std::vector<double> lam = e.eigenvalues;
    std::sort(lam.rbegin(), lam.rend());
    for (int i = 0; i < 8; ++i) {
      CHECK(r.sigma[i] ==
            doctest::Approx(std::sqrt(std::max(0.0, lam[i]))).epsilon(1e-8));
    }
    CHECK(r.max_abs_theta <= kPi4 + 1e-15);

    // A V = U_tilde diag(sigma)
    const DenseMatrix av = multiply(a, r.v);
    double err = 0.0;
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 8; ++j) {
        err = std::max(err,
                       std::fabs(av(i, j) - r.u_tilde(i, j) * r.sigma[j]));
      }
    }
    CHECK(err <= 1e-10 * norm(a, NormKind::Frobenius));
  }
}

TEST_CASE("svd preserves the Frobenius norm") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 16, 10, 34);
  const Layout lay(LayoutKind::Scattered, 2, 16, 10);
  const SVDResult r = hestenes_svd(a, JacobiOptions{}, lay, cfg(2));
  double sum = 0.0;
  for (double s : r.sigma) sum += s * s;
  const double fro2 = std::pow(norm(a, NormKind::Frobenius), 2);
  CHECK(sum == doctest::Approx(fro2).epsilon(1e-10));
}

TEST_CASE("svd sweep count stays small") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 24, 24, 35);
  const Layout lay(LayoutKind::Scattered, 2, 24, 24);
  const SVDResult r = hestenes_svd(a, JacobiOptions{}, lay, cfg(2));
  CHECK(r.sweeps_used <= 15);
  CHECK(r.sweeps_used >= 1);
}

TEST_CASE("svd reports non-convergence with the best iterate") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 8, 8, 36);
  JacobiOptions opt;
  opt.max_sweeps = 1;
  opt.tol = 1e-15;
  const Layout lay(LayoutKind::Scattered, 2, 8, 8);
  try {
    hestenes_svd(a, opt, lay, cfg(2));
    FAIL("expected SvdNoConvergence");
  } catch (const SvdNoConvergence& e) {
    CHECK(e.sweeps == 1);
    CHECK(e.best.rotations > 0);
    CHECK(e.best.u_tilde.rows() == 8);
  }
}

TEST_CASE("eig of a diagonal matrix") {
  DenseMatrix b(3, 3);
  b(0, 0) = -1.0;
  b(1, 1) = 4.0;
  b(2, 2) = 2.0;
  const EigResult r = jacobi_eig(b, JacobiOptions{}, cfg(1));
  CHECK(r.eigenvalues == std::vector<double>{4.0, 2.0, -1.0});
  CHECK(r.rotations == 0);
}

TEST_CASE("eig of the standard 2x2") {
  DenseMatrix b(2, 2);
  b(0, 0) = 2.0;
  b(0, 1) = 1.0;
  b(1, 0) = 1.0;
  b(1, 1) = 2.0;
  const EigResult r = jacobi_eig(b, JacobiOptions{}, cfg(1));
  CHECK(r.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig matches the serial oracle") {
  const DenseMatrix b = random_symmetric(16, 37);
  const EigResult r = jacobi_eig(b, JacobiOptions{}, cfg(2));
  const SerialEig e = serial_jacobi_oracle(b);
  std::vector<double> lam = e.eigenvalues;
  std::sort(lam.rbegin(), lam.rend());
  for (int i = 0; i < 16; ++i) {
    CHECK(r.eigenvalues[i] == doctest::Approx(lam[i]).epsilon(1e-9));
  }
  // V^T B V = diag
  const DenseMatrix d = multiply(transpose(r.v), multiply(b, r.v));
  double err = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      err = std::max(err,
                     std::fabs(d(i, j) - (i == j ? r.eigenvalues[i] : 0.0)));
    }
  }
  CHECK(err <= 1e-10 * norm(b, NormKind::Frobenius));
}

TEST_CASE("eig requires symmetry") {
  DenseMatrix b(2, 2);
  b(0, 1) = 1.0;
  CHECK_THROWS_AS(jacobi_eig(b, JacobiOptions{}, cfg(1)), NotSymmetricError);
}

TEST_CASE("svd and eig of the Gram matrix agree") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 10, 6, 38);
  const Layout lay(LayoutKind::Scattered, 2, 10, 6);
  const SVDResult s = hestenes_svd(a, JacobiOptions{}, lay, cfg(2));
  const EigResult e =
      jacobi_eig(multiply(transpose(a), a), JacobiOptions{}, cfg(2));
  for (int i = 0; i < 6; ++i) {
    CHECK(s.sigma[i] * s.sigma[i] ==
          doctest::Approx(e.eigenvalues[i]).epsilon(1e-8));
  }
}

TEST_CASE("tournament and cyclic orderings cost differently but agree") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 12, 8, 39);
  const Layout lay(LayoutKind::Scattered, 2, 12, 8);
  JacobiOptions cyc;
  cyc.ordering = SweepOrdering::CyclicRows;
  JacobiOptions tour;
  tour.ordering = SweepOrdering::Tournament;
  const SVDResult rc = hestenes_svd(a, cyc, lay, cfg(2));
  const SVDResult rt = hestenes_svd(a, tour, lay, cfg(2));
  for (int i = 0; i < 8; ++i) {
    CHECK(rc.sigma[i] == doctest::Approx(rt.sigma[i]).epsilon(1e-9));
  }
  CHECK(rc.ledger.makespan() > 0.0);
  CHECK(rt.ledger.makespan() > 0.0);
}

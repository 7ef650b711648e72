#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridla/errors.hpp"
#include "gridla/matrix.hpp"
#include "gridla/oracles.hpp"

using namespace gridla;

TEST_CASE("dense matrix basics") {
  DenseMatrix a(2, 3);
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(a(i, j) == 0.0);
  }
  a(1, 2) = 4.5;
  CHECK(a(1, 2) == 4.5);
  CHECK(a.all_finite());
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(a.all_finite());

  const DenseMatrix id = DenseMatrix::identity(3);
  CHECK(id(0, 0) == 1.0);
  CHECK(id(0, 1) == 0.0);
}

TEST_CASE("permutation semantics") {
  Permutation p(4);
  CHECK(p.is_identity());
  p.swap(0, 2);
  CHECK(p[0] == 2);
  CHECK(p[2] == 0);

  DenseMatrix a(4, 1);
  for (int i = 0; i < 4; ++i) a(i, 0) = double(i);
  const DenseMatrix pa = permute_rows(p, a);
  CHECK(pa(0, 0) == 2.0);
  CHECK(pa(2, 0) == 0.0);

  const Permutation inv = p.inverse();
  const DenseMatrix back = permute_rows(inv, pa);
  CHECK(back == a);

  const DenseMatrix pm = p.to_matrix();
  CHECK(multiply(pm, a) == pa);

  CHECK_THROWS_AS(Permutation(std::vector<int>{0, 0, 1}),
                  std::invalid_argument);
}

TEST_CASE("permute_cols_inv undoes a column permutation") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 3, 5, 11);
  Permutation p(5);
  p.swap(1, 4);
  p.swap(0, 2);
  // (A P^{-1}) P == A when applied through the matrix forms
  const DenseMatrix lhs = permute_cols_inv(a, p);
  const DenseMatrix rhs = multiply(a, transpose(p.to_matrix()));
  CHECK(lhs == rhs);
}

TEST_CASE("generator is deterministic and in range") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 6, 4, 42);
  const DenseMatrix b = generate(MatrixKind::RandomUniform, 6, 4, 42);
  CHECK(a == b);
  const DenseMatrix c = generate(MatrixKind::RandomUniform, 6, 4, 43);
  CHECK(a != c);
  for (double v : a.data()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("structured generator kinds") {
  const DenseMatrix id = generate(MatrixKind::Identity, 3, 3, 0);
  CHECK(id == DenseMatrix::identity(3));

  const DenseMatrix u = generate(MatrixKind::UpperTriangular, 5, 5, 7);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < i; ++j) CHECK(u(i, j) == 0.0);
    CHECK(u(i, i) != 0.0);
  }

  const DenseMatrix band = generate(MatrixKind::Band, 6, 6, 7, 1);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (std::abs(i - j) > 1) CHECK(band(i, j) == 0.0);
    }
  }

  const DenseMatrix h = generate(MatrixKind::Hilbert, 3, 3, 0);
  CHECK(h(0, 0) == 1.0);
  CHECK(h(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(h(2, 1) == doctest::Approx(1.0 / 4.0));
}

TEST_CASE("norms") {
  DenseMatrix a(2, 2);
  a(0, 0) = 3.0;
  a(0, 1) = -4.0;
  a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  CHECK(norm(a, NormKind::Frobenius) == doctest::Approx(std::sqrt(30.0)));
  CHECK(norm(a, NormKind::Inf) == 7.0);     // max row abs sum
  CHECK(norm(a, NormKind::MaxAbs) == 4.0);
}

TEST_CASE("multiply and transpose") {
  DenseMatrix a(2, 3), b(3, 2);
  int v = 1;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = v++;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) b(i, j) = v++;
  const DenseMatrix c = multiply(a, b);
  CHECK(c(0, 0) == 1 * 7 + 2 * 9 + 3 * 11);
  CHECK(c(1, 1) == 4 * 8 + 5 * 10 + 6 * 12);
  const DenseMatrix at = transpose(a);
  CHECK(at.rows() == 3);
  CHECK(at(2, 1) == a(1, 2));
}

TEST_CASE("singularity floor scales with size and magnitude") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 8, 8, 3);
  const double f = singularity_floor(a);
  CHECK(f > 0.0);
  CHECK(f == 8.0 * std::numeric_limits<double>::epsilon() *
                 norm(a, NormKind::MaxAbs));
}

TEST_CASE("serial lu oracle factors PA = LU") {
  const DenseMatrix a = generate(MatrixKind::RandomUniform, 12, 12, 5);
  const SerialLU f = serial_lu_oracle(a);
  const DenseMatrix pa = permute_rows(f.perm, a);
  const DenseMatrix lu = multiply(f.l, f.u);
  double worst = 0.0;
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      worst = std::max(worst, std::fabs(pa(i, j) - lu(i, j)));
    }
  }
  CHECK(worst <= 1e-13);
  for (int i = 0; i < 12; ++i) {
    CHECK(f.l(i, i) == 1.0);
    for (int j = i + 1; j < 12; ++j) {
      CHECK(f.u(j, i) == 0.0);
      CHECK(std::fabs(f.l(i, j)) == 0.0);
    }
  }
}

TEST_CASE("serial lu oracle pivots by magnitude") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = -3.0;
  a(1, 1) = 1.0;
  const SerialLU f = serial_lu_oracle(a);
  CHECK(f.perm[0] == 1);
  CHECK(f.u(0, 0) == -3.0);
}

TEST_CASE("serial lu oracle rejects singular input") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;
  CHECK_THROWS_AS(serial_lu_oracle(a), SingularMatrixError);
}

TEST_CASE("serial jacobi oracle on a 2x2") {
  DenseMatrix b(2, 2);
  b(0, 0) = 2.0;
  b(0, 1) = 1.0;
  b(1, 0) = 1.0;
  b(1, 1) = 2.0;
  const SerialEig e = serial_jacobi_oracle(b);
  std::vector<double> ev = e.eigenvalues;
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("serial jacobi oracle diagonalizes a random symmetric matrix") {
  const int n = 10;
  DenseMatrix r = generate(MatrixKind::RandomUniform, n, n, 9);
  DenseMatrix b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = r(i, j) + r(j, i);
  }
  const SerialEig e = serial_jacobi_oracle(b);
  const DenseMatrix d = multiply(transpose(e.v), multiply(b, e.v));
  for (int i = 0; i < n; ++i) {
    CHECK(d(i, i) == doctest::Approx(e.eigenvalues[i]).epsilon(1e-10));
    for (int j = 0; j < n; ++j) {
      if (i != j) CHECK(std::fabs(d(i, j)) <= 1e-10);
    }
  }
  double tr = 0.0, sum = 0.0;
  for (int i = 0; i < n; ++i) {
    tr += b(i, i);
    sum += e.eigenvalues[i];
  }
  CHECK(sum == doctest::Approx(tr).epsilon(1e-12));
}

TEST_CASE("serial jacobi oracle requires symmetry") {
  DenseMatrix b(2, 2);
  b(0, 1) = 1.0;
  CHECK_THROWS_AS(serial_jacobi_oracle(b), NotSymmetricError);
}

TEST_CASE("serial back substitution") {
  DenseMatrix u(3, 3);
  u(0, 0) = 2.0;
  u(0, 1) = 1.0;
  u(0, 2) = -1.0;
  u(1, 1) = 3.0;
  u(1, 2) = 2.0;
  u(2, 2) = 4.0;
  const std::vector<double> x = serial_back_substitute(u, {1.0, 8.0, 8.0});
  CHECK(x[2] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(4.0 / 3.0));
  CHECK(x[0] == doctest::Approx((1.0 - 4.0 / 3.0 + 2.0) / 2.0));
}

#include "gridla/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "gridla/errors.hpp"

namespace gridla {

SerialLU serial_lu_oracle(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("serial_lu_oracle: matrix must be square");
  }
  const int n = a.rows();
  const double floor = singularity_floor(a);
  DenseMatrix w = a;
  Permutation perm(n);

  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::fabs(w(i, k)) > std::fabs(w(pivot, k))) pivot = i;
    }
    if (std::fabs(w(pivot, k)) < floor) throw SingularMatrixError(k);
    if (pivot != k) {
      for (int j = 0; j < n; ++j) std::swap(w(k, j), w(pivot, j));
      perm.swap(k, pivot);
    }
    for (int i = k + 1; i < n; ++i) {
      const double m = w(i, k) / w(k, k);
      w(i, k) = m;
      if (m == 0.0) continue;
      for (int j = k + 1; j < n; ++j) w(i, j) -= m * w(k, j);
    }
  }

  SerialLU out{perm, DenseMatrix::identity(n), DenseMatrix(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) out.l(i, j) = w(i, j);
    for (int j = i; j < n; ++j) out.u(i, j) = w(i, j);
  }
  return out;
}

SerialEig serial_jacobi_oracle(const DenseMatrix& b, int max_sweeps) {
  if (b.rows() != b.cols()) {
    throw std::invalid_argument("serial_jacobi_oracle: matrix must be square");
  }
  const int n = b.rows();
  const double fro = norm(b, NormKind::Frobenius);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::fabs(b(i, j) - b(j, i)) > 1e-12 * std::max(fro, 1.0)) {
        throw NotSymmetricError();
      }
    }
  }

  DenseMatrix w = b;
  DenseMatrix v = DenseMatrix::identity(n);
  const double tol = 1e-14 * std::max(fro, 1.0);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double bpq = w(p, q);
        if (std::fabs(bpq) <= tol) continue;
        rotated = true;
        const double tau = (w(q, q) - w(p, p)) / (2.0 * bpq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double wkp = w(k, p), wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (int k = 0; k < n; ++k) {
          const double wpk = w(p, k), wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }
  if (sweep == max_sweeps) throw NoConvergenceError(max_sweeps);

  SerialEig out{std::vector<double>(n), std::move(v)};
  for (int i = 0; i < n; ++i) out.eigenvalues[i] = w(i, i);
  return out;
}

std::vector<double> serial_back_substitute(const DenseMatrix& u,
                                           const std::vector<double>& rhs) {
  const int n = u.rows();
  if (u.cols() != n || int(rhs.size()) != n) {
    throw std::invalid_argument("serial_back_substitute: dimension mismatch");
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double sum = rhs[i];
    for (int j = i + 1; j < n; ++j) sum -= u(i, j) * x[j];
    if (u(i, i) == 0.0) throw SingularMatrixError(i);
    x[i] = sum / u(i, i);
  }
  return x;
}

}  // namespace gridla

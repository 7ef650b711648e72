#include "gridla/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace gridla {

DenseMatrix::DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("matrix dimensions must be positive, got " +
                                std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  data_.assign(std::size_t(rows) * cols, 0.0);
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

Permutation::Permutation(int n) {
  if (n < 1) throw std::invalid_argument("permutation size must be positive");
  map_.resize(n);
  for (int i = 0; i < n; ++i) map_[i] = i;
}

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
  const int n = int(map_.size());
  if (n < 1) throw std::invalid_argument("permutation size must be positive");
  std::vector<char> seen(n, 0);
  for (int v : map_) {
    if (v < 0 || v >= n || seen[v]) {
      throw std::invalid_argument("permutation map is not a bijection");
    }
    seen[v] = 1;
  }
}

void Permutation::swap(int a, int b) { std::swap(map_[a], map_[b]); }

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (int i = 0; i < size(); ++i) {
    if (map_[i] != i) return false;
  }
  return true;
}

DenseMatrix Permutation::to_matrix() const {
  DenseMatrix p(size(), size());
  for (int i = 0; i < size(); ++i) p(i, map_[i]) = 1.0;
  return p;
}

namespace {

// Portable uniform doubles in [-1, 1]; mt19937_64 output is standardized,
// the float mapping avoids implementation-defined distributions.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : rng_(seed) {}
  double next() {
    const double u = double(rng_() >> 11) * 0x1.0p-53;  // [0, 1)
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

DenseMatrix generate(MatrixKind kind, int m, int n, std::uint64_t seed,
                     int band_width) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("generate: dimensions must be >= 1");
  }
  DenseMatrix a(m, n);
  switch (kind) {
    case MatrixKind::RandomUniform: {
      UniformSource src(seed);
      for (double& x : a.data()) x = src.next();
      break;
    }
    case MatrixKind::Identity: {
      for (int i = 0; i < std::min(m, n); ++i) a(i, i) = 1.0;
      break;
    }
    case MatrixKind::UpperTriangular: {
      UniformSource src(seed);
      for (int i = 0; i < m; ++i) {
        for (int j = i; j < n; ++j) a(i, j) = src.next();
      }
      break;
    }
    case MatrixKind::Band: {
      if (band_width < 0 || band_width >= std::min(m, n)) {
        throw std::invalid_argument("generate: band width must satisfy 0 <= w < min(m,n)");
      }
      UniformSource src(seed);
      for (int i = 0; i < m; ++i) {
        for (int j = std::max(0, i - band_width);
             j <= std::min(n - 1, i + band_width); ++j) {
          a(i, j) = src.next();
        }
      }
      break;
    }
    case MatrixKind::Hilbert: {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = 1.0 / double(i + j + 1);
      }
      break;
    }
  }
  return a;
}

double norm(const DenseMatrix& a, NormKind which) {
  switch (which) {
    case NormKind::Frobenius: {
      double sum = 0.0;
      for (double x : a.data()) sum += x * x;
      return std::sqrt(sum);
    }
    case NormKind::Inf: {
      double best = 0.0;
      for (int i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (int j = 0; j < a.cols(); ++j) row += std::fabs(a(i, j));
        best = std::max(best, row);
      }
      return best;
    }
    case NormKind::MaxAbs: {
      double best = 0.0;
      for (double x : a.data()) best = std::max(best, std::fabs(x));
      return best;
    }
  }
  return 0.0;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("multiply: inner dimensions mismatch");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

DenseMatrix permute_rows(const Permutation& p, const DenseMatrix& a) {
  if (p.size() != a.rows()) {
    throw std::invalid_argument("permute_rows: size mismatch");
  }
  DenseMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(p[i], j);
  }
  return out;
}

DenseMatrix permute_cols_inv(const DenseMatrix& a, const Permutation& p) {
  if (p.size() != a.cols()) {
    throw std::invalid_argument("permute_cols_inv: size mismatch");
  }
  DenseMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int c = 0; c < a.cols(); ++c) out(i, c) = a(i, p[c]);
  }
  return out;
}

double singularity_floor(const DenseMatrix& a) {
  const double eps = std::numeric_limits<double>::epsilon();
  return double(std::max(a.rows(), a.cols())) * eps * norm(a, NormKind::MaxAbs);
}

}  // namespace gridla

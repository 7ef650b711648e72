#pragma once

#include <cstdint>
#include <vector>

namespace gridla {

/// Row-major dense matrix of 64-bit floats.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols);  // zero-filled

  static DenseMatrix identity(int n);

  double& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const {
    return data_[std::size_t(i) * cols_ + j];
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool all_finite() const;

  bool operator==(const DenseMatrix& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Bijection on {0,...,n-1}. map()[i] = j means row i of the permuted
/// matrix is row j of the original (PA semantics).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(int n);                 // identity
  explicit Permutation(std::vector<int> map);  // validated

  int size() const { return int(map_.size()); }
  int operator[](int i) const { return map_[i]; }
  const std::vector<int>& map() const { return map_; }

  void swap(int a, int b);
  Permutation inverse() const;
  bool is_identity() const;
  DenseMatrix to_matrix() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> map_;
};

enum class MatrixKind { RandomUniform, Identity, UpperTriangular, Band, Hilbert };

/// Deterministic generator; RandomUniform entries lie in [-1, 1].
/// Band uses half-bandwidth band_width (entries with |i-j| > band_width are 0).
DenseMatrix generate(MatrixKind kind, int m, int n, std::uint64_t seed,
                     int band_width = 0);

enum class NormKind { Frobenius, Inf, MaxAbs };

double norm(const DenseMatrix& a, NormKind which);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix permute_rows(const Permutation& p, const DenseMatrix& a);  // PA
// A * P^{-1}: column c of the result is column p[c] of A.
DenseMatrix permute_cols_inv(const DenseMatrix& a, const Permutation& p);

/// Pivot floor below which a value is treated as zero: n * eps * max|A|.
double singularity_floor(const DenseMatrix& a);

}  // namespace gridla

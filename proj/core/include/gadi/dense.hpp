#pragma once

#include <vector>

#include "gadi/sparse.hpp"

namespace gadi {

/// Small dense row-major matrix; used for iteration matrices and as the
/// densified form of instances at or below dense_cap.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(index_t rows, index_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}
  static DenseMatrix identity(index_t n);
  static DenseMatrix from_sparse(const SparseMatrix& A);

  index_t n_rows() const { return rows_; }
  index_t n_cols() const { return cols_; }
  double& operator()(index_t i, index_t j) { return a_[i * cols_ + j]; }
  double operator()(index_t i, index_t j) const { return a_[i * cols_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

 private:
  index_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Instances at or below this size may be densified for SVD/eigenvalue
/// evaluation; larger ones use the iterative estimators.
inline constexpr index_t kDenseCap = 4096;

/// (sigma_max, sigma_min) of a square nonsingular sparse matrix. Dense SVD up
/// to kDenseCap (symmetric and skew-symmetric inputs take exact eigenvalue
/// shortcuts); power iteration on A^T A plus inverse iteration through a
/// binary64 LU beyond that, both to 1e-8 relative.
std::pair<double, double> sigma_extremes(const SparseMatrix& A);

/// Largest eigenvalue modulus of a dense matrix (real Schur form), 1e-8
/// relative accuracy.
double spectral_radius(const DenseMatrix& T);

}  // namespace gadi

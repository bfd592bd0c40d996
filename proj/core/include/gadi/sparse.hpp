#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

namespace gadi {

using index_t = std::int64_t;
using Vector = std::vector<double>;

/// Compressed-sparse-row real matrix, binary64 master storage. Column indices
/// are strictly increasing within each row and duplicates are merged on
/// construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(index_t n_rows, index_t n_cols, std::vector<index_t> row_ptr,
               std::vector<index_t> col_idx, std::vector<double> values);

  /// Build from unordered (row, col, value) triplets; duplicates are summed.
  static SparseMatrix from_triplets(index_t n_rows, index_t n_cols,
                                    std::vector<std::tuple<index_t, index_t, double>> triplets);
  static SparseMatrix identity(index_t n);
  static SparseMatrix diagonal(const Vector& d);
  /// Square tridiagonal Toeplitz matrix with (sub, diag, super) bands.
  static SparseMatrix tridiag(index_t n, double sub, double diag, double super);
  static SparseMatrix from_dense(index_t n_rows, index_t n_cols, const std::vector<double>& row_major,
                                 double drop_tol = 0.0);

  index_t n_rows() const { return n_rows_; }
  index_t n_cols() const { return n_cols_; }
  index_t nnz() const { return static_cast<index_t>(values_.size()); }

  const std::vector<index_t>& row_ptr() const { return row_ptr_; }
  const std::vector<index_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double at(index_t i, index_t j) const;  // 0 for structural zeros

  SparseMatrix transpose() const;
  std::vector<double> to_dense_row_major() const;

  /// True when A(i,j) == A(j,i) (resp. == -A(j,i)) exactly as stored.
  bool is_symmetric() const;
  bool is_skew_symmetric() const;

  /// Lower/upper bandwidth of the stored pattern.
  index_t lower_bandwidth() const;
  index_t upper_bandwidth() const;

  /// Largest row sum of absolute values.
  double inf_norm() const;

 private:
  void validate() const;

  index_t n_rows_ = 0, n_cols_ = 0;
  std::vector<index_t> row_ptr_{0};
  std::vector<index_t> col_idx_;
  std::vector<double> values_;
};

/// C = alpha*A + beta*B on matching shapes (pattern union).
SparseMatrix add(double alpha, const SparseMatrix& A, double beta, const SparseMatrix& B);

/// A + shift*I (the full diagonal joins the pattern).
SparseMatrix shift_diagonal(const SparseMatrix& A, double shift);

// --- Matrix Market coordinate format (real, general or symmetric) ---

SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);
void write_matrix_market(std::ostream& out, const SparseMatrix& A);
void write_matrix_market_file(const std::string& path, const SparseMatrix& A);

}  // namespace gadi

#include "gadi/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gadi/errors.hpp"

namespace gadi {

SparseMatrix::SparseMatrix(index_t n_rows, index_t n_cols, std::vector<index_t> row_ptr,
                           std::vector<index_t> col_idx, std::vector<double> values)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)), values_(std::move(values)) {
  validate();
}

void SparseMatrix::validate() const {
  if (n_rows_ < 0 || n_cols_ < 0) throw ContractViolation("negative dimension");
  if (row_ptr_.size() != static_cast<size_t>(n_rows_) + 1)
    throw ContractViolation("row_ptr length must be n_rows+1");
  if (row_ptr_.front() != 0 || row_ptr_.back() != nnz())
    throw ContractViolation("row_ptr must start at 0 and end at nnz");
  if (col_idx_.size() != values_.size()) throw ContractViolation("col_idx/values length mismatch");
  for (index_t i = 0; i < n_rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw ContractViolation("row_ptr must be non-decreasing");
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= n_cols_) throw ContractViolation("column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw ContractViolation("column indices must be strictly increasing within a row");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(index_t n_rows, index_t n_cols,
                                         std::vector<std::tuple<index_t, index_t, double>> t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::vector<index_t> rp(n_rows + 1, 0), ci;
  std::vector<double> v;
  ci.reserve(t.size());
  v.reserve(t.size());
  for (size_t k = 0; k < t.size();) {
    auto [i, j, x] = t[k];
    double sum = x;
    size_t m = k + 1;
    while (m < t.size() && std::get<0>(t[m]) == i && std::get<1>(t[m]) == j) sum += std::get<2>(t[m++]);
    k = m;
    if (i < 0 || i >= n_rows || j < 0 || j >= n_cols) throw ContractViolation("triplet out of range");
    ci.push_back(j);
    v.push_back(sum);
    ++rp[i + 1];
  }
  for (index_t i = 0; i < n_rows; ++i) rp[i + 1] += rp[i];
  return SparseMatrix(n_rows, n_cols, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::identity(index_t n) {
  std::vector<index_t> rp(n + 1), ci(n);
  std::vector<double> v(n, 1.0);
  for (index_t i = 0; i <= n; ++i) rp[i] = i;
  for (index_t i = 0; i < n; ++i) ci[i] = i;
  return SparseMatrix(n, n, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::diagonal(const Vector& d) {
  const index_t n = static_cast<index_t>(d.size());
  std::vector<index_t> rp(n + 1), ci(n);
  for (index_t i = 0; i <= n; ++i) rp[i] = i;
  for (index_t i = 0; i < n; ++i) ci[i] = i;
  return SparseMatrix(n, n, std::move(rp), std::move(ci), d);
}

SparseMatrix SparseMatrix::tridiag(index_t n, double sub, double diag, double super) {
  std::vector<std::tuple<index_t, index_t, double>> t;
  t.reserve(3 * n);
  for (index_t i = 0; i < n; ++i) {
    if (i > 0 && sub != 0.0) t.emplace_back(i, i - 1, sub);
    if (diag != 0.0) t.emplace_back(i, i, diag);
    if (i + 1 < n && super != 0.0) t.emplace_back(i, i + 1, super);
  }
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(index_t n_rows, index_t n_cols,
                                      const std::vector<double>& a, double drop_tol) {
  std::vector<std::tuple<index_t, index_t, double>> t;
  for (index_t i = 0; i < n_rows; ++i)
    for (index_t j = 0; j < n_cols; ++j) {
      const double x = a[i * n_cols + j];
      if (std::fabs(x) > drop_tol) t.emplace_back(i, j, x);
    }
  return from_triplets(n_rows, n_cols, std::move(t));
}

double SparseMatrix::at(index_t i, index_t j) const {
  for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (col_idx_[k] == j) return values_[k];
  return 0.0;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<index_t> rp(n_cols_ + 1, 0), ci(nnz());
  std::vector<double> v(nnz());
  for (index_t k = 0; k < nnz(); ++k) ++rp[col_idx_[k] + 1];
  for (index_t j = 0; j < n_cols_; ++j) rp[j + 1] += rp[j];
  std::vector<index_t> next(rp.begin(), rp.end() - 1);
  for (index_t i = 0; i < n_rows_; ++i)
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const index_t p = next[col_idx_[k]]++;
      ci[p] = i;
      v[p] = values_[k];
    }
  return SparseMatrix(n_cols_, n_rows_, std::move(rp), std::move(ci), std::move(v));
}

std::vector<double> SparseMatrix::to_dense_row_major() const {
  std::vector<double> d(static_cast<size_t>(n_rows_) * n_cols_, 0.0);
  for (index_t i = 0; i < n_rows_; ++i)
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      d[i * n_cols_ + col_idx_[k]] = values_[k];
  return d;
}

bool SparseMatrix::is_symmetric() const {
  if (n_rows_ != n_cols_) return false;
  const SparseMatrix t = transpose();
  return t.row_ptr() == row_ptr_ && t.col_idx() == col_idx_ && t.values() == values_;
}

bool SparseMatrix::is_skew_symmetric() const {
  if (n_rows_ != n_cols_) return false;
  const SparseMatrix t = transpose();
  if (t.row_ptr() != row_ptr_ || t.col_idx() != col_idx_) return false;
  for (size_t k = 0; k < values_.size(); ++k)
    if (t.values()[k] != -values_[k]) return false;
  return true;
}

index_t SparseMatrix::lower_bandwidth() const {
  index_t b = 0;
  for (index_t i = 0; i < n_rows_; ++i)
    if (row_ptr_[i] < row_ptr_[i + 1]) b = std::max(b, i - col_idx_[row_ptr_[i]]);
  return std::max<index_t>(b, 0);
}

index_t SparseMatrix::upper_bandwidth() const {
  index_t b = 0;
  for (index_t i = 0; i < n_rows_; ++i)
    if (row_ptr_[i] < row_ptr_[i + 1]) b = std::max(b, col_idx_[row_ptr_[i + 1] - 1] - i);
  return std::max<index_t>(b, 0);
}

double SparseMatrix::inf_norm() const {
  double m = 0.0;
  for (index_t i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::fabs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

SparseMatrix add(double alpha, const SparseMatrix& A, double beta, const SparseMatrix& B) {
  if (A.n_rows() != B.n_rows() || A.n_cols() != B.n_cols())
    throw ContractViolation("add: shape mismatch");
  std::vector<std::tuple<index_t, index_t, double>> t;
  t.reserve(A.nnz() + B.nnz());
  for (index_t i = 0; i < A.n_rows(); ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
      t.emplace_back(i, A.col_idx()[k], alpha * A.values()[k]);
  for (index_t i = 0; i < B.n_rows(); ++i)
    for (index_t k = B.row_ptr()[i]; k < B.row_ptr()[i + 1]; ++k)
      t.emplace_back(i, B.col_idx()[k], beta * B.values()[k]);
  return SparseMatrix::from_triplets(A.n_rows(), A.n_cols(), std::move(t));
}

SparseMatrix shift_diagonal(const SparseMatrix& A, double shift) {
  if (A.n_rows() != A.n_cols()) throw ContractViolation("shift_diagonal: square matrix required");
  return add(1.0, A, shift, SparseMatrix::identity(A.n_rows()));
}

}  // namespace gadi

#include "gadi/dense.hpp"

namespace gadi {

DenseMatrix DenseMatrix::identity(index_t n) {
  DenseMatrix I(n, n);
  for (index_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& A) {
  DenseMatrix D(A.n_rows(), A.n_cols());
  for (index_t i = 0; i < A.n_rows(); ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
      D(i, A.col_idx()[k]) = A.values()[k];
  return D;
}

}  // namespace gadi

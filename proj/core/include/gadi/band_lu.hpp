#pragma once

// Banded LU with partial pivoting in emulated precision: every scalar
// operation of the elimination and of the triangular solves is rounded to the
// working format. LAPACK-style band storage with kl extra superdiagonals of
// fill space for row interchanges.

#include <memory>
#include <vector>

#include "gadi/precision.hpp"
#include "gadi/sparse.hpp"

namespace gadi {

class BandLU {
 public:
  /// Factor P*A = L*U. A's entries are rounded to fmt on entry; a selected
  /// pivot below fmt's normal range raises SingularInPrecision, non-finite
  /// factor entries raise OverflowDetected.
  BandLU(const SparseMatrix& A, Precision fmt, RoundingStats* stats = nullptr);

  /// Forward/back substitution in fmt arithmetic; rhs is rounded to fmt on
  /// entry.
  Vector solve(const Vector& rhs, RoundingStats* stats = nullptr) const;

  /// Transposed solve, binary64 factorizations only (used by the large-n
  /// singular-value estimator).
  Vector solve_transposed(const Vector& rhs) const;

  index_t n() const { return n_; }
  Precision precision() const { return fmt_; }
  index_t kl() const { return kl_; }
  index_t ku() const { return ku_; }
  const std::vector<index_t>& pivots() const { return ipiv_; }

  /// Multiply the stored factors (and interleaved interchanges) back together
  /// in binary64: the result approximates the rounded input to within the
  /// elimination's backward error. Small n only (dense output).
  std::vector<double> reconstruct() const;

  /// Raw band entry A(i,j) of the factored storage (L multipliers below the
  /// diagonal, U on and above), 0 outside the band.
  double factored_entry(index_t i, index_t j) const;

 private:
  template <class Policy>
  void factor(const SparseMatrix& A, RoundingStats* stats);
  template <class Policy>
  Vector solve_impl(const Vector& rhs, RoundingStats* stats) const;

  index_t n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
  Precision fmt_ = Precision::Double;
  std::vector<double> ab_d_;  // Double storage
  std::vector<float> ab_f_;   // Single/Half storage (binary16 values are exact in binary32)
  std::vector<index_t> ipiv_;
};

}  // namespace gadi

#pragma once

// Precision-parameterized vector and sparse-matrix kernels. Every scalar
// operation is rounded to the requested format; Double runs native (which is
// the same thing, one rounding per op).

#include "gadi/precision.hpp"
#include "gadi/sparse.hpp"

namespace gadi {

/// Elementwise round_to.
Vector round_vec(const Vector& x, Precision p);
Vector round_vec(const Vector& x, Precision p, RoundingStats& stats);

/// y_i = fold of rounded mul/add over row i, in stored column order.
Vector matvec(const SparseMatrix& A, const Vector& x, Precision p, RoundingStats* stats = nullptr);

/// Two-stage residual: s = b - A*x entirely in u_f, then round_to(s, u_r)
/// elementwise.
Vector residual(const SparseMatrix& A, const Vector& x, const Vector& b, Precision u_f,
                Precision u_r, RoundingStats* stats = nullptr);

/// y + alpha*x, one rounded mul and one rounded add per element.
Vector axpy(double alpha, const Vector& x, const Vector& y, Precision p,
            RoundingStats* stats = nullptr);

/// alpha*x elementwise.
Vector scale(double alpha, const Vector& x, Precision p, RoundingStats* stats = nullptr);

/// Rounded dot product; terms are accumulated pairwise (per-op rounding, no
/// wide accumulator).
double dot(const Vector& x, const Vector& y, Precision p, RoundingStats* stats = nullptr);

/// Rounded 2-norm, scaled by the max absolute entry before squaring so that
/// the squared sum cannot overflow when the entries themselves are
/// representable.
double norm2(const Vector& x, Precision p, RoundingStats* stats = nullptr);

// Binary64 helpers used for instrumentation and stopping tests.
double norm2_64(const Vector& x);
double inf_norm(const Vector& x);
bool all_finite(const Vector& x);
Vector sub_64(const Vector& a, const Vector& b);

}  // namespace gadi

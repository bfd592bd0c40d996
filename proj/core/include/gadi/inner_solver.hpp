#pragma once

// Inner solves of H z = r and S y = p*z performed entirely in the reduced
// precision u_r, with factorization reuse across outer iterations.

#include <memory>
#include <string>

#include "gadi/band_lu.hpp"
#include "gadi/precision.hpp"
#include "gadi/sparse.hpp"

namespace gadi {

enum class InnerMethod : std::uint8_t { LuDirect, Cg, Gmres };

InnerMethod inner_method_from_name(const std::string& s);
const char* name(InnerMethod m);

struct InnerSolverSpec {
  InnerMethod method = InnerMethod::LuDirect;
  double tol_epsilon = 1e-2;  // inner residual target, relative to ||r(0)||_2
  int max_inner_iters = 1000;
  int restart = 30;  // gmres only
};

/// A reusable banded LU of one operator in one format; immutable after
/// construction and shareable across concurrent solves.
struct Factorization {
  Precision fmt = Precision::Double;
  std::string for_matrix;  // identity tag, e.g. "H" or "S"
  std::shared_ptr<const BandLU> lu;

  index_t n() const { return lu ? lu->n() : 0; }
};

/// LU with partial pivoting, every scalar operation rounded to fmt.
/// Throws SingularInPrecision / OverflowDetected.
Factorization factorize(const SparseMatrix& A, Precision fmt, std::string label = {},
                        RoundingStats* stats = nullptr);

/// Forward/back substitution in the factorization's format.
Vector solve_factored(const Factorization& f, const Vector& rhs, RoundingStats* stats = nullptr);

enum class InnerStatus : std::uint8_t { Converged, Stagnated, Overflow };

struct InnerResult {
  Vector x;
  int iters = 0;
  InnerStatus status = InnerStatus::Converged;
};

/// CG (symmetric positive definite A) or GMRES(restart) with every kernel
/// operation in fmt; the stopping norm is evaluated in binary64 on the
/// fmt-rounded recurrence residual, against tol_epsilon * stop_norm.
InnerResult krylov_solve(const SparseMatrix& A, const Vector& rhs, const InnerSolverSpec& spec,
                         Precision fmt, double stop_norm, RoundingStats* stats = nullptr);

}  // namespace gadi

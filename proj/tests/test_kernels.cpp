#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gadi/errors.hpp"
#include "gadi/kernels.hpp"
#include "gadi/problems.hpp"
#include "gadi/sparse.hpp"
#include "test_util.hpp"

using namespace gadi;

TEST_CASE("sparse construction and invariants") {
  auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 2.0}, {0, 0, 0.5}});
  CHECK(A.nnz() == 2);  // duplicate merged
  CHECK(A.at(0, 0) == 1.5);
  CHECK(A.at(0, 1) == 0.0);
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 2}, {0}, {1.0}), ContractViolation);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 5, 1.0}}), ContractViolation);

  auto T = SparseMatrix::tridiag(4, -1.0, 2.0, -1.0);
  CHECK(T.is_symmetric());
  CHECK(T.lower_bandwidth() == 1);
  CHECK(T.upper_bandwidth() == 1);
  auto S = SparseMatrix::tridiag(4, -0.5, 0.0, 0.5);
  CHECK(S.is_skew_symmetric());
  CHECK(!S.is_symmetric());

  auto Tt = T.transpose();
  CHECK(Tt.to_dense_row_major() == T.to_dense_row_major());
}

TEST_CASE("matrix market round trip") {
  std::mt19937_64 rng(2024);
  auto sys = testutil::random_spd_part_system(rng, 12, 0.5, 4.0, 1.0);
  std::stringstream ss;
  write_matrix_market(ss, sys.A);
  auto B = read_matrix_market(ss);
  CHECK(B.n_rows() == sys.A.n_rows());
  REQUIRE(B.nnz() == sys.A.nnz());
  CHECK(B.values() == sys.A.values());
  CHECK(B.col_idx() == sys.A.col_idx());

  // symmetric form stores the lower triangle only and expands on read
  std::stringstream s2;
  write_matrix_market(s2, sys.split.M);
  const std::string text = s2.str();
  CHECK(text.find("symmetric") != std::string::npos);
  std::stringstream s3(text);
  auto M2 = read_matrix_market(s3);
  CHECK(M2.to_dense_row_major() == sys.split.M.to_dense_row_major());

  std::stringstream bad("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
  CHECK_THROWS_AS(read_matrix_market(bad), IoError);
}

TEST_CASE("matvec: identity, tridiagonal, and half-precision overflow row") {
  auto I3 = SparseMatrix::identity(3);
  CHECK(matvec(I3, {1.0, 2.0, 3.0}, Precision::Half) == Vector{1.0, 2.0, 3.0});

  auto T = SparseMatrix::tridiag(3, -1.0, 2.0, -1.0);
  CHECK(matvec(T, {1.0, 1.0, 1.0}, Precision::Double) == Vector{1.0, 0.0, 1.0});

  // a single row of 5000 entries of 100 overflows the binary16 running sum
  std::vector<std::tuple<index_t, index_t, double>> t;
  for (index_t j = 0; j < 5000; ++j) t.emplace_back(0, j, 100.0);
  t.emplace_back(1, 1, 1.0);
  auto W = SparseMatrix::from_triplets(2, 5000, std::move(t));
  RoundingStats st;
  Vector y = matvec(W, Vector(5000, 1.0), Precision::Half, &st);
  CHECK(std::isinf(y[0]));
  CHECK(st.overflow_count >= 1);

  CHECK_THROWS_AS(matvec(I3, Vector(2, 1.0), Precision::Double), ContractViolation);
}

TEST_CASE("matvec in double equals the binary64 reference fold bitwise") {
  std::mt19937_64 rng(77);
  auto sys = testutil::random_spd_part_system(rng, 24, 0.5, 4.0, 1.5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Vector x(24);
  for (auto& v : x) v = u(rng);
  Vector y = matvec(sys.A, x, Precision::Double);
  for (index_t i = 0; i < 24; ++i) {
    double acc = 0.0;
    for (index_t k = sys.A.row_ptr()[i]; k < sys.A.row_ptr()[i + 1]; ++k)
      acc += sys.A.values()[k] * x[sys.A.col_idx()[k]];
    CHECK(y[i] == acc);
  }
}

TEST_CASE("residual: exactness and the two-stage error model") {
  auto T = SparseMatrix::tridiag(4, -1.0, 2.0, -1.0);
  Vector ones(4, 1.0);
  Vector b = matvec(T, ones, Precision::Double);
  CHECK(residual(T, ones, b, Precision::Double, Precision::Double) == Vector(4, 0.0));

  // x = 0: residual is round_to(b, half)
  auto I = SparseMatrix::identity(3);
  Vector bb{1.0005, 2.0, 70000.0};
  Vector r = residual(I, Vector(3, 0.0), bb, Precision::Half, Precision::Half);
  CHECK(r[0] == round_to(1.0005, Precision::Half));
  CHECK(r[1] == 2.0);
  CHECK(std::isinf(r[2]));

  // Eq-style bound on convdiff n=4 with x = exact ones: the true residual is
  // zero, so the computed one is pure rounding noise bounded by
  // (1+u_r) u_f (||A|| ||x|| + ||b||).
  auto prob = build_convdiff3d({4});
  Vector rr = residual(prob.A, prob.x_exact, prob.b, Precision::Half, Precision::Single);
  const double u_r = unit_roundoff(Precision::Single), u_f = unit_roundoff(Precision::Half);
  const double bound =
      (1.0 + u_r) * u_f * (prob.A.inf_norm() * inf_norm(prob.x_exact) + inf_norm(prob.b));
  CHECK(inf_norm(rr) <= bound);
  CHECK(inf_norm(rr) > 0.0);  // half arithmetic cannot cancel these rows exactly
}

TEST_CASE("norm2, dot, axpy basics") {
  CHECK(norm2({3.0, 4.0}, Precision::Double) == 5.0);
  CHECK(dot({1.0, 0.0}, {0.0, 1.0}, Precision::Half) == 0.0);
  CHECK(axpy(2.0, {1.0, 2.0}, {10.0, 20.0}, Precision::Double) == Vector{12.0, 24.0});
  CHECK(scale(0.5, {2.0, 4.0}, Precision::Half) == Vector{1.0, 2.0});
  CHECK_THROWS_AS(dot(Vector(2, 1.0), Vector(3, 1.0), Precision::Double), ContractViolation);

  // overflow guard: 1e4 entries of 10 in half; the squared sum would blow past
  // 65504 without max-scaling
  Vector big(10000, 10.0);
  const double n2 = norm2(big, Precision::Half);
  CHECK(std::isfinite(n2));
  CHECK(n2 == doctest::Approx(1000.0).epsilon(0.02));

  // no spurious overflow: the squared sum is ~2.7e9 but the norm fits
  Vector spread{30000.0, 30000.0, 30000.0};
  const double ns = norm2(spread, Precision::Half);
  CHECK(std::isfinite(ns));
  CHECK(ns == doctest::Approx(30000.0 * std::sqrt(3.0)).epsilon(2e-3));
}

TEST_CASE("rounded kernels stay within elementwise format bounds") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(40), y(40);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const double a = u(rng);
    Vector z = axpy(a, x, y, Precision::Half);
    for (size_t i = 0; i < z.size(); ++i) CHECK(round_to(z[i], Precision::Half) == z[i]);
    const double d = dot(x, y, Precision::Half);
    CHECK(round_to(d, Precision::Half) == d);
  }
}

#include <doctest.h>

#include <qgr/coupling.hpp>
#include <qgr/errors.hpp>

using namespace qgr;

namespace {
Matrix jay(int d) { return Matrix::Constant(d, d, 1.0); }
Matrix eye(int d) { return Matrix::Identity(d, d); }
double diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("delta coupling closed forms") {
  // Kirchhoff d=2 is the swap matrix 2/2 J - I
  Matrix expect(2, 2);
  expect << 0, 1, 1, 0;
  CHECK(diff(coupling_delta(2, 0.0).matrix, expect) < 1e-15);

  CHECK(diff(coupling_delta(3, 0.0).matrix, (2.0 / 3.0) * jay(3) - eye(3)) <
        1e-15);

  Matrix d21 = coupling_delta(2, 1.0).matrix;
  CHECK(diff(d21, (2.0 / cplx(2.0, 1.0)) * jay(2) - eye(2)) < 1e-15);
  CHECK(unitarity_residual(d21) < 1e-12);
}

TEST_CASE("delta coupling rejects bad degree") {
  CHECK_THROWS_AS(coupling_delta(0, 1.0), Error);
}

TEST_CASE("delta-prime coupling closed forms") {
  Matrix expect(2, 2);
  expect << 0, -1, -1, 0;
  CHECK(diff(coupling_delta_prime(2, 0.0).matrix, expect) < 1e-15);

  // d = 2p with p = 2: the balanced anti-Kirchhoff matrix -(1/p) J + I
  CHECK(diff(coupling_delta_prime(4, 0.0).matrix, -0.5 * jay(4) + eye(4)) <
        1e-15);

  CHECK(unitarity_residual(coupling_delta_prime(3, 2.0).matrix) < 1e-12);
}

TEST_CASE("symmetric coupling construction") {
  // aJ + bI with |b| = 1 and the unitarity constraint; Kirchhoff is (2/d, -1)
  auto c = coupling_symmetric(cplx(2.0 / 3.0, 0), cplx(-1, 0), 3);
  CHECK(diff(c.matrix, coupling_delta(3, 0.0).matrix) < 1e-14);
  CHECK_THROWS_AS(coupling_symmetric(cplx(0.3, 0), cplx(-0.5, 0), 3), Error);
}

TEST_CASE("unitary from linear conditions: classical endpoints") {
  Matrix one = Matrix::Identity(1, 1), zero = Matrix::Zero(1, 1);
  CHECK(std::abs(unitary_from_linear_conditions(one, zero).matrix(0, 0) -
                 cplx(-1, 0)) < 1e-14);  // Dirichlet
  CHECK(std::abs(unitary_from_linear_conditions(zero, one).matrix(0, 0) -
                 cplx(1, 0)) < 1e-14);  // Neumann
}

TEST_CASE("unitary from linear conditions: Robin") {
  for (double c : {0.0, 0.5, -1.3, 7.0}) {
    Matrix A = Matrix::Identity(1, 1), B = Matrix::Constant(1, 1, c);
    cplx u = unitary_from_linear_conditions(A, B).matrix(0, 0);
    CHECK(std::abs(u - (-(1.0 - cplx(0, c)) / (1.0 + cplx(0, c)))) < 1e-14);
    CHECK(linear_condition_residual(A, B, coupling_robin(c).matrix) < 1e-12);
  }
  CHECK(std::abs(coupling_robin(0.0).matrix(0, 0) - cplx(-1, 0)) < 1e-14);
}

TEST_CASE("unitary from linear conditions: rejects non-self-adjoint input") {
  // rank-deficient (A|B)
  Matrix A = Matrix::Zero(2, 2), B = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  CHECK_THROWS_AS(unitary_from_linear_conditions(A, B), Error);
  // AB* not Hermitian
  Matrix A2 = Matrix::Identity(2, 2), B2 = Matrix::Zero(2, 2);
  B2(0, 1) = 1.0;
  CHECK_THROWS_AS(unitary_from_linear_conditions(A2, B2), Error);
}

TEST_CASE("unitary from linear conditions: residual property") {
  // Kirchhoff conditions entered by hand reproduce coupling_delta
  for (int d : {2, 3, 5}) {
    Matrix A = Matrix::Zero(d, d), B = Matrix::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) {
      A(i, i) = 1.0;
      A(i, i + 1) = -1.0;
    }
    for (int e = 0; e < d; ++e) B(d - 1, e) = 1.0;
    Matrix U = unitary_from_linear_conditions(A, B).matrix;
    CHECK((U - coupling_delta(d, 0.0).matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(linear_condition_residual(A, B, U) < 1e-12);
  }
}

TEST_CASE("weighted kirchhoff conditions") {
  // unit weights reduce to Kirchhoff
  auto [A, B] = weighted_kirchhoff_conditions({1, 1}, {1});
  Matrix U = unitary_from_linear_conditions(A, B).matrix;
  CHECK(diff(U, coupling_delta(3, 0.0).matrix) < 1e-10);

  // the weighted example (c = 2; external 1, 1): residual check against the
  // rescaled conditions
  auto [A2, B2] = weighted_kirchhoff_conditions({2}, {1, 1});
  Matrix U2 = unitary_from_linear_conditions(A2, B2).matrix;
  CHECK(unitarity_residual(U2) < 1e-12);
  CHECK(linear_condition_residual(A2, B2, U2) < 1e-10);

  // single internal weight, no leads: the derivative sum is one term, so the
  // endpoint is Neumann
  auto [A1, B1] = weighted_kirchhoff_conditions({2.5}, {});
  Matrix U1 = unitary_from_linear_conditions(A1, B1).matrix;
  CHECK(std::abs(U1(0, 0) - cplx(1, 0)) < 1e-12);

  CHECK_THROWS_AS(weighted_kirchhoff_conditions({-1.0}, {1.0}), Error);
  CHECK_THROWS_AS(weighted_kirchhoff_conditions({}, {}), Error);
}

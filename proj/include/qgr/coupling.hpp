// Vertex coupling matrices: named families and the conversion from linear
// boundary conditions A*psi + B*psi' = 0 to the unitary form
// (U-I)*psi + i(U+I)*psi' = 0.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qgr/config.hpp"
#include "qgr/errors.hpp"

namespace qgr {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class CouplingKind {
  kirchhoff,
  anti_kirchhoff,
  delta,
  delta_prime_s,
  robin,
  symmetric,
  general,
  weighted_kirchhoff,
};

inline const char* coupling_kind_name(CouplingKind k) {
  switch (k) {
    case CouplingKind::kirchhoff: return "kirchhoff";
    case CouplingKind::anti_kirchhoff: return "antikirchhoff";
    case CouplingKind::delta: return "delta";
    case CouplingKind::delta_prime_s: return "deltaprime";
    case CouplingKind::robin: return "robin";
    case CouplingKind::symmetric: return "symmetric";
    case CouplingKind::general: return "general";
    case CouplingKind::weighted_kirchhoff: return "weightedkirchhoff";
  }
  return "?";
}

// Reference to one matrix index of a vertex coupling: either an end of an
// internal edge (end 0 = 'a', end 1 = 'b') or a lead (end = -1).
struct EndRef {
  std::string id;
  int end = -1;
  bool is_lead() const { return end < 0; }
  friend bool operator==(const EndRef& x, const EndRef& y) {
    return x.id == y.id && x.end == y.end;
  }
  std::string str() const {
    if (end < 0) return id;
    return id + (end == 0 ? ".a" : ".b");
  }
};

struct CouplingAssignment {
  int degree = 0;
  Matrix matrix;  // degree x degree unitary; empty for weighted_kirchhoff
  CouplingKind kind = CouplingKind::general;
  double param = 0.0;          // alpha / beta / robin c
  cplx sym_a{0, 0}, sym_b{0, 0};  // symmetric kind only
  std::vector<EndRef> order;   // explicit index order; empty = declaration order
};

inline double unitarity_residual(const Matrix& U) {
  if (U.rows() != U.cols()) return 1.0;
  Matrix r = U * U.adjoint() - Matrix::Identity(U.rows(), U.cols());
  return r.cwiseAbs().maxCoeff();
}

inline void require_unitary(const Matrix& U, const Config& cfg,
                            const std::string& where) {
  double res = unitarity_residual(U);
  if (res >= cfg.unitarity_tol)
    throw Error(ErrorCode::not_unitary,
                where + ": matrix is not unitary (residual " +
                    std::to_string(res) + ")");
}

// delta coupling of strength alpha: U = 2/(d+i*alpha) J - I.
// alpha = 0 is Kirchhoff.
inline CouplingAssignment coupling_delta(int degree, double alpha) {
  if (degree < 1)
    throw Error(ErrorCode::invalid_degree, "coupling_delta: degree < 1");
  CouplingAssignment c;
  c.degree = degree;
  c.kind = alpha == 0.0 ? CouplingKind::kirchhoff : CouplingKind::delta;
  c.param = alpha;
  cplx a = 2.0 / (cplx(degree, alpha));
  c.matrix = Matrix::Constant(degree, degree, a) -
             Matrix::Identity(degree, degree);
  c.sym_a = a;
  c.sym_b = -1.0;
  return c;
}

// delta'_s coupling: U = -2/(d-i*beta) J + I. beta = 0 is anti-Kirchhoff.
inline CouplingAssignment coupling_delta_prime(int degree, double beta) {
  if (degree < 1)
    throw Error(ErrorCode::invalid_degree, "coupling_delta_prime: degree < 1");
  CouplingAssignment c;
  c.degree = degree;
  c.kind = beta == 0.0 ? CouplingKind::anti_kirchhoff
                       : CouplingKind::delta_prime_s;
  c.param = beta;
  cplx a = -2.0 / (cplx(degree, -beta));
  c.matrix = Matrix::Constant(degree, degree, a) +
             Matrix::Identity(degree, degree);
  c.sym_a = a;
  c.sym_b = 1.0;
  return c;
}

// Permutation-symmetric coupling U = a J + b I. Requires |b| = 1 and
// |b + a d| = 1 (unitarity of the family).
inline CouplingAssignment coupling_symmetric(cplx a, cplx b, int degree,
                                             const Config& cfg = default_config()) {
  if (degree < 1)
    throw Error(ErrorCode::invalid_degree, "coupling_symmetric: degree < 1");
  if (std::abs(std::abs(b) - 1.0) > cfg.unitarity_tol ||
      std::abs(std::abs(b + a * double(degree)) - 1.0) > cfg.unitarity_tol)
    throw Error(ErrorCode::not_unitary,
                "coupling_symmetric: need |b| = 1 and |b + a d| = 1");
  CouplingAssignment c;
  c.degree = degree;
  c.kind = CouplingKind::symmetric;
  c.sym_a = a;
  c.sym_b = b;
  c.matrix = Matrix::Constant(degree, degree, a) +
             b * Matrix::Identity(degree, degree);
  return c;
}

// Converts boundary conditions A psi + B psi' = 0 into the unitary form.
// Preconditions: (A|B) has full rank d and A B* is self-adjoint.
inline CouplingAssignment unitary_from_linear_conditions(
    const Matrix& A, const Matrix& B, const Config& cfg = default_config()) {
  const int d = static_cast<int>(A.rows());
  if (d < 1 || A.cols() != d || B.rows() != d || B.cols() != d)
    throw Error(ErrorCode::invalid_degree,
                "unitary_from_linear_conditions: A, B must be square d x d");
  Matrix AB(d, 2 * d);
  AB << A, B;
  Eigen::JacobiSVD<Matrix> svd(AB);
  double smax = svd.singularValues()(0);
  if (smax == 0.0 || svd.singularValues()(d - 1) < cfg.self_adjoint_tol * smax)
    throw Error(ErrorCode::not_self_adjoint,
                "unitary_from_linear_conditions: (A|B) is rank deficient");
  Matrix H = A * B.adjoint();
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() >
      cfg.self_adjoint_tol * std::max(1.0, H.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::not_self_adjoint,
                "unitary_from_linear_conditions: A B* is not self-adjoint");
  Matrix S = A + cplx(0, 1) * B;
  Eigen::FullPivLU<Matrix> lu(S);
  if (!lu.isInvertible())
    throw Error(ErrorCode::conversion_failure,
                "unitary_from_linear_conditions: A + iB is singular");
  CouplingAssignment c;
  c.degree = d;
  c.kind = CouplingKind::general;
  c.matrix = -lu.solve(A - cplx(0, 1) * B);
  require_unitary(c.matrix, cfg, "unitary_from_linear_conditions");
  return c;
}

// Robin end condition u + c u' = 0. c = 0 is Dirichlet.
inline CouplingAssignment coupling_robin(double c,
                                         const Config& cfg = default_config()) {
  Matrix A(1, 1), B(1, 1);
  A << 1.0;
  B << c;
  CouplingAssignment r = unitary_from_linear_conditions(A, B, cfg);
  r.kind = CouplingKind::robin;
  r.param = c;
  return r;
}

// The rescaled weighted-Kirchhoff conditions: continuity of f_e / sqrt(c_e)
// across the vertex and sum_e sqrt(c_e) f_e' = 0. Index order: internal
// edges first, then external ones.
inline std::pair<Matrix, Matrix> weighted_kirchhoff_conditions(
    const std::vector<double>& internal_weights,
    const std::vector<double>& external_weights) {
  std::vector<double> w(internal_weights);
  w.insert(w.end(), external_weights.begin(), external_weights.end());
  const int d = static_cast<int>(w.size());
  if (d < 1)
    throw Error(ErrorCode::invalid_degree,
                "weighted_kirchhoff_conditions: degree < 1");
  for (double x : w)
    if (!(x > 0.0))
      throw Error(ErrorCode::invalid_weight,
                  "weighted_kirchhoff_conditions: weights must be positive");
  Matrix A = Matrix::Zero(d, d), B = Matrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    A(i, i) = 1.0 / std::sqrt(w[i]);
    A(i, i + 1) = -1.0 / std::sqrt(w[i + 1]);
  }
  for (int e = 0; e < d; ++e) B(d - 1, e) = std::sqrt(w[e]);
  return {A, B};
}

// Max residual of (U-I)psi + i(U+I)psi' over a basis of the solution space of
// A psi + B psi' = 0 (and conversely). Test helper for the converter.
inline double linear_condition_residual(const Matrix& A, const Matrix& B,
                                        const Matrix& U) {
  const int d = static_cast<int>(A.rows());
  Matrix AB(d, 2 * d);
  AB << A, B;
  Eigen::FullPivLU<Matrix> lu(AB);
  Matrix ker = lu.kernel();  // 2d x d
  Matrix UI = U - Matrix::Identity(d, d);
  Matrix UIp = cplx(0, 1) * (U + Matrix::Identity(d, d));
  double worst = 0.0;
  for (int j = 0; j < ker.cols(); ++j) {
    Vector psi = ker.block(0, j, d, 1);
    Vector dpsi = ker.block(d, j, d, 1);
    double n = std::sqrt(psi.squaredNorm() + dpsi.squaredNorm());
    if (n == 0.0) continue;
    worst = std::max(worst, (UI * psi + UIp * dpsi).norm() / n);
  }
  return worst;
}

}  // namespace qgr

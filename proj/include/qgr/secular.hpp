// The secular function F(k) = det[(U-I)C1(k) + ik(U+I)C2(k)] of the
// one-vertex model, in three forms: the numeric matrix, an overflow-safe
// (log-magnitude, phase) evaluation, and the exact exponential-polynomial
// expansion obtained by a sparse subset-DP determinant.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qgr/exppoly.hpp"
#include "qgr/graph.hpp"

namespace qgr {

// The (2N+M) x (2N+M) matrix of the resonance condition at a given k, in
// canonical (internal-ends-first) ordering.
inline Matrix secular_matrix(const OneVertexModel& m, cplx k) {
  const int n = m.dim();
  Matrix U = m.ordered_U();
  Matrix C1 = Matrix::Zero(n, n), C2 = Matrix::Zero(n, n);
  for (int j = 0; j < m.N; ++j) {
    cplx kl = k * m.lengths[j].to_double();
    cplx s = std::sin(kl), c = std::cos(kl);
    C1(2 * j, 2 * j + 1) = 1.0;
    C1(2 * j + 1, 2 * j) = s;
    C1(2 * j + 1, 2 * j + 1) = c;
    C2(2 * j, 2 * j) = 1.0;
    C2(2 * j + 1, 2 * j) = -c;
    C2(2 * j + 1, 2 * j + 1) = s;
  }
  for (int l = 0; l < m.M; ++l) {
    C1(2 * m.N + l, 2 * m.N + l) = 1.0;
    C2(2 * m.N + l, 2 * m.N + l) = cplx(0, 1);
  }
  Matrix I = Matrix::Identity(n, n);
  return (U - I) * C1 + cplx(0, 1) * k * (U + I) * C2;
}

// Plain determinant of the secular matrix. Overflows for large |Im k| * V;
// use secular_value for contour work.
inline cplx secular_det(const OneVertexModel& m, cplx k) {
  return secular_matrix(m, k).determinant();
}

// Log-magnitude and phase of F(k) via column equilibration + pivoted LU.
// A nonzero constant rescaling of F shifts log_mag uniformly; winding
// computations only consume phase differences.
inline LogVal secular_value_direct(const OneVertexModel& m, cplx k) {
  Matrix A = secular_matrix(m, k);
  const int n = static_cast<int>(A.rows());
  double log_scale = 0.0;
  for (int c = 0; c < n; ++c) {
    double mx = A.col(c).cwiseAbs().maxCoeff();
    if (mx == 0.0) return {};  // exactly singular column
    A.col(c) /= mx;
    log_scale += std::log(mx);
  }
  Eigen::PartialPivLU<Matrix> lu(A);
  LogVal v;
  double lm = log_scale;
  double ph = lu.permutationP().determinant() < 0 ? M_PI : 0.0;
  for (int i = 0; i < n; ++i) {
    cplx d = lu.matrixLU()(i, i);
    if (d == cplx(0, 0)) return {};
    lm += std::log(std::abs(d));
    ph += std::arg(d);
  }
  v.log_mag = lm;
  v.phase = std::remainder(ph, 2 * M_PI);
  return v;
}

// ---------------------------------------------------------------------------
// Symbolic expansion

struct SymbolicSecular {
  ExpPoly f;       // cleaned expansion
  ExpPoly raw;     // before vanishing-threshold cleanup
  bool fragile = false;  // a dropped term was close to the threshold
};

namespace detail {

// One symbolic matrix entry: a short exponential polynomial with linear
// coefficients, kept unpacked for speed.
struct SymEntry {
  ExpPoly poly;
  bool zero = true;
};

// Builds the symbolic entries column by column from the exponential form of
// the secular matrix. For edge j with e± = e^{±ik l_j} and
// A2 = [(U-I)+k(U+I)]/2, B2 = [(U-I)-k(U+I)]/2:
//   col(2j)   = -i e+ A2.col(2j+1) + i e- B2.col(2j+1) + ik (U+I).col(2j)
//   col(2j+1) =    e+ A2.col(2j+1) +   e- B2.col(2j+1) +   (U-I).col(2j)
//   lead col  = (U-I).col - k (U+I).col
inline std::vector<std::vector<SymEntry>> symbolic_entries(
    const OneVertexModel& m) {
  const int n = m.dim();
  Matrix U = m.ordered_U();
  Matrix I = Matrix::Identity(n, n);
  Matrix Um = U - I, Up = U + I;
  std::vector<Rational> basis = m.lengths;

  std::vector<std::vector<SymEntry>> E(n, std::vector<SymEntry>(n));
  auto put = [&](int r, int c, const Rational& sigma, const PolyInK& p) {
    if (p.empty()) return;
    E[r][c].poly = add(E[r][c].poly, ExpPoly::term(sigma, p));
    E[r][c].zero = false;
  };
  const cplx i1(0, 1);
  for (int j = 0; j < m.N; ++j) {
    const Rational& l = m.lengths[j];
    for (int r = 0; r < n; ++r) {
      cplx um = Um(r, 2 * j + 1), up = Up(r, 2 * j + 1);
      // A2/B2 column entries as linear polynomials in k
      PolyInK a2, b2;
      a2.c = {0.5 * um, 0.5 * up};
      b2.c = {0.5 * um, -0.5 * up};
      a2.trim();
      b2.trim();
      put(r, 2 * j, l, -i1 * a2);
      put(r, 2 * j, -l, i1 * b2);
      put(r, 2 * j, Rational(0), PolyInK::monomial(i1 * Up(r, 2 * j), 1));
      put(r, 2 * j + 1, l, a2);
      put(r, 2 * j + 1, -l, b2);
      put(r, 2 * j + 1, Rational(0), PolyInK(Um(r, 2 * j)));
    }
  }
  for (int c = 2 * m.N; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      PolyInK p;
      p.c = {Um(r, c), -Up(r, c)};
      p.trim();
      put(r, c, Rational(0), p);
    }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) E[r][c].poly.basis = basis;
  return E;
}

// Rows grouped by vertex block (frontier of the subset DP stays small for
// graphs whose vertices are declared in a connected order). Returns the row
// order and the parity sign of that permutation.
inline std::pair<std::vector<int>, int> dp_row_order(const OneVertexModel& m) {
  std::vector<int> rows;
  for (std::size_t v = 0; v < m.vertex_blocks.size(); ++v) {
    auto [off, sz] = m.vertex_blocks[v];
    for (int i = 0; i < sz; ++i) rows.push_back(m.to_canonical[off + i]);
  }
  // parity via inversion count
  int inv = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      if (rows[i] > rows[j]) ++inv;
  return {rows, inv % 2 == 0 ? 1 : -1};
}

}  // namespace detail

// Exact expansion of det of the secular matrix as an exponential polynomial.
// Laplace expansion row by row with dynamic programming keyed on the set of
// used columns; structural zeros of the block-diagonal model are pruned, so
// the reachable state space stays small for sparse graphs.
inline SymbolicSecular secular_exppoly(const OneVertexModel& m,
                                       const Config& cfg = default_config()) {
  const int n = m.dim();
  if (n > cfg.symbolic_cap)
    throw Error(ErrorCode::too_large_for_symbolic,
                "secular_exppoly: 2N+M = " + std::to_string(n) +
                    " exceeds the symbolic cap " +
                    std::to_string(cfg.symbolic_cap) +
                    " (use the numeric route or raise the cap)");
  if (!m.lengths_exact)
    throw Error(ErrorCode::irrational_length,
                "secular_exppoly: model lengths are not exact rationals");
  if (n > 62)
    throw Error(ErrorCode::too_large_for_symbolic,
                "secular_exppoly: dimension exceeds 62");

  auto entries = detail::symbolic_entries(m);
  auto [rows, parity] = detail::dp_row_order(m);

  using Mask = std::uint64_t;
  std::unordered_map<Mask, ExpPoly> cur;
  ExpPoly one = ExpPoly::constant(1.0);
  one.basis = m.lengths;
  cur.emplace(0, std::move(one));

  for (int level = 0; level < n; ++level) {
    const int r = rows[level];
    std::unordered_map<Mask, ExpPoly> next;
    next.reserve(cur.size() * 2);
    for (const auto& [mask, val] : cur) {
      for (int c = 0; c < n; ++c) {
        if (mask >> c & 1) continue;
        const auto& e = entries[r][c];
        if (e.zero) continue;
        int sign = __builtin_popcountll(mask >> (c + 1)) & 1 ? -1 : 1;
        ExpPoly term = mul(val, e.poly);
        if (sign < 0)
          for (auto& [s, p] : term.terms) p = cplx(-1, 0) * p;
        Mask nm = mask | (Mask(1) << c);
        auto it = next.find(nm);
        if (it == next.end())
          next.emplace(nm, std::move(term));
        else
          it->second = add(it->second, term);
      }
    }
    cur = std::move(next);
    if (cur.empty()) break;
  }

  SymbolicSecular out;
  Mask full = n == 64 ? ~Mask(0) : (Mask(1) << n) - 1;
  auto it = cur.find(full);
  if (it == cur.end())
    throw Error(ErrorCode::degenerate_secular_function,
                "secular_exppoly: determinant is structurally zero");
  out.raw = it->second;
  if (parity < 0)
    for (auto& [s, p] : out.raw.terms) p = cplx(-1, 0) * p;
  auto cleaned = cleanup(out.raw, cfg);
  out.f = std::move(cleaned.f);
  out.fragile = cleaned.fragile;
  if (out.f.empty())
    throw Error(ErrorCode::degenerate_secular_function,
                "secular_exppoly: determinant vanishes identically");
  return out;
}

// ---------------------------------------------------------------------------
// Unified evaluator used by the contour machinery.

enum class EvalMode { direct, exppoly };

class SecularEvaluator {
 public:
  explicit SecularEvaluator(OneVertexModel model)
      : model_(std::move(model)), mode_(EvalMode::direct) {}

  SecularEvaluator(OneVertexModel model, ExpPoly f)
      : model_(std::move(model)), f_(std::move(f)), mode_(EvalMode::exppoly) {}

  // Picks the exppoly route when the model fits under the symbolic cap (it is
  // far better conditioned deep in the lower half-plane), else direct.
  static SecularEvaluator best(const OneVertexModel& model,
                               const Config& cfg = default_config()) {
    if (model.dim() <= cfg.symbolic_cap && model.lengths_exact) {
      try {
        return SecularEvaluator(model, secular_exppoly(model, cfg).f);
      } catch (const Error&) {
      }
    }
    return SecularEvaluator(model);
  }

  EvalMode mode() const { return mode_; }
  const OneVertexModel& model() const { return model_; }

  LogVal operator()(cplx k) const {
    return mode_ == EvalMode::direct ? secular_value_direct(model_, k)
                                     : evaluate_log(f_, k);
  }

 private:
  OneVertexModel model_;
  ExpPoly f_;
  EvalMode mode_;
};

inline LogVal secular_value(const OneVertexModel& m, cplx k,
                            EvalMode mode = EvalMode::direct,
                            const Config& cfg = default_config()) {
  if (mode == EvalMode::direct) return secular_value_direct(m, k);
  return evaluate_log(secular_exppoly(m, cfg).f, k);
}

}  // namespace qgr

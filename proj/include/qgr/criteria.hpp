// Analytic non-Weyl detection: the energy-dependent effective coupling
// U~(k) = U1 - (1-k) U2 [(1-k)U4 - (k+1)I]^{-1} U3 per vertex, the
// eigenvalue criterion (branch (1-k)/(1+k) or (1+k)/(1-k)), its closed form
// for permutation-symmetric couplings, the weighted balance test, and the
// extreme exponential coefficients.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>

#include "qgr/graph.hpp"
#include "qgr/secular.hpp"

namespace qgr {

class EffectiveCoupling {
 public:
  // U is the (p+q)x(p+q) vertex block in internal-first order.
  EffectiveCoupling(const Matrix& U, int p, int q,
                    const Config& cfg = default_config())
      : p_(p), q_(q), cfg_(cfg) {
    if (U.rows() != p + q || U.cols() != p + q)
      throw Error(ErrorCode::invalid_degree,
                  "EffectiveCoupling: block size mismatch");
    U1_ = U.block(0, 0, p, p);
    U2_ = U.block(0, p, p, q);
    U3_ = U.block(p, 0, q, p);
    U4_ = U.block(p, p, q, q);
  }

  int p() const { return p_; }
  int q() const { return q_; }

  Matrix operator()(cplx k) const {
    if (q_ == 0) return U1_;
    Matrix bracket = (1.0 - k) * U4_ - (k + 1.0) * Matrix::Identity(q_, q_);
    Eigen::JacobiSVD<Matrix> svd(bracket, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smax = svd.singularValues()(0);
    if (smax == 0.0 || svd.singularValues()(q_ - 1) < cfg_.pole_guard * smax)
      throw Error(ErrorCode::pole_proximity,
                  "effective coupling evaluated too close to a pole");
    Matrix inv = svd.solve(Matrix::Identity(q_, q_));
    return U1_ - (1.0 - k) * U2_ * inv * U3_;
  }

 private:
  int p_, q_;
  Matrix U1_, U2_, U3_, U4_;
  Config cfg_;
};

// Closed form for U = a J + b I joining p internal and q > 0 external edges:
// U~(k) = [ab(1-k) - a(1+k)] / [(aq+b)(1-k) - (k+1)] J_p + b I_p.
inline Matrix symmetric_effective_coupling(cplx a, cplx b, int p, int q, cplx k,
                                           const Config& cfg = default_config()) {
  if (q < 1)
    throw Error(ErrorCode::invalid_degree,
                "symmetric_effective_coupling: q = 0 has no lead block; use "
                "the generic route");
  if (p < 1)
    throw Error(ErrorCode::invalid_degree,
                "symmetric_effective_coupling: p < 1");
  cplx den = (a * double(q) + b) * (1.0 - k) - (k + 1.0);
  if (std::abs(den) < cfg.pole_guard)
    throw Error(ErrorCode::pole_proximity,
                "symmetric_effective_coupling: denominator vanishes");
  cplx coeff = (a * b * (1.0 - k) - a * (1.0 + k)) / den;
  return coeff * Matrix::Constant(p, p, 1.0) +
         b * Matrix::Identity(p, p);
}

enum class NonWeylBranch { none, one_minus_over_plus, one_plus_over_minus };

struct VertexClassification {
  std::string vertex;
  bool non_weyl = false;
  NonWeylBranch branch = NonWeylBranch::none;
  std::string method;        // sampled-eigenvalue | symmetric-closed-form | weighted-balance
  double max_residual = 0.0;  // largest |det| seen on the winning branch
};

namespace detail {

inline cplx draw_sample(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, 2.0);
  for (;;) {
    cplx k(re(rng), im(rng));
    if (std::abs(k - 1.0) > 0.15 && std::abs(k + 1.0) > 0.15) return k;
  }
}

}  // namespace detail

// Randomized identity test: does det[U~(k) - branch(k) I] vanish for all k?
// Decided on id_samples pseudo-random points with a fixed seed.
inline VertexClassification vertex_nonweyl_test(const Matrix& U, int p, int q,
                                                const Config& cfg = default_config()) {
  VertexClassification out;
  out.method = "sampled-eigenvalue";
  if (p == 0) return out;  // no internal edges: nothing to shorten
  EffectiveCoupling eff(U, p, q, cfg);
  std::mt19937_64 rng(cfg.seed);

  for (int which = 0; which < 2; ++which) {
    bool all_zero = true;
    double worst = 0.0;
    int used = 0, resamples = 0;
    std::mt19937_64 branch_rng(cfg.seed + which + 1);
    while (used < cfg.id_samples) {
      if (resamples > cfg.max_resamples)
        throw Error(ErrorCode::criterion_inconclusive,
                    "vertex_nonweyl_test: persistent pole proximity");
      cplx k = detail::draw_sample(branch_rng);
      Matrix Ut;
      try {
        Ut = eff(k);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::pole_proximity) {
          ++resamples;
          continue;
        }
        throw;
      }
      cplx branch = which == 0 ? (1.0 - k) / (1.0 + k) : (1.0 + k) / (1.0 - k);
      Matrix D = Ut - branch * Matrix::Identity(p, p);
      double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
      double v = std::abs(D.determinant());
      worst = std::max(worst, v / scale);
      if (v >= cfg.id_zero_rel * scale) {
        all_zero = false;
        break;
      }
      ++used;
    }
    if (all_zero) {
      out.non_weyl = true;
      out.branch = which == 0 ? NonWeylBranch::one_minus_over_plus
                              : NonWeylBranch::one_plus_over_minus;
      out.max_residual = worst;
      return out;
    }
  }
  return out;
}

// Closed-form classification for U = a J + b I: non-Weyl iff p = q and
// (a, b) is (1/p, -1) or (-1/p, 1).
inline VertexClassification classify_symmetric_vertex(cplx a, cplx b, int p,
                                                      int q,
                                                      const Config& cfg = default_config()) {
  VertexClassification out;
  out.method = "symmetric-closed-form";
  if (p != q || p == 0) return out;
  double tol = cfg.unitarity_tol;
  if (std::abs(a - 1.0 / double(p)) < tol && std::abs(b + 1.0) < tol) {
    out.non_weyl = true;
    out.branch = NonWeylBranch::one_minus_over_plus;
  } else if (std::abs(a + 1.0 / double(p)) < tol && std::abs(b - 1.0) < tol) {
    out.non_weyl = true;
    out.branch = NonWeylBranch::one_plus_over_minus;
  }
  return out;
}

// Weighted balance: non-Weyl iff the internal and external weight sums agree.
inline VertexClassification weighted_balance_test(
    const std::vector<double>& internal_weights,
    const std::vector<double>& external_weights,
    const Config& cfg = default_config()) {
  VertexClassification out;
  out.method = "weighted-balance";
  double si = 0, se = 0;
  for (double w : internal_weights) si += w;
  for (double w : external_weights) se += w;
  out.max_residual = std::abs(si - se);
  out.non_weyl = std::abs(si - se) < cfg.unitarity_tol * (si + se);
  if (out.non_weyl) out.branch = NonWeylBranch::one_minus_over_plus;
  return out;
}

inline VertexClassification weighted_balance_test(const MetricGraph& g,
                                                  const std::string& vertex,
                                                  const Config& cfg = default_config()) {
  auto it = g.couplings.find(vertex);
  if (it == g.couplings.end() ||
      it->second.kind != CouplingKind::weighted_kirchhoff)
    throw Error(ErrorCode::unsupported_coupling,
                "weighted_balance_test: vertex " + vertex +
                    " does not carry a weighted-Kirchhoff coupling");
  std::vector<double> wi, we;
  for (const auto& e : g.edges) {
    if (e.a == vertex) wi.push_back(e.weight);
    if (e.b == vertex) wi.push_back(e.weight);
  }
  for (const auto& l : g.leads)
    if (l.vertex == vertex) we.push_back(l.weight);
  auto out = weighted_balance_test(wi, we, cfg);
  out.vertex = vertex;
  return out;
}

// ---------------------------------------------------------------------------
// Extreme coefficients (the e^{±ikV} ends of the expansion)

// Block-diagonal 2N x 2N effective coupling of the whole model at k, in
// canonical internal ordering.
inline Matrix effective_big_coupling(const OneVertexModel& m, cplx k,
                                     const Config& cfg = default_config()) {
  Matrix out = Matrix::Zero(2 * m.N, 2 * m.N);
  for (std::size_t v = 0; v < m.vertex_blocks.size(); ++v) {
    auto b = m.vertex_block(static_cast<int>(v));
    if (b.p == 0) continue;
    EffectiveCoupling eff(b.U, b.p, b.q, cfg);
    Matrix Ut = eff(k);
    for (int i = 0; i < b.p; ++i)
      for (int j = 0; j < b.p; ++j) out(b.canonical[i], b.canonical[j]) = Ut(i, j);
  }
  return out;
}

// Lemma value of the coefficient of e^{±ikV} in the lead-eliminated
// expansion: (i/2)^N det[(U~(k)-I) ± k(U~(k)+I)].
inline std::pair<cplx, double> extreme_coefficient_scaled(
    const OneVertexModel& m, int sign, cplx k,
    const Config& cfg = default_config()) {
  Matrix Ut = effective_big_coupling(m, k, cfg);
  Matrix I = Matrix::Identity(2 * m.N, 2 * m.N);
  Matrix D = (Ut - I) + double(sign) * k * (Ut + I);
  cplx pref = std::pow(cplx(0, 0.5), m.N);
  double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  return {pref * D.determinant(), scale};
}

inline cplx extreme_coefficient(const OneVertexModel& m, int sign, cplx k,
                                const Config& cfg = default_config()) {
  return extreme_coefficient_scaled(m, sign, k, cfg).first;
}

// det[(1-k)U4 - (1+k)I] over the lead block of the full model; the exact
// factor relating the full expansion to the lead-eliminated one.
inline cplx lead_elimination_factor(const OneVertexModel& m, cplx k) {
  if (m.M == 0) return 1.0;
  Matrix U = m.ordered_U();
  Matrix U4 = U.block(2 * m.N, 2 * m.N, m.M, m.M);
  Matrix D = (1.0 - k) * U4 - (k + 1.0) * Matrix::Identity(m.M, m.M);
  return D.determinant();
}

// 8-sample identical-vanishing decision for an extreme coefficient.
inline bool extreme_coefficient_vanishes(const OneVertexModel& m, int sign,
                                         const Config& cfg = default_config()) {
  std::mt19937_64 rng(cfg.seed + (sign > 0 ? 11 : 13));
  int used = 0, resamples = 0;
  while (used < cfg.id_samples) {
    if (resamples > cfg.max_resamples)
      throw Error(ErrorCode::criterion_inconclusive,
                  "extreme_coefficient_vanishes: persistent pole proximity");
    cplx k = detail::draw_sample(rng);
    std::pair<cplx, double> v;
    try {
      v = extreme_coefficient_scaled(m, sign, k, cfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::pole_proximity) {
        ++resamples;
        continue;
      }
      throw;
    }
    if (std::abs(v.first) >= cfg.id_zero_rel * v.second) return false;
    ++used;
  }
  return true;
}

// Per-vertex classification of a whole model via the sampled eigenvalue test.
inline std::vector<VertexClassification> classify_vertices(
    const OneVertexModel& m, const Config& cfg = default_config()) {
  std::vector<VertexClassification> out;
  for (std::size_t v = 0; v < m.vertex_blocks.size(); ++v) {
    auto b = m.vertex_block(static_cast<int>(v));
    auto c = vertex_nonweyl_test(b.U, b.p, b.q, cfg);
    c.vertex = m.vertex_names[v];
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qgr

// Exponential polynomials sum_sigma c_sigma(k) e^{ik sigma} with exact
// rational exponents and polynomial-in-k complex coefficients. This is the
// symbolic form of the secular function; the distance between the extreme
// exponents gives the effective size of the graph.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <vector>

#include "qgr/config.hpp"
#include "qgr/errors.hpp"
#include "qgr/rational.hpp"

namespace qgr {

using cplx = std::complex<double>;

// Polynomial in k, coefficient index = power.
struct PolyInK {
  std::vector<cplx> c;

  PolyInK() = default;
  explicit PolyInK(cplx constant) : c{constant} { trim(); }

  static PolyInK monomial(cplx coeff, int power) {
    PolyInK p;
    p.c.assign(power + 1, cplx(0, 0));
    p.c[power] = coeff;
    p.trim();
    return p;
  }

  bool empty() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }

  double max_norm() const {
    double m = 0;
    for (const auto& x : c) m = std::max(m, std::abs(x));
    return m;
  }

  void trim() {
    while (!c.empty() && c.back() == cplx(0, 0)) c.pop_back();
  }

  cplx eval(cplx k) const {
    cplx r(0, 0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * k + *it;
    return r;
  }

  PolyInK& operator+=(const PolyInK& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), cplx(0, 0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    trim();
    return *this;
  }

  friend PolyInK operator*(const PolyInK& a, const PolyInK& b) {
    PolyInK r;
    if (a.empty() || b.empty()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, cplx(0, 0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
  }

  friend PolyInK operator*(cplx s, const PolyInK& p) {
    PolyInK r = p;
    for (auto& x : r.c) x *= s;
    r.trim();
    return r;
  }
};

struct ExpPoly {
  std::map<Rational, PolyInK> terms;
  // Provenance: the lengths basis the exponents live over (may be empty for
  // ad-hoc values). Ring operations require compatible bases.
  std::vector<Rational> basis;

  static ExpPoly zero() { return {}; }

  static ExpPoly constant(cplx v) {
    ExpPoly f;
    if (v != cplx(0, 0)) f.terms[Rational(0)] = PolyInK(v);
    return f;
  }

  static ExpPoly term(const Rational& sigma, PolyInK p) {
    ExpPoly f;
    p.trim();
    if (!p.empty()) f.terms[sigma] = std::move(p);
    return f;
  }

  bool empty() const { return terms.empty(); }

  double max_norm() const {
    double m = 0;
    for (const auto& [s, p] : terms) m = std::max(m, p.max_norm());
    return m;
  }

  void prune_exact_zeros() {
    for (auto it = terms.begin(); it != terms.end();)
      it = it->second.empty() ? terms.erase(it) : std::next(it);
  }
};

namespace detail {
inline void check_basis(const ExpPoly& a, const ExpPoly& b) {
  if (a.basis.empty() || b.basis.empty()) return;
  if (a.basis != b.basis)
    throw Error(ErrorCode::basis_mismatch,
                "exppoly: operands have incompatible lengths bases");
}
inline std::vector<Rational> merged_basis(const ExpPoly& a, const ExpPoly& b) {
  return a.basis.empty() ? b.basis : a.basis;
}
}  // namespace detail

inline ExpPoly add(const ExpPoly& a, const ExpPoly& b) {
  detail::check_basis(a, b);
  ExpPoly r = a;
  r.basis = detail::merged_basis(a, b);
  for (const auto& [s, p] : b.terms) r.terms[s] += p;
  r.prune_exact_zeros();
  return r;
}

inline ExpPoly mul(const ExpPoly& a, const ExpPoly& b) {
  detail::check_basis(a, b);
  ExpPoly r;
  r.basis = detail::merged_basis(a, b);
  for (const auto& [sa, pa] : a.terms)
    for (const auto& [sb, pb] : b.terms) r.terms[sa + sb] += pa * pb;
  r.prune_exact_zeros();
  return r;
}

inline ExpPoly scale(const ExpPoly& a, const PolyInK& p) {
  ExpPoly r;
  r.basis = a.basis;
  for (const auto& [s, q] : a.terms) {
    PolyInK sp = q * p;
    if (!sp.empty()) r.terms[s] = std::move(sp);
  }
  return r;
}

// Direct evaluation; terms summed in descending magnitude order.
inline cplx evaluate(const ExpPoly& f, cplx k) {
  std::vector<cplx> vals;
  vals.reserve(f.terms.size());
  for (const auto& [s, p] : f.terms)
    vals.push_back(p.eval(k) * std::exp(cplx(0, 1) * k * s.to_double()));
  std::sort(vals.begin(), vals.end(), [](cplx a, cplx b) {
    return std::abs(a) > std::abs(b);
  });
  cplx r(0, 0);
  for (cplx v : vals) r += v;
  return r;
}

// Overflow-safe evaluation: returns log|f(k)| and arg f(k). Terms are scaled
// by the largest term magnitude before summation, so only the relative
// spread of exponents matters.
struct LogVal {
  double log_mag = -std::numeric_limits<double>::infinity();
  double phase = 0.0;
  bool finite() const { return std::isfinite(log_mag); }
};

inline LogVal evaluate_log(const ExpPoly& f, cplx k) {
  if (f.terms.empty()) return {};
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> lp;  // (log-mag, phase) per term
  lp.reserve(f.terms.size());
  for (const auto& [s, p] : f.terms) {
    cplx c = p.eval(k);
    double lm = std::log(std::abs(c)) - k.imag() * s.to_double();
    double ph = std::arg(c) + k.real() * s.to_double();
    lp.emplace_back(lm, ph);
    peak = std::max(peak, lm);
  }
  if (!std::isfinite(peak)) return {};
  cplx sum(0, 0);
  for (auto [lm, ph] : lp) sum += std::polar(std::exp(lm - peak), ph);
  LogVal v;
  if (sum == cplx(0, 0)) return v;
  v.log_mag = peak + std::log(std::abs(sum));
  v.phase = std::arg(sum);
  return v;
}

// (sigma_max - sigma_min) / 2 of a nonempty exponential polynomial.
inline Rational effective_size(const ExpPoly& f) {
  if (f.terms.empty())
    throw Error(ErrorCode::degenerate_secular_function,
                "effective_size: empty exponential polynomial");
  const Rational& lo = f.terms.begin()->first;
  const Rational& hi = f.terms.rbegin()->first;
  return (hi - lo) / Rational(2);
}

// Largest power of k dividing every coefficient (relative threshold applied
// so that float residue in "zero" coefficients does not mask the factor),
// together with the deflated polynomial.
inline std::pair<int, ExpPoly> factor_out_k(const ExpPoly& f,
                                            const Config& cfg = default_config()) {
  if (f.terms.empty())
    throw Error(ErrorCode::degenerate_secular_function,
                "factor_out_k: empty exponential polynomial");
  double thresh = cfg.vanish_rel * f.max_norm();
  int m = std::numeric_limits<int>::max();
  for (const auto& [s, p] : f.terms) {
    int low = -1;
    for (std::size_t i = 0; i < p.c.size(); ++i)
      if (std::abs(p.c[i]) > thresh) { low = static_cast<int>(i); break; }
    if (low < 0) low = p.degree();  // all-noise coefficient; should not happen
    m = std::min(m, low);
  }
  if (m <= 0) return {0, f};
  ExpPoly out;
  out.basis = f.basis;
  for (const auto& [s, p] : f.terms) {
    PolyInK q;
    if (static_cast<int>(p.c.size()) > m)
      q.c.assign(p.c.begin() + m, p.c.end());
    q.trim();
    if (!q.empty()) out.terms[s] = std::move(q);
  }
  return {m, out};
}

// Drops terms whose coefficient max-norm is below vanish_rel times the global
// max. Sets `fragile` when a dropped term came within fragile_factor of the
// threshold (the Weyl/non-Weyl classification is then sensitive to it).
struct CleanupResult {
  ExpPoly f;
  bool fragile = false;
};

inline CleanupResult cleanup(const ExpPoly& f,
                             const Config& cfg = default_config()) {
  CleanupResult r;
  r.f.basis = f.basis;
  double global = f.max_norm();
  double thresh = cfg.vanish_rel * global;
  for (const auto& [s, p] : f.terms) {
    double n = p.max_norm();
    if (n >= thresh) {
      r.f.terms[s] = p;
    } else if (n * cfg.fragile_factor >= thresh) {
      r.fragile = true;
    }
  }
  return r;
}

}  // namespace qgr

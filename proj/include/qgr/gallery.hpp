// Built-in example graphs with closed-form oracles: the one-edge-two-leads
// family with a lead mixer, the loop with two leads, the n-gon with leads at
// every corner, and the weighted one-edge star.
#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qgr/graph.hpp"
#include "qgr/zeros.hpp"

namespace qgr {

struct ExampleSpec {
  std::string name;
  std::map<std::string, std::string> params;
};

// Parses "name" or "name:key=value,key=value".
inline ExampleSpec parse_example(const std::string& s) {
  ExampleSpec spec;
  auto colon = s.find(':');
  spec.name = s.substr(0, colon);
  if (spec.name.empty())
    throw Error(ErrorCode::invalid_example, "empty example name");
  if (colon == std::string::npos) return spec;
  std::string rest = s.substr(colon + 1);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::invalid_example,
                  "malformed example parameter '" + item + "'");
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

namespace detail {

class ParamReader {
 public:
  ParamReader(const ExampleSpec& spec, std::vector<std::string> known)
      : spec_(spec) {
    for (const auto& [k, v] : spec.params)
      if (std::find(known.begin(), known.end(), k) == known.end())
        throw Error(ErrorCode::invalid_example,
                    "example " + spec.name + ": unknown parameter '" + k + "'");
  }

  double real(const std::string& key, double def) const {
    auto it = spec_.params.find(key);
    if (it == spec_.params.end()) return def;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      if (auto r = Rational::parse(it->second)) return r->to_double();
      throw Error(ErrorCode::invalid_example,
                  "example " + spec_.name + ": parameter '" + key +
                      "' is not a number");
    }
  }

  long long integer(const std::string& key, long long def) const {
    double v = real(key, double(def));
    long long n = std::llround(v);
    if (double(n) != v)
      throw Error(ErrorCode::invalid_example,
                  "example " + spec_.name + ": parameter '" + key +
                      "' must be an integer");
    return n;
  }

  Rational rational(const std::string& key, Rational def) const {
    auto it = spec_.params.find(key);
    if (it == spec_.params.end()) return def;
    if (auto r = Rational::parse(it->second)) return *r;
    if (auto r = Rational::from_double(real(key, 0.0))) return *r;
    throw Error(ErrorCode::invalid_example,
                "example " + spec_.name + ": parameter '" + key +
                    "' is not a rational");
  }

 private:
  const ExampleSpec& spec_;
};

// The 2x2 lead mixer of the one-edge-two-leads family.
inline Matrix two_lead_mixer(double r, double p1, double p2, double p3) {
  double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  Matrix W4(2, 2);
  W4 << r * std::polar(1.0, p1), s * std::polar(1.0, p2),
      s * std::polar(1.0, p3), -r * std::polar(1.0, p2 + p3 - p1);
  return W4;
}

inline MetricGraph make_two_leads(const ExampleSpec& spec, double psi, double c,
                                  double r, double p1, double p2, double p3) {
  if (r < 0.0 || r > 1.0)
    throw Error(ErrorCode::invalid_example,
                "example " + spec.name + ": r must lie in [0, 1]");
  MetricGraph g;
  g.name = spec.name;
  g.vertices = {"v0", "v1"};
  g.edges.push_back({"e", "v0", "v1", Rational(1), 1.0});
  g.leads.push_back({"f1", "v0", 1.0});
  g.leads.push_back({"f2", "v0", 1.0});

  Matrix U0 = Matrix::Zero(3, 3);
  U0(0, 1) = 1.0;
  U0(1, 0) = 1.0;
  U0(2, 2) = std::polar(1.0, psi);
  Matrix W = Matrix::Identity(3, 3);
  W.block(1, 1, 2, 2) = two_lead_mixer(r, p1, p2, p3);
  CouplingAssignment junction;
  junction.degree = 3;
  junction.kind = CouplingKind::general;
  junction.matrix = W.adjoint() * U0 * W;
  g.couplings["v0"] = junction;
  g.couplings["v1"] = coupling_robin(c);
  return g;
}

}  // namespace detail

// Builds the named example graph. Lengths default to 1 where not a declared
// parameter.
inline MetricGraph make_example(const ExampleSpec& spec,
                                const Config& cfg = default_config()) {
  if (spec.name == "es-two-leads") {
    detail::ParamReader p(spec, {"psi", "c", "r", "phi1", "phi2", "phi3"});
    return detail::make_two_leads(spec, p.real("psi", 0.0), p.real("c", 0.0),
                                  p.real("r", 1.0), p.real("phi1", 0.0),
                                  p.real("phi2", 0.0), p.real("phi3", 0.0));
  }
  if (spec.name == "solomyak-family") {
    // The no-resonance subfamily: Dirichlet on the decoupled channel and at
    // the far end, mixer parameters free.
    detail::ParamReader p(spec, {"r", "phi1", "phi2", "phi3"});
    return detail::make_two_leads(spec, M_PI, 0.0,
                                  p.real("r", 1.0 / std::sqrt(2.0)),
                                  p.real("phi1", 0.0), p.real("phi2", 0.0),
                                  p.real("phi3", 0.0));
  }
  if (spec.name == "loop-two-leads") {
    detail::ParamReader p(spec, {"alpha", "beta", "l"});
    double alpha = p.real("alpha", 0.0), beta = p.real("beta", 1.0);
    Rational l = p.rational("l", Rational(1));
    if (!(l > Rational(0)))
      throw Error(ErrorCode::invalid_example, "loop-two-leads: l must be positive");
    MetricGraph g;
    g.name = spec.name;
    g.vertices = {"v0"};
    g.edges.push_back({"e", "v0", "v0", l, 1.0});
    g.leads.push_back({"f1", "v0", 1.0});
    g.leads.push_back({"f2", "v0", 1.0});
    // order (u(0), u(l), f1, f2), derivatives outward:
    //   u(0) = f1(0),  u(l) = f2(0),
    //   alpha u(0) = u'(0) + f1'(0) + beta (-u'(l) + f2'(0)),
    //   alpha u(l) = beta (u'(0) + f1'(0)) - u'(l) + f2'(0).
    Matrix A = Matrix::Zero(4, 4), B = Matrix::Zero(4, 4);
    A(0, 0) = 1.0; A(0, 2) = -1.0;
    A(1, 1) = 1.0; A(1, 3) = -1.0;
    if (alpha == 0.0 && (beta == 1.0 || beta == -1.0)) {
      // The written conditions are rank deficient here (the two derivative
      // rows coincide). Take the alpha -> 0 limit instead: the row sum gives
      // u(0) -+ u(l) = 0 and the difference gives D1 - beta D2 = 0 with
      // D1 = u'(0) + f1'(0), D2 = -u'(l) + f2'(0).
      A(2, 0) = 1.0; A(2, 1) = -beta;
      B(3, 0) = -1.0; B(3, 1) = -beta; B(3, 2) = -1.0; B(3, 3) = -beta;
    } else {
      A(2, 0) = alpha;
      B(2, 0) = -1.0; B(2, 1) = -beta; B(2, 2) = -1.0; B(2, 3) = -beta;
      A(3, 1) = alpha;
      B(3, 0) = -beta; B(3, 1) = -1.0; B(3, 2) = -beta; B(3, 3) = -1.0;
    }
    g.couplings["v0"] = unitary_from_linear_conditions(A, B, cfg);
    return g;
  }
  if (spec.name == "polygon") {
    detail::ParamReader p(spec, {"n", "ell"});
    long long n = p.integer("n", 4);
    Rational ell = p.rational("ell", Rational(1));
    if (n < 3)
      throw Error(ErrorCode::invalid_example, "polygon: n must be at least 3");
    if (!(ell > Rational(0)))
      throw Error(ErrorCode::invalid_example, "polygon: ell must be positive");
    MetricGraph g;
    g.name = spec.name;
    for (long long i = 0; i < n; ++i)
      g.vertices.push_back("v" + std::to_string(i));
    for (long long i = 0; i < n; ++i)
      g.edges.push_back({"e" + std::to_string(i), g.vertices[i],
                         g.vertices[(i + 1) % n], ell, 1.0});
    for (long long i = 0; i < n; ++i) {
      g.leads.push_back({"fa" + std::to_string(i), g.vertices[i], 1.0});
      g.leads.push_back({"fb" + std::to_string(i), g.vertices[i], 1.0});
      g.couplings[g.vertices[i]] = coupling_delta(4, 0.0);
    }
    return g;
  }
  if (spec.name == "weighted-one-edge") {
    detail::ParamReader p(spec, {"c", "c1", "c2", "l"});
    double c = p.real("c", 2.0), c1 = p.real("c1", 1.0), c2 = p.real("c2", 1.0);
    Rational l = p.rational("l", Rational(1));
    if (!(c > 0.0 && c1 > 0.0 && c2 > 0.0))
      throw Error(ErrorCode::invalid_example,
                  "weighted-one-edge: weights must be positive");
    if (!(l > Rational(0)))
      throw Error(ErrorCode::invalid_example,
                  "weighted-one-edge: l must be positive");
    MetricGraph g;
    g.name = spec.name;
    g.vertices = {"v0", "v1"};
    g.edges.push_back({"e", "v0", "v1", l, c});
    g.leads.push_back({"f1", "v0", c1});
    g.leads.push_back({"f2", "v0", c2});
    CouplingAssignment junction;
    junction.degree = 3;
    junction.kind = CouplingKind::weighted_kirchhoff;
    g.couplings["v0"] = junction;
    g.couplings["v1"] = coupling_robin(0.0);
    return g;
  }
  throw Error(ErrorCode::invalid_example, "unknown example '" + spec.name + "'");
}

inline MetricGraph make_example(const std::string& s,
                                const Config& cfg = default_config()) {
  return make_example(parse_example(s), cfg);
}

// ---------------------------------------------------------------------------
// Closed-form oracles

// Literal resonance condition of the loop with two leads:
//   16 [ -a^2 sin kl + 2ka(b + i sin kl - cos kl)
//        - 2k^2 (sin kl + i cos kl)(b^2 - 1) ] / [ 4(b^2-1) + a(a-4i) ].
// The written form is 0/0 at (a, b) = (0, +-1); callers must use the
// determinant route there.
inline cplx oracle_loop_condition(double alpha, double beta, double l, cplx k) {
  cplx den = 4.0 * (beta * beta - 1.0) + alpha * (alpha - cplx(0, 4));
  if (std::abs(den) <= 1e-12)
    throw Error(ErrorCode::degenerate_normalization,
                "oracle_loop_condition: normalization vanishes at this "
                "(alpha, beta)");
  cplx kl = k * l;
  cplx s = std::sin(kl), c = std::cos(kl);
  cplx num = -alpha * alpha * s +
             2.0 * k * alpha * (beta + cplx(0, 1) * s - c) -
             2.0 * k * k * (s + cplx(0, 1) * c) * (beta * beta - 1.0);
  return 16.0 * num / den;
}

// All closed-form resonances of the n-gon with two leads per corner inside
// the given box: union over the n-th roots of unity omega = e^{i theta},
// omega^2 != -1, of k = (i Log(cos theta) + 2 pi m) / ell. Channels theta and
// -theta coincide, which doubles the multiplicity.
inline std::vector<ZeroRecord> oracle_polygon_resonances(long long n,
                                                         double ell,
                                                         const Box& region) {
  if (n < 3)
    throw Error(ErrorCode::invalid_example,
                "oracle_polygon_resonances: n must be at least 3");
  std::vector<ZeroRecord> raw;
  for (long long j = 0; j < n; ++j) {
    double theta = 2 * M_PI * double(j) / double(n);
    double ct = std::cos(theta);
    if (std::abs(ct) < 1e-14) continue;  // omega^2 = -1: empty channel
    double im = std::log(std::abs(ct)) / ell;
    double shift = ct < 0 ? -M_PI / ell : 0.0;
    if (im < region.im_min - 1e-9 || im > region.im_max + 1e-9) continue;
    long long m_lo = (long long)std::floor((region.re_min - shift) * ell / (2 * M_PI)) - 1;
    long long m_hi = (long long)std::ceil((region.re_max - shift) * ell / (2 * M_PI)) + 1;
    for (long long m = m_lo; m <= m_hi; ++m) {
      double re = 2 * M_PI * double(m) / ell + shift;
      if (re < region.re_min - 1e-9 || re > region.re_max + 1e-9) continue;
      ZeroRecord z;
      z.k = cplx(re, im);
      raw.push_back(z);
    }
  }
  // merge coinciding channels into multiplicities
  std::sort(raw.begin(), raw.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
    return a.k.imag() < b.k.imag();
  });
  std::vector<ZeroRecord> out;
  for (const auto& z : raw) {
    if (!out.empty() && std::abs(out.back().k - z.k) < 1e-10)
      out.back().multiplicity += 1;
    else
      out.push_back(z);
  }
  return out;
}

// Every example the gallery exports, at its default parameters plus the
// variations the test suite leans on.
inline std::vector<ExampleSpec> gallery_specs() {
  std::vector<std::string> names = {
      "es-two-leads",
      "es-two-leads:psi=3.141592653589793,c=0,r=0.7071067811865476",
      "es-two-leads:psi=1.2,c=0.5,r=0.6,phi1=0.3,phi2=1.1,phi3=-0.4",
      "solomyak-family",
      "loop-two-leads",
      "loop-two-leads:alpha=1,beta=1",
      "loop-two-leads:alpha=0.5,beta=2,l=3/2",
      "loop-two-leads:alpha=1,beta=0",
      "polygon:n=3,ell=1",
      "polygon:n=4,ell=1",
      "polygon:n=5,ell=1/2",
      "weighted-one-edge",
      "weighted-one-edge:c=1,c1=1,c2=1",
      "weighted-one-edge:c=3/2,c1=1/2,c2=1,l=2",
  };
  std::vector<ExampleSpec> out;
  for (const auto& s : names) out.push_back(parse_example(s));
  return out;
}

}  // namespace qgr

// Orchestrates the classification routes for one graph and renders the
// result. Verdicts always name the routes that produced them; route
// disagreements are reported, never reconciled.
#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qgr/criteria.hpp"
#include "qgr/gallery.hpp"

namespace qgr {

struct AnalysisReport {
  std::string name;
  int N = 0, M = 0;
  Rational V{0};          // size of the (rescaled) model the routes ran on
  bool weighted = false;
  bool lengths_exact = true;

  std::vector<VertexClassification> vertices;
  bool vertex_route_nonweyl = false;

  bool symbolic_ran = false;
  bool fragile = false;
  std::optional<Rational> W_exact;
  int k_factor = 0;       // multiplicity of the zero at k = 0

  std::optional<double> W_est;  // counting-slope estimate (numeric route)
  std::optional<double> W_half_width;

  bool nonweyl = false;
  bool routes_agree = true;
  std::vector<std::string> notes;
};

// Runs the per-vertex eigenvalue criterion always, the symbolic expansion
// when the model fits under the cap, and optionally the counting-slope
// estimate when it does not.
inline AnalysisReport analyze(const MetricGraph& g,
                              const Config& cfg = default_config(),
                              bool numeric_fallback = false) {
  AnalysisReport r;
  r.name = g.name;
  OneVertexModel m = flatten(g, cfg);
  r.N = m.N;
  r.M = m.M;
  r.V = m.size();
  r.weighted = g.weighted();
  r.lengths_exact = m.lengths_exact;

  r.vertices = classify_vertices(m, cfg);
  for (const auto& v : r.vertices) r.vertex_route_nonweyl |= v.non_weyl;

  if (m.dim() <= cfg.symbolic_cap && m.lengths_exact) {
    try {
      auto sym = secular_exppoly(m, cfg);
      r.symbolic_ran = true;
      r.fragile = sym.fragile;
      if (r.fragile)
        r.notes.push_back(
            "symbolic cleanup dropped a term close to the vanishing "
            "threshold; the exact effective size may be fragile");
      auto [mk, deflated] = factor_out_k(sym.f, cfg);
      r.k_factor = mk;
      r.W_exact = effective_size(sym.f);
    } catch (const Error& e) {
      r.notes.push_back(std::string("symbolic route failed: ") + e.what());
    }
  }
  if (!r.symbolic_ran && numeric_fallback) {
    double lmin = m.lengths.empty() ? 1.0 : m.lengths[0].to_double();
    for (const auto& l : m.lengths) lmin = std::min(lmin, l.to_double());
    double rmax = std::min(80.0, 40.0 / std::max(lmin, 1e-3));
    std::vector<double> radii;
    for (int i = 1; i <= 8; ++i) radii.push_back(rmax * i / 8.0);
    try {
      auto t = counting_function(SecularEvaluator::best(m, cfg), radii, cfg);
      if (!t.partial || t.samples.size() >= 4) {
        r.W_est = t.w_est;
        r.W_half_width = t.half_width;
      }
    } catch (const Error& e) {
      r.notes.push_back(std::string("counting route failed: ") + e.what());
    }
  }

  if (r.W_exact) {
    bool sym_nonweyl = *r.W_exact < r.V;
    r.nonweyl = sym_nonweyl;
    if (sym_nonweyl != r.vertex_route_nonweyl) {
      r.routes_agree = false;
      r.notes.push_back(
          "route disagreement: symbolic effective size says " +
          std::string(sym_nonweyl ? "non-Weyl" : "Weyl") +
          ", per-vertex criterion says " +
          std::string(r.vertex_route_nonweyl ? "non-Weyl" : "Weyl"));
    }
  } else {
    r.nonweyl = r.vertex_route_nonweyl;
  }
  return r;
}

inline std::string format_report(const AnalysisReport& r) {
  std::ostringstream out;
  out << "graph " << (r.name.empty() ? "(unnamed)" : r.name) << ": N=" << r.N
      << " M=" << r.M << " V=" << r.V.str();
  if (r.weighted) out << " (weighted; rescaled lengths)";
  out << "\n";
  for (const auto& v : r.vertices) {
    out << "  vertex " << v.vertex << ": "
        << (v.non_weyl ? "non-Weyl" : "Weyl") << " [" << v.method << "]";
    if (v.branch == NonWeylBranch::one_minus_over_plus)
      out << " eigenvalue (1-k)/(1+k)";
    else if (v.branch == NonWeylBranch::one_plus_over_minus)
      out << " eigenvalue (1+k)/(1-k)";
    out << "\n";
  }
  if (r.W_exact) {
    out << "  effective size W = " << r.W_exact->str() << " (exact, symbolic route)";
    if (r.k_factor > 0) out << ", zero of order " << r.k_factor << " at k=0";
    out << "\n";
  } else if (r.W_est) {
    out << "  effective size W ~= " << *r.W_est << " +- "
        << (r.W_half_width ? *r.W_half_width : 0.0)
        << " (counting-slope estimate)\n";
  } else {
    out << "  effective size: not computed (symbolic route unavailable)\n";
  }
  out << "  verdict: " << (r.nonweyl ? "non-Weyl" : "Weyl") << " [";
  if (r.W_exact)
    out << "symbolic effective size" << (r.routes_agree ? " + " : " vs ")
        << "per-vertex criterion";
  else
    out << "per-vertex criterion";
  out << "]\n";
  for (const auto& n : r.notes) out << "  note: " << n << "\n";
  return out.str();
}

}  // namespace qgr

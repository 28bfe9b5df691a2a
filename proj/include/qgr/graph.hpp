// Metric graphs with general unitary vertex couplings, and the flattening of
// any such graph to the one-vertex model (single block-diagonal unitary over
// all 2N+M edge ends).
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgr/coupling.hpp"
#include "qgr/rational.hpp"

namespace qgr {

struct InternalEdge {
  std::string id;
  std::string a, b;   // endpoint vertices
  Rational length{1};
  double weight = 1.0;
};

struct Lead {
  std::string id;
  std::string vertex;
  double weight = 1.0;
};

struct MetricGraph {
  std::string name;
  std::vector<std::string> vertices;
  std::vector<InternalEdge> edges;
  std::vector<Lead> leads;
  std::map<std::string, CouplingAssignment> couplings;
  // False when edge lengths were obtained by approximate rescaling of
  // irrational weights; the symbolic engine refuses such graphs.
  bool lengths_exact = true;

  bool has_vertex(const std::string& v) const {
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
  }

  int degree(const std::string& v) const {
    int d = 0;
    for (const auto& e : edges) {
      if (e.a == v) ++d;
      if (e.b == v) ++d;
    }
    for (const auto& l : leads)
      if (l.vertex == v) ++d;
    return d;
  }

  bool weighted() const {
    for (const auto& e : edges)
      if (e.weight != 1.0) return true;
    for (const auto& l : leads)
      if (l.weight != 1.0) return true;
    return false;
  }

  Rational size() const {
    Rational v{0};
    for (const auto& e : edges) v += e.length;
    return v;
  }

  // Size of the weighted graph, sum l_j / c_j. Exact when every internal
  // weight is (numerically) rational; throws otherwise.
  Rational weighted_size() const {
    Rational v{0};
    for (const auto& e : edges) {
      auto c = Rational::from_double(e.weight);
      if (!c)
        throw Error(ErrorCode::irrational_length,
                    "weighted_size: weight of edge " + e.id +
                        " is not rational");
      v += e.length / *c;
    }
    return v;
  }

  void validate(const Config& cfg = default_config()) const;
};

// ---------------------------------------------------------------------------
// One-vertex model

// Identifies what a model slot (matrix index of big_U) refers to.
struct SlotRef {
  int vertex = -1;     // index into MetricGraph::vertices
  bool lead = false;
  int item = -1;       // edge index or lead index
  int end = 0;         // 0/1 for edges
};

struct OneVertexModel {
  int N = 0, M = 0;
  // Block-diagonal (2N+M)^2 unitary; one block per vertex, indices in the
  // vertex's declared edge-end order.
  Matrix big_U;
  std::vector<Rational> lengths;  // per internal edge
  bool lengths_exact = true;
  std::vector<SlotRef> index_map;     // block slot -> referent
  std::vector<int> to_canonical;      // block slot -> canonical slot
  std::vector<std::pair<int, int>> vertex_blocks;  // (offset, size) per vertex
  std::vector<std::string> vertex_names;

  int dim() const { return 2 * N + M; }

  Rational size() const {
    Rational v{0};
    for (const auto& l : lengths) v += l;
    return v;
  }

  // big_U conjugated into canonical ordering: internal edge ends first
  // (slot 2j = edge j end a, slot 2j+1 = end b), then leads. An exact
  // similarity by a permutation matrix, so zero sets are unaffected.
  Matrix ordered_U() const {
    const int n = dim();
    Matrix U = Matrix::Zero(n, n);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        U(to_canonical[s], to_canonical[t]) = big_U(s, t);
    return U;
  }

  // Per-vertex block permuted to internal-first order, with its (p, q) split
  // and the canonical slots of the internal positions.
  struct VertexBlock {
    Matrix U;                    // internal-first
    int p = 0, q = 0;
    std::vector<int> canonical;  // canonical slot per block position (size p+q)
  };

  VertexBlock vertex_block(int v) const {
    auto [off, sz] = vertex_blocks.at(v);
    std::vector<int> internal, external;
    for (int i = 0; i < sz; ++i)
      (index_map[off + i].lead ? external : internal).push_back(off + i);
    VertexBlock b;
    b.p = static_cast<int>(internal.size());
    b.q = static_cast<int>(external.size());
    std::vector<int> order = internal;
    order.insert(order.end(), external.begin(), external.end());
    b.U.resize(sz, sz);
    b.canonical.resize(sz);
    for (int i = 0; i < sz; ++i) {
      b.canonical[i] = to_canonical[order[i]];
      for (int j = 0; j < sz; ++j) b.U(i, j) = big_U(order[i], order[j]);
    }
    return b;
  }
};

inline void MetricGraph::validate(const Config& cfg) const {
  for (const auto& e : edges) {
    if (!has_vertex(e.a) || !has_vertex(e.b))
      throw Error(ErrorCode::invalid_graph,
                  "edge " + e.id + " references an unknown vertex");
    if (!(e.length > Rational(0)))
      throw Error(ErrorCode::invalid_graph,
                  "edge " + e.id + " has nonpositive length");
    if (!(e.weight > 0.0))
      throw Error(ErrorCode::invalid_weight,
                  "edge " + e.id + " has nonpositive weight");
  }
  for (const auto& l : leads) {
    if (!has_vertex(l.vertex))
      throw Error(ErrorCode::invalid_graph,
                  "lead " + l.id + " references an unknown vertex");
    if (!(l.weight > 0.0))
      throw Error(ErrorCode::invalid_weight,
                  "lead " + l.id + " has nonpositive weight");
  }
  for (const auto& v : vertices) {
    auto it = couplings.find(v);
    if (it == couplings.end())
      throw Error(ErrorCode::invalid_graph,
                  "vertex " + v + " has no coupling assignment");
    const auto& c = it->second;
    int d = degree(v);
    if (c.degree != d)
      throw Error(ErrorCode::invalid_graph,
                  "vertex " + v + ": coupling dimension " +
                      std::to_string(c.degree) + " != degree " +
                      std::to_string(d));
    if (c.kind != CouplingKind::weighted_kirchhoff)
      require_unitary(c.matrix, cfg, "vertex " + v);
  }
  for (const auto& [v, c] : couplings)
    if (!has_vertex(v))
      throw Error(ErrorCode::invalid_graph,
                  "coupling assigned to unknown vertex " + v);
}

namespace detail {

// Incident ends of a vertex in declaration order, internal ends first.
inline std::vector<EndRef> default_end_order(const MetricGraph& g,
                                             const std::string& v) {
  std::vector<EndRef> order;
  for (const auto& e : g.edges) {
    if (e.a == v) order.push_back({e.id, 0});
    if (e.b == v) order.push_back({e.id, 1});
  }
  for (const auto& l : g.leads)
    if (l.vertex == v) order.push_back({l.id, -1});
  return order;
}

inline std::vector<EndRef> end_order(const MetricGraph& g,
                                     const std::string& v,
                                     const CouplingAssignment& c) {
  auto def = default_end_order(g, v);
  if (c.order.empty()) return def;
  if (c.order.size() != def.size())
    throw Error(ErrorCode::invalid_graph,
                "vertex " + v + ": explicit order has wrong length");
  for (const auto& r : def)
    if (std::count(c.order.begin(), c.order.end(), r) != 1)
      throw Error(ErrorCode::invalid_graph,
                  "vertex " + v + ": explicit order must list " + r.str() +
                      " exactly once");
  return c.order;
}

// Effective coupling matrix of a weighted-Kirchhoff vertex in the rescaled
// representation used by flatten below (phi_e = sqrt(c_e) psi_e on length
// l_e / c_e): continuity of phi_e / sqrt(c_e) and sum_e sqrt(c_e) dphi_e = 0.
// The plain value-preserving form {continuity, sum_e c_e dpsi_e = 0} is not
// self-adjoint for the unweighted operator, so it admits no unitary U; the
// rescaling has the identical zero set and does.
inline Matrix weighted_vertex_unitary(const std::vector<double>& w,
                                      const Config& cfg) {
  auto [A, B] = weighted_kirchhoff_conditions(w, {});
  return unitary_from_linear_conditions(A, B, cfg).matrix;
}

}  // namespace detail

// Flattens a graph to the one-vertex model. For weighted graphs this uses the
// sqrt-weight rescaled representation: edge lengths become l_j / c_j,
// weighted-Kirchhoff vertices get the conditions {phi_e / sqrt(c_e)
// continuous, sum_e sqrt(c_e) dphi_e = 0}, and a degree-1 Robin parameter c
// becomes c / c_edge. Resonances agree with the weighted operator.
inline OneVertexModel flatten(const MetricGraph& g,
                              const Config& cfg = default_config()) {
  g.validate(cfg);
  const bool weighted = g.weighted();
  OneVertexModel m;
  m.N = static_cast<int>(g.edges.size());
  m.M = static_cast<int>(g.leads.size());
  m.lengths_exact = g.lengths_exact;
  for (const auto& e : g.edges) {
    if (!weighted || e.weight == 1.0) {
      m.lengths.push_back(e.length);
    } else {
      auto c = Rational::from_double(e.weight);
      if (c) {
        m.lengths.push_back(e.length / *c);
      } else {
        auto approx = Rational::from_double(e.weight, 1000000000LL, 1e-9);
        if (!approx)
          throw Error(ErrorCode::invalid_weight,
                      "flatten: cannot rescale weight of edge " + e.id);
        m.lengths.push_back(e.length / *approx);
        m.lengths_exact = false;
      }
    }
  }

  const int n = m.dim();
  m.big_U = Matrix::Zero(n, n);
  m.index_map.resize(n);
  m.to_canonical.resize(n);
  int offset = 0;
  for (int vi = 0; vi < static_cast<int>(g.vertices.size()); ++vi) {
    const std::string& v = g.vertices[vi];
    const auto& c = g.couplings.at(v);
    auto order = detail::end_order(g, v, c);
    const int d = static_cast<int>(order.size());

    Matrix block;
    if (c.kind == CouplingKind::weighted_kirchhoff) {
      std::vector<double> w;
      for (const auto& r : order) {
        if (r.is_lead()) {
          auto it = std::find_if(g.leads.begin(), g.leads.end(),
                                 [&](const Lead& l) { return l.id == r.id; });
          w.push_back(it->weight);
        } else {
          auto it = std::find_if(g.edges.begin(), g.edges.end(),
                                 [&](const InternalEdge& e) { return e.id == r.id; });
          w.push_back(it->weight);
        }
      }
      block = detail::weighted_vertex_unitary(w, cfg);
    } else if (weighted && c.kind == CouplingKind::robin && d == 1) {
      double w;
      if (order[0].is_lead()) {
        auto it = std::find_if(g.leads.begin(), g.leads.end(),
                               [&](const Lead& l) { return l.id == order[0].id; });
        w = it->weight;
      } else {
        auto it = std::find_if(g.edges.begin(), g.edges.end(),
                               [&](const InternalEdge& e) { return e.id == order[0].id; });
        w = it->weight;
      }
      block = w == 1.0 ? c.matrix : coupling_robin(c.param / w, cfg).matrix;
    } else if (weighted) {
      // Only weighted-Kirchhoff (and degree-1 Robin ends) make sense on a
      // weighted graph; anything else would need a coupling theory the
      // weights do not define.
      bool touches_weighted = false;
      for (const auto& r : order) {
        if (r.is_lead()) {
          auto it = std::find_if(g.leads.begin(), g.leads.end(),
                                 [&](const Lead& l) { return l.id == r.id; });
          touches_weighted |= it->weight != 1.0;
        } else {
          auto it = std::find_if(g.edges.begin(), g.edges.end(),
                                 [&](const InternalEdge& e) { return e.id == r.id; });
          touches_weighted |= it->weight != 1.0;
        }
      }
      if (touches_weighted)
        throw Error(ErrorCode::unsupported_coupling,
                    "flatten: vertex " + v +
                        " has a general coupling on weighted edges");
      block = c.matrix;
    } else {
      block = c.matrix;
    }

    m.vertex_blocks.push_back({offset, d});
    m.vertex_names.push_back(v);
    for (int i = 0; i < d; ++i) {
      const EndRef& r = order[i];
      SlotRef s;
      s.vertex = vi;
      if (r.is_lead()) {
        int li = static_cast<int>(
            std::find_if(g.leads.begin(), g.leads.end(),
                         [&](const Lead& l) { return l.id == r.id; }) -
            g.leads.begin());
        s.lead = true;
        s.item = li;
        m.to_canonical[offset + i] = 2 * m.N + li;
      } else {
        int ei = static_cast<int>(
            std::find_if(g.edges.begin(), g.edges.end(),
                         [&](const InternalEdge& e) { return e.id == r.id; }) -
            g.edges.begin());
        s.lead = false;
        s.item = ei;
        s.end = r.end;
        m.to_canonical[offset + i] = 2 * ei + r.end;
      }
      m.index_map[offset + i] = s;
      for (int j = 0; j < d; ++j) m.big_U(offset + i, offset + j) = block(i, j);
    }
    offset += d;
  }
  require_unitary(m.big_U, cfg, "flatten");
  return m;
}

// Conjugates one vertex block by W = diag(e^{i phi} I_p, W4); by construction
// this leaves the family of resonances invariant.
inline OneVertexModel apply_lead_mixing(const OneVertexModel& model, int vertex,
                                        double phi, const Matrix& W4,
                                        const Config& cfg = default_config()) {
  if (vertex < 0 || vertex >= static_cast<int>(model.vertex_blocks.size()))
    throw Error(ErrorCode::invalid_mixer, "apply_lead_mixing: no such vertex");
  auto [off, sz] = model.vertex_blocks[vertex];
  int q = 0;
  for (int i = 0; i < sz; ++i)
    if (model.index_map[off + i].lead) ++q;
  if (W4.rows() != q || W4.cols() != q)
    throw Error(ErrorCode::invalid_mixer,
                "apply_lead_mixing: mixer dimension " +
                    std::to_string(W4.rows()) + " != lead count " +
                    std::to_string(q));
  if (q > 0) require_unitary(W4, cfg, "apply_lead_mixing");

  Matrix W = Matrix::Zero(sz, sz);
  std::vector<int> lead_pos;
  for (int i = 0; i < sz; ++i) {
    if (model.index_map[off + i].lead)
      lead_pos.push_back(i);
    else
      W(i, i) = std::polar(1.0, phi);
  }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) W(lead_pos[i], lead_pos[j]) = W4(i, j);

  OneVertexModel out = model;
  out.big_U.block(off, off, sz, sz) =
      W.adjoint() * model.big_U.block(off, off, sz, sz) * W;
  return out;
}

// Swaps which end of an internal edge is x = 0. Zero sets of the secular
// function are invariant under this relabeling.
inline OneVertexModel flip_edge_orientation(const OneVertexModel& model,
                                            int edge) {
  OneVertexModel out = model;
  for (int s = 0; s < model.dim(); ++s) {
    const SlotRef& r = model.index_map[s];
    if (!r.lead && r.item == edge) {
      out.index_map[s].end = 1 - r.end;
      out.to_canonical[s] = 2 * edge + (1 - r.end);
    }
  }
  return out;
}

// Lemma-style rescaling to an unweighted graph: lengths become l_j / c_j,
// weighted-Kirchhoff vertices get the sqrt-weight conditions, all weights 1.
inline MetricGraph scale_to_unweighted(const MetricGraph& g,
                                       const Config& cfg = default_config()) {
  g.validate(cfg);
  MetricGraph out = g;
  for (auto& e : out.edges) {
    auto c = Rational::from_double(e.weight);
    if (!c) {
      auto approx = Rational::from_double(e.weight, 1000000000LL, 1e-9);
      if (!approx)
        throw Error(ErrorCode::invalid_weight,
                    "scale_to_unweighted: cannot rescale edge " + e.id);
      c = approx;
      out.lengths_exact = false;
    }
    e.length = e.length / *c;
  }
  for (const auto& v : g.vertices) {
    const auto& c = g.couplings.at(v);
    if (c.kind == CouplingKind::weighted_kirchhoff) {
      auto order = detail::end_order(g, v, c);
      std::vector<double> wi, we;
      std::vector<EndRef> internal, external;
      for (const auto& r : order) {
        if (r.is_lead()) {
          auto it = std::find_if(g.leads.begin(), g.leads.end(),
                                 [&](const Lead& l) { return l.id == r.id; });
          we.push_back(it->weight);
          external.push_back(r);
        } else {
          auto it = std::find_if(g.edges.begin(), g.edges.end(),
                                 [&](const InternalEdge& e) { return e.id == r.id; });
          wi.push_back(it->weight);
          internal.push_back(r);
        }
      }
      auto [A, B] = weighted_kirchhoff_conditions(wi, we);
      CouplingAssignment nc = unitary_from_linear_conditions(A, B, cfg);
      nc.order = internal;
      nc.order.insert(nc.order.end(), external.begin(), external.end());
      out.couplings[v] = nc;
    } else if (c.kind == CouplingKind::robin && c.degree == 1) {
      auto order = detail::end_order(g, v, c);
      double w;
      if (order[0].is_lead()) {
        auto it = std::find_if(g.leads.begin(), g.leads.end(),
                               [&](const Lead& l) { return l.id == order[0].id; });
        w = it->weight;
      } else {
        auto it = std::find_if(g.edges.begin(), g.edges.end(),
                               [&](const InternalEdge& e) { return e.id == order[0].id; });
        w = it->weight;
      }
      if (w != 1.0) out.couplings[v] = coupling_robin(c.param / w, cfg);
    } else if (g.weighted()) {
      auto order = detail::end_order(g, v, c);
      for (const auto& r : order) {
        double w = 1.0;
        if (r.is_lead()) {
          auto it = std::find_if(g.leads.begin(), g.leads.end(),
                                 [&](const Lead& l) { return l.id == r.id; });
          w = it->weight;
        } else {
          auto it = std::find_if(g.edges.begin(), g.edges.end(),
                                 [&](const InternalEdge& e) { return e.id == r.id; });
          w = it->weight;
        }
        if (w != 1.0)
          throw Error(ErrorCode::unsupported_coupling,
                      "scale_to_unweighted: vertex " + v +
                          " has a general coupling on weighted edges");
      }
    }
  }
  for (auto& e : out.edges) e.weight = 1.0;
  for (auto& l : out.leads) l.weight = 1.0;
  return out;
}

}  // namespace qgr

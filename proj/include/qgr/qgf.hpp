// The QGF graph description format: a line-oriented text form of MetricGraph.
//
//   graph <name>
//   vertex <id>
//   edge <id> <v> <v> length <int|p/q> [weight <float>]
//   lead <id> <v> [weight <float>]
//   couple <v> kirchhoff | antikirchhoff | delta <f> | deltaprime <f>
//            | robin <f> | symmetric <re>,<im> <re>,<im> | weightedkirchhoff
//            | unitary <d> <d*d complex entries row-major> [order <end-refs>]
//
// `#` starts a comment. Complex literals are a+bi / a-bi; an end-ref is
// edgeId.a, edgeId.b, or a lead id.
#pragma once

#include <cctype>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "qgr/graph.hpp"

namespace qgr {

namespace detail {

struct Token {
  std::string text;
  int line, col;
};

inline std::vector<std::vector<Token>> tokenize_qgf(const std::string& text) {
  std::vector<std::vector<Token>> lines;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      toks.push_back({line.substr(i, j - i), ln, static_cast<int>(i + 1)});
      i = j;
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

inline double parse_real_tok(const Token& t) {
  try {
    std::size_t pos = 0;
    double v = std::stod(t.text, &pos);
    if (pos == t.text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(t.line, t.col, "expected a number, got '" + t.text + "'");
}

inline cplx parse_complex_tok(const Token& t) {
  const std::string& s = t.text;
  auto fail = [&]() -> cplx {
    throw ParseError(t.line, t.col, "malformed complex literal '" + s + "'");
  };
  auto to_d = [&](const std::string& x) {
    if (x.empty() || x == "+") return 1.0;
    if (x == "-") return -1.0;
    try {
      std::size_t pos = 0;
      double v = std::stod(x, &pos);
      if (pos == x.size()) return v;
    } catch (const std::exception&) {
    }
    return fail().real();
  };
  if (s.empty()) return fail();
  if (s.back() != 'i') {
    std::string x = s;
    try {
      std::size_t pos = 0;
      double v = std::stod(x, &pos);
      if (pos == x.size()) return {v, 0.0};
    } catch (const std::exception&) {
    }
    return fail();
  }
  std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign and not leading
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') &&
        body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_d(body)};
  return {to_d(body.substr(0, split)), to_d(body.substr(split))};
}

inline EndRef parse_end_ref(const Token& t, const MetricGraph& g) {
  const std::string& s = t.text;
  auto dot = s.rfind('.');
  if (dot != std::string::npos &&
      (s.substr(dot) == ".a" || s.substr(dot) == ".b")) {
    std::string id = s.substr(0, dot);
    for (const auto& e : g.edges)
      if (e.id == id) return {id, s.back() == 'a' ? 0 : 1};
    throw ParseError(t.line, t.col, "unknown edge '" + id + "'");
  }
  for (const auto& l : g.leads)
    if (l.id == s) return {s, -1};
  throw ParseError(t.line, t.col, "unknown end reference '" + s + "'");
}

}  // namespace detail

// Parses QGF text into a validated MetricGraph. All failures, including model
// errors raised while building coupling matrices, carry a source position.
inline MetricGraph parse_qgf(const std::string& text,
                             const Config& cfg = default_config()) {
  using detail::Token;
  MetricGraph g;
  struct PendingCouple {
    std::vector<Token> toks;  // tokens from <v> on
  };
  std::vector<PendingCouple> pending;

  auto lines = detail::tokenize_qgf(text);
  for (const auto& toks : lines) {
    const Token& head = toks[0];
    auto need = [&](std::size_t n, const char* what) {
      if (toks.size() < n)
        throw ParseError(head.line, head.col,
                         std::string(head.text) + ": missing " + what);
    };
    if (head.text == "graph") {
      need(2, "name");
      g.name = toks[1].text;
    } else if (head.text == "vertex") {
      need(2, "vertex id");
      if (g.has_vertex(toks[1].text))
        throw ParseError(toks[1].line, toks[1].col,
                         "duplicate vertex '" + toks[1].text + "'");
      g.vertices.push_back(toks[1].text);
    } else if (head.text == "edge") {
      need(6, "arguments (id v v length <value>)");
      if (toks[4].text != "length")
        throw ParseError(toks[4].line, toks[4].col, "expected 'length'");
      InternalEdge e;
      e.id = toks[1].text;
      e.a = toks[2].text;
      e.b = toks[3].text;
      if (!g.has_vertex(e.a))
        throw ParseError(toks[2].line, toks[2].col, "unknown vertex '" + e.a + "'");
      if (!g.has_vertex(e.b))
        throw ParseError(toks[3].line, toks[3].col, "unknown vertex '" + e.b + "'");
      auto len = Rational::parse(toks[5].text);
      if (!len || !(*len > Rational(0)))
        throw ParseError(toks[5].line, toks[5].col,
                         "length must be a positive integer or p/q");
      e.length = *len;
      if (toks.size() > 6) {
        if (toks[6].text != "weight" || toks.size() < 8)
          throw ParseError(toks[6].line, toks[6].col, "expected 'weight <value>'");
        e.weight = detail::parse_real_tok(toks[7]);
        if (toks.size() > 8)
          throw ParseError(toks[8].line, toks[8].col, "trailing tokens");
      }
      g.edges.push_back(e);
    } else if (head.text == "lead") {
      need(3, "arguments (id v)");
      Lead l;
      l.id = toks[1].text;
      l.vertex = toks[2].text;
      if (!g.has_vertex(l.vertex))
        throw ParseError(toks[2].line, toks[2].col,
                         "unknown vertex '" + l.vertex + "'");
      if (toks.size() > 3) {
        if (toks[3].text != "weight" || toks.size() < 5)
          throw ParseError(toks[3].line, toks[3].col, "expected 'weight <value>'");
        l.weight = detail::parse_real_tok(toks[4]);
        if (toks.size() > 5)
          throw ParseError(toks[5].line, toks[5].col, "trailing tokens");
      }
      g.leads.push_back(l);
    } else if (head.text == "couple") {
      need(3, "arguments (v kind ...)");
      // degrees are only known once the whole file is read
      pending.push_back({std::vector<Token>(toks.begin() + 1, toks.end())});
    } else {
      throw ParseError(head.line, head.col,
                       "unknown directive '" + head.text + "'");
    }
  }

  for (const auto& pc : pending) {
    const auto& t = pc.toks;
    const Token& vt = t[0];
    if (!g.has_vertex(vt.text))
      throw ParseError(vt.line, vt.col, "unknown vertex '" + vt.text + "'");
    int deg = g.degree(vt.text);
    const Token& kt = t[1];
    auto model_wrap = [&](auto&& fn) -> CouplingAssignment {
      try {
        return fn();
      } catch (const Error& e) {
        throw ParseError(kt.line, kt.col, e.what());
      }
    };
    CouplingAssignment c;
    std::size_t used = 2;
    if (kt.text == "kirchhoff") {
      c = model_wrap([&] { return coupling_delta(deg, 0.0); });
    } else if (kt.text == "antikirchhoff") {
      c = model_wrap([&] { return coupling_delta_prime(deg, 0.0); });
    } else if (kt.text == "delta" || kt.text == "deltaprime" ||
               kt.text == "robin") {
      if (t.size() < 3)
        throw ParseError(kt.line, kt.col, kt.text + ": missing parameter");
      double p = detail::parse_real_tok(t[2]);
      used = 3;
      c = model_wrap([&]() -> CouplingAssignment {
        if (kt.text == "delta") return coupling_delta(deg, p);
        if (kt.text == "deltaprime") return coupling_delta_prime(deg, p);
        return coupling_robin(p, cfg);
      });
      if (kt.text == "robin" && deg != 1)
        throw ParseError(kt.line, kt.col,
                         "robin applies to degree-1 vertices only");
    } else if (kt.text == "symmetric") {
      if (t.size() < 4)
        throw ParseError(kt.line, kt.col, "symmetric: need two <re>,<im> pairs");
      auto pair = [&](const Token& tok) -> cplx {
        auto comma = tok.text.find(',');
        if (comma == std::string::npos)
          throw ParseError(tok.line, tok.col, "expected <re>,<im>");
        Token re{tok.text.substr(0, comma), tok.line, tok.col};
        Token im{tok.text.substr(comma + 1), tok.line,
                 tok.col + static_cast<int>(comma) + 1};
        return {detail::parse_real_tok(re), detail::parse_real_tok(im)};
      };
      cplx a = pair(t[2]), b = pair(t[3]);
      used = 4;
      c = model_wrap([&] { return coupling_symmetric(a, b, deg, cfg); });
    } else if (kt.text == "weightedkirchhoff") {
      c.degree = deg;
      c.kind = CouplingKind::weighted_kirchhoff;
    } else if (kt.text == "unitary") {
      if (t.size() < 3)
        throw ParseError(kt.line, kt.col, "unitary: missing dimension");
      double dd = detail::parse_real_tok(t[2]);
      int d = static_cast<int>(dd);
      if (d < 1 || double(d) != dd)
        throw ParseError(t[2].line, t[2].col, "unitary: bad dimension");
      if (d != deg)
        throw ParseError(t[2].line, t[2].col,
                         "unitary: dimension " + std::to_string(d) +
                             " != vertex degree " + std::to_string(deg));
      if (t.size() < 3 + std::size_t(d) * d)
        throw ParseError(kt.line, kt.col,
                         "unitary: expected " + std::to_string(d * d) +
                             " entries");
      c.degree = d;
      c.kind = CouplingKind::general;
      c.matrix.resize(d, d);
      for (int i = 0; i < d * d; ++i)
        c.matrix(i / d, i % d) = detail::parse_complex_tok(t[3 + i]);
      model_wrap([&] {
        require_unitary(c.matrix, cfg, "couple " + vt.text);
        return c;
      });
      used = 3 + std::size_t(d) * d;
    } else {
      throw ParseError(kt.line, kt.col,
                       "unknown coupling kind '" + kt.text + "'");
    }
    if (used < t.size()) {
      if (t[used].text != "order")
        throw ParseError(t[used].line, t[used].col, "trailing tokens");
      for (std::size_t i = used + 1; i < t.size(); ++i)
        c.order.push_back(detail::parse_end_ref(t[i], g));
      if (static_cast<int>(c.order.size()) != deg)
        throw ParseError(t[used].line, t[used].col,
                         "order must list all " + std::to_string(deg) +
                             " ends");
    }
    g.couplings[vt.text] = c;
  }

  try {
    g.validate(cfg);
  } catch (const Error& e) {
    throw ParseError(0, 0, e.what());
  }
  return g;
}

namespace detail {

inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_complex(cplx v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

}  // namespace detail

// Prints a MetricGraph back to QGF. parse_qgf(print_qgf(g)) reproduces the
// structural content of g.
inline std::string print_qgf(const MetricGraph& g) {
  std::ostringstream out;
  out << "graph " << (g.name.empty() ? "g" : g.name) << "\n";
  for (const auto& v : g.vertices) out << "vertex " << v << "\n";
  for (const auto& e : g.edges) {
    out << "edge " << e.id << " " << e.a << " " << e.b << " length "
        << e.length.str();
    if (e.weight != 1.0) out << " weight " << detail::fmt_real(e.weight);
    out << "\n";
  }
  for (const auto& l : g.leads) {
    out << "lead " << l.id << " " << l.vertex;
    if (l.weight != 1.0) out << " weight " << detail::fmt_real(l.weight);
    out << "\n";
  }
  for (const auto& v : g.vertices) {
    auto it = g.couplings.find(v);
    if (it == g.couplings.end()) continue;
    const auto& c = it->second;
    out << "couple " << v << " ";
    switch (c.kind) {
      case CouplingKind::kirchhoff: out << "kirchhoff"; break;
      case CouplingKind::anti_kirchhoff: out << "antikirchhoff"; break;
      case CouplingKind::delta:
        out << "delta " << detail::fmt_real(c.param);
        break;
      case CouplingKind::delta_prime_s:
        out << "deltaprime " << detail::fmt_real(c.param);
        break;
      case CouplingKind::robin:
        out << "robin " << detail::fmt_real(c.param);
        break;
      case CouplingKind::symmetric:
        out << "symmetric " << detail::fmt_real(c.sym_a.real()) << ","
            << detail::fmt_real(c.sym_a.imag()) << " "
            << detail::fmt_real(c.sym_b.real()) << ","
            << detail::fmt_real(c.sym_b.imag());
        break;
      case CouplingKind::weighted_kirchhoff: out << "weightedkirchhoff"; break;
      case CouplingKind::general: {
        out << "unitary " << c.degree;
        for (int i = 0; i < c.degree; ++i)
          for (int j = 0; j < c.degree; ++j)
            out << " " << detail::fmt_complex(c.matrix(i, j));
        break;
      }
    }
    if (!c.order.empty()) {
      out << " order";
      for (const auto& r : c.order) out << " " << r.str();
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace qgr

#include <doctest.h>

#include <qgr/qgr.hpp>

using namespace qgr;

namespace {

const char* kLoopFile = R"(# loop with two leads
graph loop
vertex v0
edge e v0 v0 length 1
lead f1 v0
lead f2 v0
couple v0 kirchhoff
)";

bool same_structure(const MetricGraph& a, const MetricGraph& b) {
  if (a.name != b.name || a.vertices != b.vertices) return false;
  if (a.edges.size() != b.edges.size() || a.leads.size() != b.leads.size())
    return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const auto &x = a.edges[i], &y = b.edges[i];
    if (x.id != y.id || x.a != y.a || x.b != y.b || x.length != y.length ||
        x.weight != y.weight)
      return false;
  }
  for (std::size_t i = 0; i < a.leads.size(); ++i) {
    const auto &x = a.leads[i], &y = b.leads[i];
    if (x.id != y.id || x.vertex != y.vertex || x.weight != y.weight)
      return false;
  }
  if (a.couplings.size() != b.couplings.size()) return false;
  for (const auto& [v, ca] : a.couplings) {
    auto it = b.couplings.find(v);
    if (it == b.couplings.end()) return false;
    const auto& cb = it->second;
    if (ca.kind != cb.kind || ca.degree != cb.degree) return false;
    if (ca.kind != CouplingKind::weighted_kirchhoff &&
        (ca.matrix - cb.matrix).cwiseAbs().maxCoeff() > 1e-12)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse_qgf: loop file") {
  auto g = parse_qgf(kLoopFile);
  CHECK(g.name == "loop");
  auto m = flatten(g);
  CHECK(m.N == 1);
  CHECK(m.M == 2);
  CHECK((g.couplings.at("v0").matrix - coupling_delta(4, 0.0).matrix)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("parse_qgf: delta on a degree-3 vertex") {
  auto g = parse_qgf(
      "graph star\nvertex c\nvertex x\nedge e c x length 1\n"
      "lead f1 c\nlead f2 c\ncouple c delta 0.5\ncouple x robin 0\n");
  CHECK(g.couplings.at("c").matrix.rows() == 3);
  CHECK((g.couplings.at("c").matrix - coupling_delta(3, 0.5).matrix)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("parse_qgf: rational lengths are exact") {
  auto g = parse_qgf(
      "graph r\nvertex a\nvertex b\nedge e a b length 1/3\n"
      "couple a robin 0\ncouple b robin 0\n");
  CHECK(g.edges[0].length == Rational(1, 3));
  CHECK(g.lengths_exact);
}

TEST_CASE("parse_qgf: explicit unitary with order") {
  auto g = parse_qgf(
      "graph u\nvertex a\nvertex b\nedge e a b length 1\nlead f a\n"
      "couple a unitary 2 0+0i 1+0i 1+0i 0+0i order f e.a\n"
      "couple b robin 0\n");
  const auto& c = g.couplings.at("a");
  CHECK(c.degree == 2);
  REQUIRE(c.order.size() == 2);
  CHECK(c.order[0].is_lead());
  CHECK_FALSE(c.order[1].is_lead());
}

TEST_CASE("parse_qgf: errors carry positions") {
  auto expect_error = [](const std::string& text, int line) {
    try {
      parse_qgf(text);
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() >= 1);
    }
  };
  expect_error("frobnicate x\n", 1);
  expect_error("graph g\nvertex a\nedge e a nowhere length 1\n", 3);
  expect_error("graph g\nvertex a\nvertex b\nedge e a b length 0\n", 4);
  expect_error("graph g\nvertex a\nvertex b\nedge e a b length 1\n"
               "couple a unitary 1 2+0i\ncouple b robin 0\n",
               5);  // non-unitary matrix
  expect_error("graph g\nvertex a\nlead f a\ncouple a robin 0x\n", 4);
}

TEST_CASE("parse_qgf: missing coupling is rejected") {
  CHECK_THROWS_AS(parse_qgf("graph g\nvertex a\nlead f a\n"), ParseError);
}

TEST_CASE("round-trip identity on the gallery") {
  for (const auto& spec : gallery_specs()) {
    auto g = make_example(spec);
    auto printed = print_qgf(g);
    auto back = parse_qgf(printed);
    CAPTURE(printed);
    CHECK(same_structure(g, back));
    CHECK(print_qgf(back) == printed);  // fixed point after one round
    // and the two parses agree where it matters: the model
    auto m1 = flatten(g);
    auto m2 = flatten(back);
    CHECK(m1.dim() == m2.dim());
    CHECK((m1.big_U - m2.big_U).cwiseAbs().maxCoeff() < 1e-12);
  }
}

#include <doctest.h>

#include <qgr/qgr.hpp>

using namespace qgr;

TEST_CASE("example spec parsing") {
  auto s = parse_example("polygon:n=5,ell=1/2");
  CHECK(s.name == "polygon");
  CHECK(s.params.at("n") == "5");
  CHECK(s.params.at("ell") == "1/2");
  CHECK(parse_example("loop-two-leads").params.empty());
  CHECK_THROWS_AS(parse_example(""), Error);
  CHECK_THROWS_AS(parse_example("polygon:n5"), Error);
  CHECK_THROWS_AS(make_example("no-such-example"), Error);
  CHECK_THROWS_AS(make_example("polygon:n=2"), Error);
  CHECK_THROWS_AS(make_example("polygon:n=4,bogus=1"), Error);
}

TEST_CASE("every gallery spec builds a valid model") {
  for (const auto& spec : gallery_specs()) {
    auto g = make_example(spec);
    auto m = flatten(g);
    CHECK(m.dim() == 2 * m.N + m.M);
    CHECK(unitarity_residual(m.big_U) < 1e-9);
  }
}

TEST_CASE("non-Weyl loop is a balanced Kirchhoff vertex") {
  auto g = make_example("loop-two-leads:alpha=0,beta=1,l=1");
  auto m = flatten(g);
  CHECK(m.N == 1);
  CHECK(m.M == 2);
  auto b = m.vertex_block(0);
  CHECK(b.p == 2);
  CHECK(b.q == 2);
  CHECK(vertex_nonweyl_test(b.U, b.p, b.q).non_weyl);
}

TEST_CASE("square with leads: every vertex balanced") {
  auto m = flatten(make_example("polygon:n=4,ell=1"));
  CHECK(m.N == 4);
  CHECK(m.M == 8);
  for (const auto& c : classify_vertices(m)) CHECK(c.non_weyl);
}

TEST_CASE("loop oracle: direct substitution value") {
  cplx v = oracle_loop_condition(0.0, 0.0, 1.0, cplx(1, 0));
  cplx expect = -8.0 * (std::sin(1.0) + cplx(0, 1) * std::cos(1.0));
  CHECK(std::abs(v - expect) < 1e-13);
}

TEST_CASE("loop oracle: degenerate normalization is refused") {
  CHECK_THROWS_AS(oracle_loop_condition(0.0, 1.0, 1.0, cplx(1, 0)), Error);
  CHECK_THROWS_AS(oracle_loop_condition(0.0, -1.0, 1.0, cplx(1, 0)), Error);
}

TEST_CASE("loop oracle zeros coincide with located zeros") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  auto sym = secular_exppoly(m);
  auto [mk, f] = factor_out_k(sym.f);
  auto res = locate_zeros(SecularEvaluator(m, f), Box{-0.5, 9.0, -3.0, 0.3},
                          1e-10);
  REQUIRE(res.complete);
  REQUIRE(!res.zeros.empty());
  for (const auto& z : res.zeros)
    CHECK(std::abs(oracle_loop_condition(1.0, 1.0, 1.0, z.k)) < 1e-6);
}

TEST_CASE("polygon oracle: square channels") {
  // n = 4: the omega = +-i channels are empty and |cos theta| = 1 elsewhere,
  // so every resonance is real and the effective size drops to (n-2) ell / 2
  auto zs = oracle_polygon_resonances(4, 1.0, Box{-0.5, 30.0, -5.0, 0.5});
  CHECK(!zs.empty());
  for (const auto& z : zs) CHECK(z.k.imag() == 0.0);
  Config cfg;
  cfg.symbolic_cap = 32;
  auto sym = secular_exppoly(flatten(make_example("polygon:n=4,ell=1")), cfg);
  CHECK(effective_size(sym.f) == Rational(1));
}

TEST_CASE("polygon oracle agrees with located zeros (n=3)") {
  auto m = flatten(make_example("polygon:n=3,ell=1"));
  Config cfg;
  cfg.symbolic_cap = 32;
  auto sym = secular_exppoly(m, cfg);
  auto [mk, f] = factor_out_k(sym.f, cfg);
  Box box{0.3, 12.0, -3.0, 0.3};
  auto located = locate_zeros(SecularEvaluator(m, f), box, 1e-8, cfg);
  REQUIRE(located.complete);
  auto oracle = oracle_polygon_resonances(3, 1.0, box);
  REQUIRE(!oracle.empty());
  // same zeros with the same multiplicities, to 1e-6
  int located_total = 0, oracle_total = 0;
  for (const auto& z : located.zeros) located_total += z.multiplicity;
  for (const auto& z : oracle) oracle_total += z.multiplicity;
  CHECK(located_total == oracle_total);
  for (const auto& o : oracle) {
    bool matched = false;
    for (const auto& z : located.zeros)
      matched |= std::abs(z.k - o.k) < 1e-6 && z.multiplicity == o.multiplicity;
    CHECK(matched);
  }
  // n=3: W = n ell / 2
  CHECK(effective_size(sym.f) == Rational(3, 2));
}

TEST_CASE("polygon channels near a right angle escape downward") {
  // as the channel angle theta approaches pi/2 the resonances run to -i inf
  double prev = 0.0;
  for (long long n : {8, 16, 32, 64}) {
    auto zs = oracle_polygon_resonances(n, 1.0, Box{0.0, 10.0, -50.0, 0.5});
    REQUIRE(!zs.empty());
    double deepest = 0.0;
    for (const auto& z : zs) deepest = std::min(deepest, z.k.imag());
    CHECK(deepest < prev);
    prev = deepest;
  }
}

TEST_CASE("loop classification grid") {
  for (double a : {0.0, 0.5, 1.0})
    for (double b : {0.0, 0.5, 1.0, -1.0, 2.0}) {
      ExampleSpec s;
      s.name = "loop-two-leads";
      s.params["alpha"] = std::to_string(a);
      s.params["beta"] = std::to_string(b);
      auto m = flatten(make_example(s));
      auto W = effective_size(secular_exppoly(m).f);
      if (a == 0.0 && (b == 1.0 || b == -1.0))
        CHECK(W == Rational(1, 2));
      else if (a == 0.0)
        CHECK(W == Rational(0));
      else
        CHECK(W == Rational(1));
      bool vert = false;
      for (const auto& c : classify_vertices(m)) vert |= c.non_weyl;
      CHECK(vert == (a == 0.0));
    }
}

TEST_CASE("weighted example verdict flips exactly at the balance point") {
  for (double c : {1.9, 2.0, 2.1}) {
    ExampleSpec s;
    s.name = "weighted-one-edge";
    s.params["c"] = std::to_string(c);
    auto m = flatten(make_example(s));
    auto W = effective_size(secular_exppoly(m).f);
    CHECK((W < m.size()) == (c == 2.0));
  }
}

#include <doctest.h>

#include <qgr/qgr.hpp>

using namespace qgr;

namespace {

MetricGraph dirichlet_edge(const Rational& l) {
  MetricGraph g;
  g.name = "dirichlet-edge";
  g.vertices = {"a", "b"};
  g.edges.push_back({"e", "a", "b", l, 1.0});
  g.couplings["a"] = coupling_robin(0.0);
  g.couplings["b"] = coupling_robin(0.0);
  return g;
}

cplx global_ratio(const std::function<cplx(cplx)>& f,
                  const std::function<cplx(cplx)>& g, cplx k0) {
  return f(k0) / g(k0);
}

}  // namespace

TEST_CASE("secular matrix shape and k=0 sanity") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  Matrix S = secular_matrix(m, cplx(0.7, -0.2));
  CHECK(S.rows() == 4);
  CHECK(S.cols() == 4);
  LogVal v = secular_value_direct(m, cplx(0, 0));
  // at k = 0 the value is either finite or an exact on-zero signal
  CHECK((v.finite() || v.log_mag == -std::numeric_limits<double>::infinity()));
  CHECK_FALSE(std::isnan(v.phase));
}

TEST_CASE("dirichlet edge: expansion is the sine") {
  auto m = flatten(dirichlet_edge(Rational(1)));
  auto sym = secular_exppoly(m);
  // proportional to e^{ikl} - e^{-ikl}
  REQUIRE(sym.f.terms.size() == 2);
  CHECK(sym.f.terms.begin()->first == Rational(-1));
  CHECK(sym.f.terms.rbegin()->first == Rational(1));
  cplx c_hi = sym.f.terms.rbegin()->second.eval(cplx(1, 1));
  cplx c_lo = sym.f.terms.begin()->second.eval(cplx(1, 1));
  CHECK(std::abs(c_hi + c_lo) < 1e-12 * std::abs(c_hi));
  // zeros at n pi: the value vanishes there and only there on [0.1, 10]
  for (int n = 1; n <= 3; ++n)
    CHECK(std::abs(evaluate(sym.f, cplx(n * M_PI, 0))) < 1e-12);
  CHECK(std::abs(evaluate(sym.f, cplx(1.0, 0))) > 1e-3);
  // cross-check against the numeric determinant up to one global constant
  auto F = [&](cplx k) { return evaluate(sym.f, k); };
  auto D = [&](cplx k) { return secular_det(m, k); };
  cplx r = global_ratio(F, D, cplx(0.9, -0.4));
  for (cplx k : {cplx(1.7, 0.0), cplx(2.2, -1.0), cplx(-0.6, -0.3)})
    CHECK(std::abs(F(k) - r * D(k)) < 1e-10 * std::abs(F(k)));
}

TEST_CASE("direct evaluation phase tracks the sine closed form") {
  Rational l(355, 113);
  auto m = flatten(dirichlet_edge(l));
  double ll = l.to_double();
  // constant offset fixed at a reference point
  cplx kref(0.5, -0.1);
  LogVal vref = secular_value_direct(m, kref);
  double off = vref.phase - std::arg(std::sin(ll * kref));
  for (int i = 0; i < 10; ++i) {
    cplx k(0.3 + 0.37 * i, -0.05 * i);
    LogVal v = secular_value_direct(m, k);
    REQUIRE(v.finite());
    double d = std::remainder(v.phase - std::arg(std::sin(ll * k)) - off,
                              2 * M_PI);
    CHECK(std::abs(d) < 1e-8);
  }
}

TEST_CASE("loop with decoupled leads has zero effective size") {
  auto m = flatten(make_example("loop-two-leads:alpha=0,beta=0"));
  auto sym = secular_exppoly(m);
  REQUIRE(sym.f.terms.size() == 1);
  CHECK(effective_size(sym.f) == Rational(0));
}

TEST_CASE("loop expansion matches the written resonance condition") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {1.0, 1.0}, {0.5, 2.0}, {2.0, 0.0}, {0.0, 0.5}}) {
    ExampleSpec s;
    s.name = "loop-two-leads";
    s.params["alpha"] = std::to_string(a);
    s.params["beta"] = std::to_string(b);
    auto m = flatten(make_example(s));
    auto sym = secular_exppoly(m);
    auto F = [&](cplx k) { return evaluate(sym.f, k); };
    auto G = [&](cplx k) { return oracle_loop_condition(a, b, 1.0, k); };
    cplx r = global_ratio(F, G, cplx(0.83, -0.41));
    for (int i = 0; i < 10; ++i) {
      cplx k(0.25 + 0.4 * i, -0.1 - 0.07 * i);
      CHECK(std::abs(F(k) - r * G(k)) < 1e-8 * std::abs(F(k)));
    }
  }
}

TEST_CASE("symbolic and direct evaluation agree") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  auto sym = secular_exppoly(m);
  cplx k(2, 1);
  cplx fs = evaluate(sym.f, k);
  cplx fd = secular_det(m, k);
  CHECK(std::abs(fs - fd) < 1e-8 * std::abs(fd));
}

TEST_CASE("symbolic cap is enforced") {
  auto m = flatten(make_example("polygon:n=5,ell=1"));  // 2N+M = 20 > 18
  CHECK_THROWS_AS(secular_exppoly(m), Error);
  Config cfg;
  cfg.symbolic_cap = 24;
  CHECK_NOTHROW(secular_exppoly(m, cfg));
}

TEST_CASE("symbolic engine refuses irrational lengths") {
  auto g = make_example("weighted-one-edge:c=3,c1=1,c2=1");
  g.edges[0].weight = M_PI;  // forces an approximate rescale
  auto m = flatten(g);
  CHECK_FALSE(m.lengths_exact);
  CHECK_THROWS_AS(secular_exppoly(m), Error);
}

TEST_CASE("evaluator picks the better-conditioned route") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  auto best = SecularEvaluator::best(m);
  CHECK(best.mode() == EvalMode::exppoly);
  auto poly5 = flatten(make_example("polygon:n=5,ell=1"));
  CHECK(SecularEvaluator::best(poly5).mode() == EvalMode::direct);
  // both routes agree where the direct route is well conditioned
  cplx k(1.4, -0.8);
  LogVal a = SecularEvaluator(m)(k);
  LogVal b = best(k);
  CHECK(std::abs(a.log_mag - b.log_mag) < 1e-8);
  CHECK(std::abs(std::remainder(a.phase - b.phase, 2 * M_PI)) < 1e-8);
}

TEST_CASE("deep lower half-plane stays finite in log form") {
  auto m = flatten(make_example("polygon:n=4,ell=1"));
  Config cfg;
  cfg.symbolic_cap = 32;
  SecularEvaluator ev(m, secular_exppoly(m, cfg).f);
  LogVal v = ev(cplx(3.0, -60.0));
  CHECK(v.finite());
}

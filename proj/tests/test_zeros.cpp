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

// Evaluator on the k-deflated expansion: the determinant construction owns a
// spurious zero of fixed order at k = 0 that is not a resonance.
SecularEvaluator deflated(const OneVertexModel& m,
                          const Config& cfg = default_config()) {
  auto sym = secular_exppoly(m, cfg);
  auto [mk, f] = factor_out_k(sym.f, cfg);
  return SecularEvaluator(m, f);
}

}  // namespace

TEST_CASE("count_zeros: dirichlet edge sine count") {
  // l ~ pi: zeros of sin(lk) at n pi / l, so |k| < 3.5 holds n in {0,..,+-3}
  auto m = flatten(dirichlet_edge(Rational(355, 113)));
  CHECK(count_zeros(m, cplx(0, 0), 3.5) == 7);
}

TEST_CASE("count_zeros: lead-decoupled family has no resonances") {
  auto m = flatten(make_example("solomyak-family"));
  CHECK(count_zeros(deflated(m), cplx(0, 0), 50.0) == 0);
}

TEST_CASE("count_zeros: loop disk count matches the frozen oracle") {
  // N0 = 7 fixed by dense phase sampling (1e5 contour points) of the
  // determinant on |k| = 10 before this suite was written
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  CHECK(count_zeros(m, cplx(0, 0), 10.0) == 7);
}

TEST_CASE("winding integrality holds on resolved contours") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  SecularEvaluator ev = SecularEvaluator::best(m);
  // rectangle count equals the sum over a 2x2 split
  Box b{0.5, 9.5, -4.0, 0.5};
  int whole = winding_rect(ev, b);
  int parts = 0;
  double rm = 0.5 * (b.re_min + b.re_max), im = 0.5 * (b.im_min + b.im_max);
  for (Box q : {Box{b.re_min, rm, b.im_min, im}, Box{rm, b.re_max, b.im_min, im},
                Box{b.re_min, rm, im, b.im_max}, Box{rm, b.re_max, im, b.im_max}})
    parts += winding_rect(ev, q);
  CHECK(whole == parts);
  CHECK(whole >= 0);
}

TEST_CASE("locate_zeros: embedded eigenvalue of the non-Weyl loop") {
  auto m = flatten(make_example("loop-two-leads:alpha=0,beta=1"));
  auto res = locate_zeros(deflated(m), Box{0.0, 7.0, -1.0, 1.0}, 1e-10);
  REQUIRE(res.complete);
  REQUIRE(res.zeros.size() == 1);
  CHECK(std::abs(res.zeros[0].k - cplx(2 * M_PI, 0)) < 1e-8);
}

TEST_CASE("locate_zeros: loop resonances satisfy the closed-form condition") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  auto res = locate_zeros(deflated(m), Box{-0.5, 7.0, -3.0, 0.3}, 1e-10);
  REQUIRE(res.complete);
  CHECK(!res.zeros.empty());
  for (const auto& z : res.zeros) {
    cplx lhs = std::exp(cplx(0, 1) * z.k) + 1.0 - 4.0 * cplx(0, 1) * z.k;
    bool embedded = false;
    for (int n = 0; n <= 2; ++n)
      embedded |= std::abs(z.k - cplx(2 * M_PI * n, 0)) < 1e-8;
    CHECK((std::abs(lhs) < 1e-6 || embedded));
  }
}

TEST_CASE("locate_zeros: empty region stays empty") {
  auto m = flatten(make_example("solomyak-family"));
  auto res = locate_zeros(deflated(m), Box{0.5, 40.0, -20.0, 0.5}, 1e-9);
  CHECK(res.complete);
  CHECK(res.zeros.empty());
}

TEST_CASE("locate_zeros rejects a non-positive tolerance") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  CHECK_THROWS_AS(locate_zeros(m, Box{0, 1, -1, 0}, 0.0), Error);
}

TEST_CASE("counting slope: non-Weyl loop at l ~ pi") {
  auto m = flatten(make_example("loop-two-leads:alpha=0,beta=1,l=355/113"));
  auto t = counting_function(m, {20, 40, 60, 80});
  CHECK_FALSE(t.partial);
  CHECK(std::abs(t.w_est - M_PI / 2) < 0.05 * (M_PI / 2));
}

TEST_CASE("counting slope: square with leads") {
  auto m = flatten(make_example("polygon:n=4,ell=1"));
  Config cfg;
  cfg.symbolic_cap = 32;
  auto t = counting_function(SecularEvaluator::best(m, cfg), {20, 40, 60, 80},
                             cfg);
  CHECK_FALSE(t.partial);
  CHECK(std::abs(t.w_est - 1.0) < 0.05);
}

TEST_CASE("counting slope: Weyl loop") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  auto t = counting_function(m, {20, 40, 60, 80});
  CHECK_FALSE(t.partial);
  CHECK(std::abs(t.w_est - 1.0) < 0.05);
}

TEST_CASE("counting_function validates its radii") {
  auto m = flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  CHECK_THROWS_AS(counting_function(m, {10.0}), Error);
  CHECK_THROWS_AS(counting_function(m, {10.0, 5.0}), Error);
}

TEST_CASE("sweep: constant schedule gives motionless tracks") {
  auto fam = [](double) {
    return flatten(make_example("loop-two-leads:alpha=1,beta=1"));
  };
  auto tr = sweep_parameter(fam, {1.0, 1.0, 1.0}, Box{0.5, 10.0, -5.0, 0.5},
                            1e-9);
  CHECK(!tr.tracks.empty());
  for (const auto& t : tr.tracks) {
    REQUIRE(t.points.size() == 3);
    for (const auto& [i, z] : t.points)
      CHECK(std::abs(z.k - t.points.front().second.k) < 1e-9);
  }
}

TEST_CASE("sweep: delta loop follows the escape law") {
  auto fam = [](double a) {
    ExampleSpec s;
    s.name = "loop-two-leads";
    s.params["alpha"] = std::to_string(a);
    s.params["beta"] = "1";
    return flatten(make_example(s));
  };
  std::vector<double> sched;
  for (int i = 0; i < 12; ++i) sched.push_back(std::pow(10.0, -2.0 * i / 11.0));
  auto tr = sweep_parameter(fam, sched, Box{0.5, 20.0, -15.0, 0.5}, 1e-8);
  int embedded_tracks = 0, resonance_tracks = 0;
  for (const auto& t : tr.tracks) {
    bool embedded = true;
    for (const auto& [i, z] : t.points)
      embedded &= std::abs(z.k.imag()) < 1e-6;
    if (embedded) {
      ++embedded_tracks;
      // the embedded eigenvalues at 2 pi n do not move with alpha
      for (const auto& [i, z] : t.points)
        CHECK(std::abs(z.k - t.points.front().second.k) < 1e-9);
    } else if (t.points.size() >= sched.size() / 2) {
      ++resonance_tracks;
      // Im k = -log(1/alpha) + O(1) along the track
      for (const auto& [i, z] : t.points)
        CHECK(std::abs(z.k.imag() + std::log(1.0 / sched[i])) < 5.0);
    }
  }
  CHECK(embedded_tracks >= 3);
  CHECK(resonance_tracks >= 2);
}

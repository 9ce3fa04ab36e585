#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uext/interpolant.hpp"
#include "uext/poly.hpp"
#include "uext/precision.hpp"
#include "uext/weierstrass.hpp"

using namespace uext;

namespace {

bool close(const Real& x, const char* want, double tol) {
  return static_cast<double>(abs(x - Real(want))) <= tol;
}

}  // namespace

TEST_CASE("scoped precision restores the previous default") {
  const unsigned before = Real::default_precision();
  {
    ScopedPrecision scope(512);
    CHECK(Real::default_precision() == bits_to_digits10(512));
    Real x = Real(1) / 3;
    CHECK(static_cast<double>(abs(x * 3 - 1)) < 1e-150);
  }
  CHECK(Real::default_precision() == before);
}

TEST_CASE("precision context validation") {
  PrecisionContext ctx;
  CHECK_NOTHROW(ctx.validate());
  CHECK_THROWS_AS((PrecisionContext{32, 20, 40, 1e-30}.validate()), ConfigError);
  CHECK_THROWS_AS((PrecisionContext{512, 0, 40, 1e-30}.validate()), ConfigError);
  CHECK_THROWS_AS((PrecisionContext{512, 20, 10, 1e-30}.validate()), ConfigError);
  CHECK_THROWS_AS((PrecisionContext{512, 20, 40, 0.0}.validate()), ConfigError);
}

TEST_CASE("moment bit requirement") {
  // peak term beta^{k(k+1)/2} at kmax=10, beta=4: 110 bits; residual 1e-30 ~ 100 bits
  CHECK(moment_bits_required(10, 4.0, 1e-30) == 274);
  PrecisionContext ok{512, 20, 40, 1e-30};
  CHECK_NOTHROW(require_moment_bits(ok, 10, 4.0));
  PrecisionContext low{64, 20, 40, 1e-30};
  CHECK_THROWS_AS(require_moment_bits(low, 10, 4.0), PrecisionError);
}

TEST_CASE("polynomial building blocks") {
  ScopedPrecision scope(256);
  Poly p{Real(1)};
  poly_mul_linear(p, Real(1));   // (1+z)
  poly_mul_linear(p, Real(2));   // (1+z)(1+2z) = 1 + 3z + 2z^2
  REQUIRE(p.size() == 3);
  CHECK(p[0] == 1);
  CHECK(p[1] == 3);
  CHECK(p[2] == 2);
  CHECK(poly_eval(p, Real(2)) == 15);

  // root at z=-1: divide out (z - (-1))
  Real rem;
  Poly q = poly_divide_synthetic(p, Real(-1), &rem);
  CHECK(static_cast<double>(abs(rem)) < 1e-70);
  // q(z) = 2z + 1 (times sign convention: p = (z+1) q)
  CHECK(static_cast<double>(abs(poly_eval(q, Real(3)) * (3 + 1) - poly_eval(p, Real(3)))) <
        1e-70);

  Poly qs = poly_divide_series(p, Real(-1));
  REQUIRE(qs.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    CHECK(static_cast<double>(abs(q[i] - qs[i])) < 1e-70);
}

TEST_CASE("node product values at probe points") {
  ScopedPrecision scope(512);
  NodeProduct w(Real(4), 40);
  CHECK(close(w.eval(Real(1) / 4), "0.688537537120339715456514547141808758327428717569", 1e-45));
  CHECK(close(w.eval(Real(1) / 16), "0.918050049493786287275352539674111104118026058568", 1e-45));
  CHECK(close(w.derivative_at_node(0), "-0.688537537120339715456515116686710479283065412143",
              1e-45));
  CHECK(close(w.derivative_at_node(1), "0.516403152840254786592388046149738022329209142834",
              1e-45));
  CHECK(close(w.derivative_at_node(2), "-1.93651182315095544972148080258209502673818554187",
              1e-44));
}

TEST_CASE("closed-form node derivative agrees with synthetic division") {
  ScopedPrecision scope(512);
  NodeProduct w(Real(4), 40);
  for (int k : {0, 1, 2, 5, 9}) {
    const Poly q = poly_divide_synthetic(w.coeffs(), w.node(k));
    const Real via_div = poly_eval(q, w.node(k));
    const Real closed = w.derivative_at_node(k);
    CHECK(static_cast<double>(abs(via_div - closed) / abs(closed)) < 1e-120);
  }
  CHECK(w.derivative_growth_ok(17));
  CHECK_THROWS_AS(w.derivative_at_node(40), ConfigError);
}

TEST_CASE("cardinal sum bound and tail sums") {
  ScopedPrecision scope(512);
  CHECK(close(cardinal_sum_bound(Real(4)), "0.755484718954540938332711256409", 1e-25));
  CHECK_THROWS_AS(cardinal_sum_bound(Real(2)), ConfigError);

  NodeProduct w(Real(4), 40);
  CHECK(close(cardinal_tail_sum(w, 1, 18), "0.378486014393625427357753248396", 1e-25));
  CHECK(close(cardinal_tail_sum(w, 10, 18), "0.516906171291895503721420727519", 1e-25));
  for (int l = 1; l <= 10; ++l) {
    CHECK(static_cast<double>(cardinal_tail_sum(w, l, 18)) <= 0.75550);
  }
}

TEST_CASE("fixed point converges with documented contraction ratios") {
  ScopedPrecision scope(512);
  NodeProduct w(Real(4), 40);
  const int K = 18;
  auto wprime = node_derivatives(w, K);
  auto res = fixed_point_boundary(w, wprime, K, Real("1e-90"), 0.756);
  REQUIRE(res.u.size() == K);

  double max_ratio = 0;
  for (double r : res.ratios) max_ratio = std::max(max_ratio, r);
  CHECK(max_ratio <= 0.756);
  CHECK(max_ratio == doctest::Approx(0.3765692201769258106472658).epsilon(1e-10));

  CHECK(res.u.u[0] == Real(1) / 2);
  CHECK(close(res.u.u[1], "-2.558294084838950095912294722530188983402", 1e-35));
  CHECK(close(res.u.u[5], "-2.937478440623420452070131055282213982233", 1e-35));

  // fixed-point identity at the reciprocal nodes
  for (int k = 1; k < K; ++k) {
    const Real fv = interpolant_eval(w, wprime, res.u, pow(Real(4), -k));
    const Real parity = (k % 2 == 0) ? 1 : -1;
    CHECK(static_cast<double>(abs(res.u.u[k] + fv - parity)) < 1e-85);
  }
}

TEST_CASE("fixed point rejects a ratio cap below the true contraction rate") {
  ScopedPrecision scope(256);
  NodeProduct w(Real(4), 40);
  auto wprime = node_derivatives(w, 18);
  CHECK_THROWS_AS(fixed_point_boundary(w, wprime, 18, Real("1e-60"), 0.1), ContractionError);
}

TEST_CASE("taylor extraction routes agree and match reference coefficients") {
  ScopedPrecision scope(512);
  NodeProduct w(Real(4), 40);
  const int K = 18;
  auto wprime = node_derivatives(w, K);
  auto res = fixed_point_boundary(w, wprime, K, Real("1e-90"), 0.756);

  auto a = taylor_synthetic(w, wprime, res.u);
  auto b = taylor_series(w, wprime, res.u);
  REQUIRE(a.size() == b.size());
  double dmax = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    dmax = std::max(dmax, static_cast<double>(abs(a[i] - b[i])));
  CHECK(dmax < 1e-100);

  // the Taylor polynomial must reproduce the boundary values at the nodes
  // (the cardinal form itself is singular exactly there)
  Poly fa(a.begin(), a.end());
  for (int k = 0; k < K; ++k) {
    const Real at_node = poly_eval(fa, w.node(k));
    CHECK(static_cast<double>(abs(at_node - res.u.u[k])) < 1e-60);
  }

  CHECK(close(a[0], "1.93899317026483880217872359976633407911263173", 1e-40));
  CHECK(close(a[1], "-1.55119453621187104174297503045892730535463256", 1e-40));
  CHECK(close(a[2], "0.114058421780284635422276089805124450455397075", 1e-40));
  CHECK(close(a[3], "-0.00186441650987003730978710670912209696237215821", 1e-40));
  CHECK(close(a[4], "0.0000073678911199873799328876626518913824746970968", 1e-40));
  CHECK(close(a[5], "-0.00000000721626531187788354706755110554936402286609951", 1e-40));
  CHECK(close(a[6], "0.00000000000176307357724469472606651470154762575451165312", 1e-40));
}

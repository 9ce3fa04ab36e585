#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "uext/grid.hpp"
#include "uext/operators.hpp"

using namespace uext;

namespace {

CoefficientFamily make_two_sided() {
  PrecisionContext ctx;
  return two_sided_dyadic(ctx, 10);
}

}  // namespace

TEST_CASE("extension reproduces monomials of both signs") {
  ScopedPrecision scope(512);
  auto fam = make_two_sided();
  auto view = family_view<Real>(fam);

  const Real pts[] = {Real("-0.13"), Real("-0.5"), Real("-1"),    Real("-2.75"), Real("-7"),
                      Real("-0.031"), Real("-4"),  Real("-11.5"), Real("-0.875"), Real("-19")};

  for (int k = 0; k <= 6; ++k) {
    auto f = make_poly<Real>(k);
    for (const Real& t : pts) {
      const Real got = extend_point(view, f, t);
      const Real want = detail::pow_int(t, k);
      Real scale = abs(want);
      if (scale < 1) scale = 1;
      CHECK(static_cast<double>(abs(got - want) / scale) <= 1e-25);
    }
  }

  // negative powers: f(y) = y^{-k} on y > 0, reproduced because the negative
  // moments hold as well
  for (int k = 1; k <= 4; ++k) {
    auto f = make_power<Real>(-k);
    for (const Real& t : pts) {
      const Real got = extend_point(view, f, t);
      const Real want = detail::pow_int(t, -k);
      CHECK(static_cast<double>(abs(got - want) / abs(want)) <= 1e-25);
    }
  }
}

TEST_CASE("extension restricted to the half-line is the identity") {
  ScopedPrecision scope(256);
  auto fam = make_two_sided();
  auto view = family_view<Real>(fam);
  auto f = make_gaussian<Real>(Real(1), Real(2));
  for (double td : {0.0, 0.3, 1.7, 5.0}) {
    Real t(td);
    CHECK(extend_point(view, f, t) == f.value(t));
  }
}

TEST_CASE("extension is linear") {
  ScopedPrecision scope(256);
  auto fam = make_two_sided();
  auto view = family_view<Real>(fam);
  auto f = make_gaussian<Real>(Real(0), Real(1));
  auto g = make_exp_decay<Real>(Real(1));
  auto combo = field_sum(field_scale(f, Real(2)), field_scale(g, Real(3)));
  for (double td : {-0.4, -1.2, 0.9}) {
    Real t(td);
    const Real lhs = extend_point(view, combo, t);
    const Real rhs = 2 * extend_point(view, f, t) + 3 * extend_point(view, g, t);
    CHECK(static_cast<double>(abs(lhs - rhs)) < 1e-70);
  }
}

TEST_CASE("decomposition through the zero extension") {
  // E f = S f + sum_j a_j (S f)(-b_j .) pointwise on both sides of 0
  ScopedPrecision scope(256);
  auto fam = make_two_sided();
  auto view = family_view<Real>(fam);
  auto f = make_gaussian<Real>(Real(0), Real(1));

  for (double td : {-2.0, -0.7, -0.01, 0.4, 3.0}) {
    Real t(td);
    Real rhs = zero_extend_point(f, t);
    for (std::size_t i = 0; i < view.size(); ++i) {
      rhs += view.a[i] * zero_extend_point(f, Real(-view.b[i] * t));
    }
    const Real lhs = extend_point(view, f, t);
    CHECK(static_cast<double>(abs(lhs - rhs)) < 1e-70);
  }
}

TEST_CASE("pointwise adjoint matches its definition and vanishes below 0") {
  ScopedPrecision scope(256);
  auto fam = finite_dyadic(1, Real(1));  // a = (-5, 10, -4), b = (1, 1/2, 1/4)
  auto view = family_view<Real>(fam);
  auto g = make_gaussian<Real>(Real(-1), Real(2));

  for (double td : {0.25, 1.0, 3.5}) {
    Real t(td);
    const Real want = g.value(t) - 5 * g.value(-t) + 20 * g.value(-2 * t) - 16 * g.value(-4 * t);
    CHECK(static_cast<double>(abs(adjoint_point(view, g, t) - want)) < 1e-70);
  }
  CHECK(adjoint_point(view, g, Real(0)) == 0);
  CHECK(adjoint_point(view, g, Real(-2)) == 0);
}

TEST_CASE("dilation commutes with extension") {
  ScopedPrecision scope(256);
  auto fam = make_two_sided();
  auto view = family_view<Real>(fam);
  auto f = make_gaussian<Real>(Real(0), Real(1));
  const Real sigma("1.7");
  auto fs = field_dilate(f, sigma);

  for (double td : {-1.1, -0.2, 0.6}) {
    Real t(td);
    const Real lhs = extend_point(view, fs, t);        // E(f(sigma .))(t)
    const Real rhs = extend_point(view, f, sigma * t); // (Ef)(sigma t)
    CHECK(static_cast<double>(abs(lhs - rhs)) < 1e-70);
  }

  // derivative and envelope of the dilated field
  CHECK(static_cast<double>(abs(fs.deriv(1, Real(2)) - sigma * f.deriv(1, sigma * 2))) < 1e-70);
  CHECK(fs.envelope(3.0) == f.envelope(static_cast<double>(sigma) * 3.0));
}

TEST_CASE("finite-order extension on polynomial data") {
  ScopedPrecision scope(256);
  auto f2 = make_poly<Real>(2);
  // m=1, r=1: -5 t^2 + 10 (t/2)^2 - 4 (t/4)^2 = -2.75 t^2
  const Real got = finite_extend_point(1, Real(1), f2, Real(-1));
  CHECK(static_cast<double>(abs(got + Real("2.75"))) < 1e-60);

  // moments |k| <= m hold: x and 1/x reproduced at m = 1
  auto f1 = make_poly<Real>(1);
  auto fm1 = make_power<Real>(-1);
  for (double td : {-0.5, -2.0}) {
    Real t(td);
    CHECK(static_cast<double>(abs(finite_extend_point(1, Real(1), f1, t) - t)) < 1e-60);
    CHECK(static_cast<double>(abs(finite_extend_point(1, Real(1), fm1, t) - 1 / t)) < 1e-60);
  }
}

TEST_CASE("triangle constants") {
  CHECK(triangle_constant(0.5, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(triangle_constant(1.0, 0.5) == 1.0);
  CHECK(triangle_constant(2.0, 0.25) == 1.0);
  // decreasing in delta at fixed q
  CHECK(triangle_constant(0.5, 0.25) > triangle_constant(0.5, 0.5));
  CHECK(triangle_constant(0.5, 0.5) > triangle_constant(0.5, 1.0));
  CHECK_THROWS_AS(triangle_constant(0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(triangle_constant(0.5, 0.0), ConfigError);
}

TEST_CASE("envelope-certified term skipping") {
  ScopedPrecision scope(256);
  auto fam = make_two_sided();
  auto view = family_view<Real>(fam);
  auto f = make_gaussian<Real>(Real(0), Real(1));

  ExtendCert all_cert, skip_cert;
  const Real t("-0.5");
  const Real exact = extend_point(view, f, t, {}, &all_cert);
  ExtendOptions opt;
  opt.skip_tol = 1e-40;
  const Real skipped = extend_point(view, f, t, opt, &skip_cert);

  CHECK(skip_cert.terms_used < all_cert.terms_used);
  CHECK(static_cast<double>(abs(exact - skipped)) <= skip_cert.skipped_bound +
        1e-60);
}

TEST_CASE("grid sampling and interpolation") {
  auto f = [](double x) { return x * x * x - 2 * x + 1; };
  Grid1 g = sample_grid1(f, 0.1, 0.0, 101, true);
  CHECK(g.size() == 101);
  CHECK(g.x(10) == doctest::Approx(1.0));

  InterpPlan plan;
  plan.order = 4;
  // degree-3 data is exact under a degree-4 stencil, including near the edges
  for (double x : {0.0, 0.05, 0.731, 5.019, 9.973, 10.0}) {
    CHECK(interp_point(g, x, plan) == doctest::Approx(f(x)).epsilon(1e-12));
  }

  InterpReport rep;
  (void)interp_point(g, 4.03, plan, &rep);
  CHECK(rep.max_stencil_error < 1e-10);

  plan.policy = RangePolicy::Error;
  CHECK_THROWS_AS(interp_point(g, 10.5, plan), ConfigError);
  CHECK_THROWS_AS(interp_point(g, -0.2, plan), ConfigError);
  plan.policy = RangePolicy::ZeroPad;
  CHECK(interp_point(g, 10.5, plan) == 0.0);
  plan.policy = RangePolicy::DecayModel;
  plan.decay_model = [](double) { return 42.0; };
  CHECK(interp_point(g, 11.0, plan) == 42.0);
}

TEST_CASE("grid extension agrees with callable extension") {
  auto fam = make_two_sided();
  auto view = family_view<double>(fam);
  auto f = make_exp_decay<double>(1.0);

  Grid1 g = sample_grid1([&](double x) { return f.value(x); }, 0.01, 0.0, 2401, true);
  InterpPlan plan;
  plan.order = 6;
  // exp decay is exactly geometric on a uniform grid, so the fitted edge
  // model continues it without error
  plan.policy = RangePolicy::DecayModel;
  InterpReport rep;
  Grid1 full = extend_grid(view, g, 200, plan, &rep);

  CHECK(full.size() == g.size() + 200);
  CHECK(full.origin == doctest::Approx(-2.0));
  CHECK_FALSE(full.half);

  // positive side is copied verbatim
  for (int i = 0; i < g.size(); i += 500) {
    CHECK(full.v[200 + i] == g.v[i]);
  }
  for (int i = 0; i < 200; i += 13) {
    const double t = full.x(i);
    const double want = extend_point(view, f, t);
    CHECK(full.v[i] == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("grid CSV round-trip") {
  Grid1 g = sample_grid1([](double x) { return std::sin(x) * 1e-3 + x; }, 0.25, -3.0, 41, false);
  const char* path = "roundtrip_test.csv";
  write_grid_csv(path, g);
  Grid1 back = read_grid1_csv(path);
  std::remove(path);

  CHECK(back.h == g.h);
  CHECK(back.origin == g.origin);
  CHECK(back.half == g.half);
  REQUIRE(back.size() == g.size());
  for (int i = 0; i < g.size(); ++i) CHECK(back.v[i] == g.v[i]);
}

TEST_CASE("grid derivative and dilation") {
  Grid1 g = sample_grid1([](double x) { return x * x * x; }, 0.01, 0.0, 501, true);
  Grid1 d = fd_derivative(g, 1);
  CHECK(d.size() == g.size() - 2);
  for (int i = 0; i < d.size(); i += 50) {
    const double x = d.x(i);
    CHECK(d.v[i] == doctest::Approx(3 * x * x + 1e-4).epsilon(1e-10));
  }

  InterpPlan plan;
  plan.order = 4;
  plan.policy = RangePolicy::ZeroPad;
  Grid1 s = dilate_grid(g, 0.5, plan);
  for (int i = 0; i < s.size(); i += 50) {
    const double x = s.x(i);
    CHECK(s.v[i] == doctest::Approx(x * x * x / 8).epsilon(1e-10));
  }
}

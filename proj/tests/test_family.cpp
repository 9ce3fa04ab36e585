#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#ifndef UEXT_NO_EIGEN
#include <Eigen/Dense>
#endif

#include "uext/family.hpp"
#include "uext/operators.hpp"

using namespace uext;

namespace {

bool close(const Real& x, const char* want, double tol) {
  return static_cast<double>(abs(x - Real(want))) <= tol;
}

Real moment(const CoefficientFamily& fam, int k) {
  Real s = 0;
  for (const auto& e : fam.entries) {
    Real nb = -e.b;
    Real t = e.a;
    for (int i = 0; i < std::abs(k); ++i) t = (k > 0) ? t * nb : t / nb;
    s += t;
  }
  return s;
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (auto k : {FamilyKind::TwoSidedDyadic, FamilyKind::OneSidedSeeley,
                 FamilyKind::FiniteVandermonde, FamilyKind::FiniteDyadic}) {
    CHECK(kind_from_name(kind_name(k)) == k);
  }
  CHECK_THROWS_AS(kind_from_name("nonsense"), ConfigError);
}

TEST_CASE("two-sided synthesis meets the moment contract") {
  PrecisionContext ctx;  // 512 bits, jmax 20, tol 1e-30
  ScopedPrecision scope(ctx.bits);
  auto fam = two_sided_dyadic(ctx, 10);

  CHECK(fam.validated);
  CHECK(fam.kind == FamilyKind::TwoSidedDyadic);
  CHECK(fam.beta == 4.0);
  CHECK(fam.meta.jmax_effective >= 20);
  CHECK(fam.min_j() == -fam.max_j());
  CHECK(fam.meta.max_contraction_ratio <= 0.756);
  CHECK(fam.meta.taylor_cross_check <= 1e-30);

  // symmetric coefficients; center doubled relative to the one-sided weights
  const auto* e0 = fam.find(0);
  const auto* e1 = fam.find(1);
  const auto* em1 = fam.find(-1);
  REQUIRE(e0 != nullptr);
  REQUIRE(e1 != nullptr);
  REQUIRE(em1 != nullptr);
  CHECK(e1->a == em1->a);
  CHECK(close(e0->a, "3.87798634052967760435744719953266815822526346", 1e-39));
  CHECK(close(e1->a, "-1.55119453621187104174297503045892730535463256", 1e-40));
  CHECK(close(fam.find(2)->a, "0.114058421780284635422276089805124450455397075", 1e-40));
  CHECK(static_cast<double>(e1->b) == 4.0);
  CHECK(static_cast<double>(em1->b) == 0.25);

  // direct moment identities, both signs
  for (int k = -10; k <= 10; ++k) {
    CHECK(static_cast<double>(abs(moment(fam, k) - 1)) <= 1e-30);
  }

  auto rep = moment_report(fam, -10, 10, 1e-30);
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 21);
  for (const auto& row : rep.rows) {
    CHECK(row.pass);
    CHECK(row.residual <= 1e-30);
    CHECK(row.tail_converged);
  }
  CHECK(rep.delta_max >= 0.5);
}

TEST_CASE("two-sided synthesis rejects insufficient precision") {
  PrecisionContext low;
  low.bits = 64;
  CHECK_THROWS_AS(two_sided_dyadic(low, 10), PrecisionError);
}

TEST_CASE("one-sided family holds k >= 0 and honestly fails k = -1") {
  PrecisionContext ctx;
  ScopedPrecision scope(ctx.bits);
  auto fam = one_sided_seeley(ctx, 2.0, 10);

  CHECK(fam.min_j() == 0);
  CHECK(fam.meta.validated_k_lo == 0);
  CHECK(fam.meta.validated_k_hi == 10);
  CHECK(close(fam.find(0)->a, "8.25598793577825", 1e-10));
  CHECK(close(fam.find(1)->a, "-11.00798391437100", 1e-10));

  for (int k = 0; k <= 10; ++k) {
    CHECK(static_cast<double>(abs(moment(fam, k) - 1)) <= 1e-30);
  }
  // negative moment residual is O(1): no nodes below 1 to balance the sum
  const double res_m1 = static_cast<double>(abs(moment(fam, -1) - 1));
  CHECK(res_m1 == doctest::Approx(4.768).epsilon(0.01));

  auto rep = moment_report(fam, -1, 10, 1e-30);
  CHECK_FALSE(rep.rows.front().in_validated_range);
  CHECK_FALSE(rep.rows.front().pass);
  CHECK(rep.pass);  // out-of-range rows are informational
}

TEST_CASE("hestenes two-node family") {
  ScopedPrecision scope(256);
  auto fam = finite_vandermonde({Real(1), Real(2)}, 0, 1);
  REQUIRE(fam.entries.size() == 2);
  CHECK(static_cast<double>(abs(fam.entries[0].a - 3)) < 1e-60);
  CHECK(static_cast<double>(abs(fam.entries[1].a + 2)) < 1e-60);
  CHECK(static_cast<double>(abs(moment(fam, 0) - 1)) < 1e-55);
  CHECK(static_cast<double>(abs(moment(fam, 1) - 1)) < 1e-55);
}

#ifndef UEXT_NO_EIGEN
TEST_CASE("finite families agree with a dense linear solve") {
  ScopedPrecision scope(256);

  auto check_against_solver = [](const std::vector<double>& nodes, int m1, int m2) {
    const int n = m1 + m2 + 1;
    Eigen::MatrixXd V(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      const int k = -m1 + r;
      for (int c = 0; c < n; ++c) V(r, c) = std::pow(-nodes[c], k);
      rhs(r) = 1.0;
    }
    Eigen::VectorXd sol = V.fullPivLu().solve(rhs);

    std::vector<Real> rn;
    for (double x : nodes) rn.emplace_back(x);
    auto fam = finite_vandermonde(rn, m1, m2);
    REQUIRE(static_cast<int>(fam.entries.size()) == n);
    for (int c = 0; c < n; ++c) {
      CHECK(static_cast<double>(fam.entries[c].a) == doctest::Approx(sol(c)).epsilon(1e-10));
    }
  };

  check_against_solver({1.0, 2.0}, 0, 1);
  check_against_solver({1.0, 0.5, 0.25}, 1, 1);
  check_against_solver({3.0, 1.5, 0.75, 0.375, 0.1875}, 2, 2);
}
#endif

TEST_CASE("finite dyadic families") {
  ScopedPrecision scope(256);

  auto f11 = finite_dyadic(1, Real(1));
  REQUIRE(f11.entries.size() == 3);
  CHECK(static_cast<double>(abs(f11.entries[0].a + 5)) < 1e-20);
  CHECK(static_cast<double>(abs(f11.entries[1].a - 10)) < 1e-20);
  CHECK(static_cast<double>(abs(f11.entries[2].a + 4)) < 1e-20);
  CHECK(f11.meta.validated_k_lo == -1);
  CHECK(f11.meta.validated_k_hi == 1);

  // m=2, r=1/2: exact rational coefficients 561/28, -5049/56, 935/8, -1485/28, 51/7
  auto f2 = finite_dyadic(2, Real(1) / 2);
  REQUIRE(f2.entries.size() == 5);
  const char* want[] = {"20.0357142857142857142857142857142857142857",
                        "-90.1607142857142857142857142857142857142857",
                        "116.875",
                        "-53.0357142857142857142857142857142857142857",
                        "7.28571428571428571428571428571428571428571"};
  for (int i = 0; i < 5; ++i) CHECK(close(f2.entries[i].a, want[i], 1e-35));
  for (int k = -2; k <= 2; ++k)
    CHECK(static_cast<double>(abs(moment(f2, k) - 1)) < 1e-50);

  // m=0 degenerates to the single reflection with unit weight
  auto f0 = finite_dyadic(0, Real(3));
  REQUIRE(f0.entries.size() == 1);
  CHECK(static_cast<double>(f0.entries[0].a) == 1.0);

  CHECK_THROWS_AS(finite_dyadic(-1, Real(1)), ConfigError);
  CHECK_THROWS_AS(finite_dyadic(1, Real(0)), ConfigError);
  CHECK_THROWS_AS(finite_vandermonde({Real(1), Real(1)}, 0, 1), ConfigError);
  CHECK_THROWS_AS(finite_vandermonde({Real(1), Real(-2)}, 0, 1), ConfigError);
}

TEST_CASE("commuted families shift the validated moment range") {
  PrecisionContext ctx;
  ScopedPrecision scope(ctx.bits);
  auto fam = two_sided_dyadic(ctx, 10);

  auto c2 = commuted_family(fam, 2);
  CHECK(c2.meta.validated_k_lo == -12);
  CHECK(c2.meta.validated_k_hi == 8);
  // sum a_j (-b_j)^2 (-b_j)^k = 1 whenever k+2 is in the original range
  for (int k = -12; k <= 8; ++k)
    CHECK(static_cast<double>(abs(moment(c2, k) - 1)) <= 1e-28);

  auto inv = commuted_family(fam, -1, true);
  // entries had b -> 1/b and a -> a (-b)^{-1}; moments at k test a (-1/b)^... :
  // validated range maps to [-(hi)-(-1)?]: check the documented pass band
  for (int k = inv.meta.validated_k_lo; k <= inv.meta.validated_k_hi; ++k)
    CHECK(static_cast<double>(abs(moment(inv, k) - 1)) <= 1e-28);

  CHECK_THROWS_AS(commuted_family(fam, 25), ConfigError);
}

TEST_CASE("explicit norm constant matches a direct sum") {
  ScopedPrecision scope(256);
  auto fam = finite_dyadic(1, Real(1));  // a = (-5, 10, -4), b = (1, 1/2, 1/4)
  // k=0, p=inf: sum 2^{0.5 j} |a_j| * 2
  const double direct = 2 * (5 + std::sqrt(2.0) * 10 + 2.0 * 4);
  const double got = explicit_norm_constant(fam, 0, std::numeric_limits<double>::infinity());
  CHECK(got == doctest::Approx(direct).epsilon(1e-12));

  // k=1, p=2: sum 2^{delta|j|} |a_j| (b^{-1/2} + b^{1/2})
  double want = 0;
  const double as[] = {-5, 10, -4};
  const double bs[] = {1, 0.5, 0.25};
  for (int j = 0; j < 3; ++j)
    want += std::pow(2.0, 0.5 * j) * std::abs(as[j]) *
            (std::pow(bs[j], -0.5) + std::pow(bs[j], 0.5));
  CHECK(explicit_norm_constant(fam, 1, 2) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("family JSON round-trip preserves full precision") {
  PrecisionContext ctx;
  ScopedPrecision scope(ctx.bits);
  auto fam = two_sided_dyadic(ctx, 10);
  auto j = family_to_json(fam);
  auto back = family_from_json(j);

  CHECK(back.kind == fam.kind);
  CHECK(back.validated == fam.validated);
  CHECK(back.meta.bits == fam.meta.bits);
  CHECK(back.meta.validated_k_lo == fam.meta.validated_k_lo);
  REQUIRE(back.entries.size() == fam.entries.size());
  for (std::size_t i = 0; i < fam.entries.size(); ++i) {
    CHECK(back.entries[i].j == fam.entries[i].j);
    CHECK(static_cast<double>(abs(back.entries[i].a - fam.entries[i].a)) <= 1e-140);
    CHECK(static_cast<double>(abs(back.entries[i].b - fam.entries[i].b)) == 0.0);
  }

  // a reloaded family still passes its moment report
  auto rep = moment_report(back, -10, 10, 1e-30);
  CHECK(rep.pass);
}

TEST_CASE("moment report flags an out-of-tolerance family") {
  ScopedPrecision scope(256);
  auto fam = finite_dyadic(1, Real(1));
  fam.entries[0].a += Real("1e-6");  // corrupt
  auto rep = moment_report(fam, -1, 1, 1e-10);
  CHECK_FALSE(rep.pass);
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uext/precision.hpp"

namespace uext {

inline constexpr const char* kToolVersion = "uext 0.1.0";

enum class FamilyKind { TwoSidedDyadic, OneSidedSeeley, FiniteVandermonde, FiniteDyadic };

std::string kind_name(FamilyKind k);
FamilyKind kind_from_name(const std::string& name);

struct FamilyEntry {
  int j;
  Real a;
  Real b;  // node scale; always positive, reflection uses -b
};

// A reflection-coefficient family (a_j, b_j): the extension operator reads
//   Ef(x', xn) = sum_j a_j f(x', -b_j xn)  for xn < 0.
// Entries are sorted by j. `validated` records that the moments
// sum_j a_j (-b_j)^k = 1 were checked over meta.validated_k_{lo,hi} at
// meta.tail_tol.
struct CoefficientFamily {
  FamilyKind kind = FamilyKind::TwoSidedDyadic;
  double beta = 4.0;   // node base for geometric kinds (b_j = beta^j)
  double delta = 0.5;  // weight exponent used in tail/constant reports
  std::vector<FamilyEntry> entries;
  bool validated = false;

  struct Meta {
    unsigned bits = 0;
    int jmax_requested = 0;
    int jmax_effective = 0;  // actual largest |j| retained
    int product_terms = 0;
    double tail_tol = 0;
    int validated_k_lo = 0;
    int validated_k_hi = 0;
    int iterations = 0;              // fixed-point steps (two-sided kind)
    double max_contraction_ratio = 0;
    double taylor_cross_check = 0;   // max coefficient gap between the two
                                     // Taylor extraction routes
    std::string tool = kToolVersion;
  } meta;

  const FamilyEntry* find(int j) const;
  int min_j() const { return entries.empty() ? 0 : entries.front().j; }
  int max_j() const { return entries.empty() ? 0 : entries.back().j; }
};

struct MomentRow {
  int k = 0;
  double residual = 0;       // |sum_j a_j (-b_j)^k - 1|
  std::string residual_str;  // full-precision decimal of the residual
  double weighted_tail = 0;  // estimated dropped tail of sum_j 2^{delta|j|}|a_j| b_j^k
  bool tail_converged = true;
  bool pass = false;
  bool in_validated_range = true;
};

struct MomentReport {
  std::vector<MomentRow> rows;
  double tol = 0;
  double delta_max = 0;  // largest delta in {0.25,0.5,1,2,4} with numerically
                         // convergent weighted sums over the probed k range
  bool pass = false;     // all rows inside the validated range pass
};

// ---- synthesis ----

// Two-sided geometric family at base 4: fixed-point boundary values, Taylor
// extraction, symmetric placement a_{±j} = ã_j (a_0 = 2 ã_0), b_j = 4^j.
// Guarantees the returned family's moment report passes for |k| <= kmax at
// ctx.tail_tol; retains entries past ctx.jmax when the truncation tail needs
// them.
CoefficientFamily two_sided_dyadic(const PrecisionContext& ctx, int kmax, double delta = 0.5);

// One-sided family: u_k = (-1)^k interpolated on nodes beta^k, coefficients
// from the Taylor expansion, b_j = beta^j for j >= 0 only. Moments hold for
// k >= 0; negative k intentionally fail (no entries with b_j < 1).
CoefficientFamily one_sided_seeley(const PrecisionContext& ctx, double beta, int kmax,
                                   double delta = 0.5);

// Finite family on arbitrary distinct positive nodes: solves
// sum_j a_j b_j^k = (-1)^k for -M1 <= k <= M2 via the product closed form
// a_j = (-b_j)^{M1} prod_{k != j} (b_k + 1)/(b_k - b_j).
CoefficientFamily finite_vandermonde(const std::vector<Real>& nodes, int M1, int M2);

// Finite dyadic family: nodes b_j = r 2^{-j}, j = 0..2m, moments |k| <= m.
CoefficientFamily finite_dyadic(int m, const Real& r);

// ---- reports / transforms ----

MomentReport moment_report(const CoefficientFamily& fam, int k_lo, int k_hi, double tol);

// Commuted family (a_j (-b_j)^power, b_j) or, with invert_b, the variant
// (a_j (-b_j)^power, 1/b_j); both inherit shifted validated k-ranges.
CoefficientFamily commuted_family(const CoefficientFamily& fam, int power, bool invert_b = false);

// Explicit operator-norm constant sum_j 2^{delta |j|} |a_j| (b_j^{-1/p} + b_j^{k-1/p});
// pass p = infinity for the sup-norm scale (1/p = 0).
double explicit_norm_constant(const CoefficientFamily& fam, int k, double p);

// ---- serialization ----

nlohmann::json family_to_json(const CoefficientFamily& fam);
CoefficientFamily family_from_json(const nlohmann::json& j);
nlohmann::json moment_report_to_json(const MomentReport& rep);

}  // namespace uext

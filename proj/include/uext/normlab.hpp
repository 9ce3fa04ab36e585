#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uext/grid.hpp"

namespace uext {

enum class NormFamily { Lp, Sobolev, NegSobolevUpper, Holder, Besov, TriebelDiag };

struct NormSpec {
  NormFamily family = NormFamily::Lp;
  double order = 0;  // differentiability k (sobolev/holder) or smoothness s
  double holder_s = 0.5;
  double p = 2;
  double q = 2;       // besov/triebel second exponent; triebel-diag needs p == q
  int levels = 12;    // Littlewood-Paley level count
  double torus_L = 1024;
  int torus_N = 1 << 16;
};

std::string norm_family_name(NormFamily f);

// ---- grid-based norms ----

// (sum |f|^p h)^{1/p}; max for p = inf; quasi-norm for 0 < p < 1.
double lp_norm(const Grid1& g, double p);

// FD derivatives up to order k, each measured in L^p, combined in l^p.
double sobolev_norm(const Grid1& g, int k, double p);

// sup over sampled pairs within |x-y| <= window of |d^k f(x) - d^k f(y)| / |x-y|^s
// (a lower estimate of the true seminorm).
double holder_seminorm(const Grid1& g, int k, double s, double window = 0);

// ---- spectral norms on a torus embedding ----

struct TorusEmbed {
  double L = 0;
  std::vector<double> v;  // samples at x = -L/2 + i*L/N (N = v.size())
  double h() const { return L / v.size(); }
};

// Windows a callable into a period-L torus; boundary values must already be
// negligible, the smooth window (plateau on |x| <= L/4) only enforces exact
// periodicity.
TorusEmbed torus_embed(const std::function<double(double)>& f, double L, int N,
                       bool window = true);

double lp_norm(const TorusEmbed& t, double p);

// (sum (1+|xi|^2)^s |f_hat|^2)^{1/2} by FFT; warns (returns flag) when the
// spectral tail beyond 0.9*Nyquist exceeds 1% of the norm.
double h_s_norm(const TorusEmbed& t, double s, bool* aliasing = nullptr);

// Littlewood-Paley quasinorm (sum_j 2^{jsq} ||lambda_j * f||_p^q)^{1/q} with a
// fixed smooth dyadic window; levels truncated at `levels`, truncation tail of
// the multiplier mass reported via `tail`.
double besov_quasinorm(const TorusEmbed& t, double p, double q, double s, int levels,
                       double* tail = nullptr);

// Applies the (1+|xi|^2)^{s/2} Fourier multiplier and returns the filtered
// samples; h_s_norm(h_s_multiplier(t, s), 0) == h_s_norm(t, s).
TorusEmbed h_s_multiplier(const TorusEmbed& t, double s);

// ---- decomposition witnesses for negative orders ----

struct WitnessPart {
  int alpha = 0;  // derivative order of this part
  std::function<double(int, double)> deriv;  // m-th derivative of g_alpha
  std::string id;
};

struct DecompositionWitness {
  int k = 0;  // target order, k < 0; parts satisfy |alpha| <= -k
  std::vector<WitnessPart> parts;
};

// l^p-combined cost (sum_alpha ||g_alpha||_p^p)^{1/p} measured on [lo, hi].
double witness_cost(const DecompositionWitness& w, double p, double lo, double hi, double h);

// ---- probes ----

struct ProbeRow {
  std::string id;
  double norm_in = 0;
  double norm_out = 0;
  double ratio = 0;
  double bound = 0;  // explicit constant when applicable, else 0
  bool pass = false;
};

struct ProbeReport {
  std::string probe;
  std::vector<ProbeRow> rows;
  double bound = 0;
  double max_ratio = 0;
  double min_ratio = 0;
  bool pass = false;
};

struct TestFunction {
  std::string id;
  Field1<double> field;
};

// The fixed 20-member probe family: Gaussians, boundary-anchored smooth bumps,
// seeded modulated waves, and one-sided-smooth decaying profiles.
std::vector<TestFunction> build_test_family(unsigned seed = 1);

// ||Ef|| / ||f|| per family member for Lp / Sobolev / Holder / Besov specs;
// bound column carries sum_j 2^{delta|j|}|a_j|(b_j^{-1/p} + b_j^{k-1/p}) for
// lp/sobolev/holder specs.
ProbeReport operator_norm_probe(const CoefficientFamily& fam, const NormSpec& spec,
                                const std::vector<TestFunction>& family);

// Transported-witness inequality for k in {-1,-2}: the canonical witness for
// Ef costs at most bound * cost(witness for f).
ProbeReport witness_transport_probe(const CoefficientFamily& fam, int k, double p);

struct BoundaryRow {
  int kappa = 0;
  std::vector<double> mismatch;  // one entry per h
  double fitted_order = 0;
  bool pass = false;
};

struct BoundaryReport {
  std::vector<double> hs;
  std::vector<BoundaryRow> rows;
  bool pass = false;
};

// One-sided derivative mismatch |d^kappa Ef(0^-) - d^kappa f(0^+)| from
// strictly one-sided stencils at each h (best of two stencil widths, so a
// truncation-coefficient zero of one width cannot fake a flat decay); fitted
// order from the first/last h pair. Runs in extended precision: high-order
// stencils amplify rounding noise by 1/h^kappa, which would swamp the true
// mismatch in double.
BoundaryReport boundary_smoothness_report(const CoefficientFamily& fam, const Field1<Real>& f,
                                          int max_order, const std::vector<double>& hs,
                                          double min_fitted_order = 0.8);

struct DilationRow {
  double r = 0;
  double norm = 0;
};

struct DilationReport {
  std::vector<DilationRow> rows;
  double slope = 0;
  double expected = 0;
  double slope_tol = 0;
  bool pass = false;
};

// log-log slope of ||f(r.)|| versus r over r = base^{-span}..base^{span}.
DilationReport dilation_growth_probe(const NormSpec& spec, const Field1<double>& f,
                                     double base = 4, int span = 4);

struct DualityReport {
  double lhs = 0;  // <Ef, g> over the full line
  double rhs = 0;  // <f, E*g> over the half line
  double abs_err = 0;
  bool pass = false;
};

DualityReport adjoint_duality_probe(const CoefficientFamily& fam, const Field1<double>& f,
                                    const Field1<double>& g, double tol = 1e-8);

struct FlatnessRow {
  int beta = 0;
  std::vector<double> values;  // |d^beta E*g| at the probe offsets
  double ratio = 0;            // value at 1e-3 over value at 0.5
  bool pass = false;
};

struct FlatnessReport {
  std::vector<double> offsets;
  std::vector<FlatnessRow> rows;
  bool pass = false;
};

// One-sided decay of the adjoint toward the boundary: |d^beta (E*g)| at
// offsets {1e-2, 1e-3, 1e-4} with the pass rule value(1e-3) <= ratio_cap *
// value(0.5).
FlatnessReport adjoint_flatness_probe(const CoefficientFamily& fam, const Field1<double>& g,
                                      int max_beta = 3, double ratio_cap = 1e-3);

// Finite-difference weights for the m-th derivative at x0 on arbitrary nodes
// (Fornberg recurrence); works for any scalar type.
template <typename T>
std::vector<T> fd_weights_t(const T& x0, const std::vector<T>& nodes, int m) {
  const int n = static_cast<int>(nodes.size());
  if (m < 0 || n < m + 1) throw ConfigError("fd weights: need at least m+1 nodes");
  std::vector<std::vector<T>> c(n, std::vector<T>(m + 1, T(0)));
  T c1(1);
  T c4 = nodes[0] - x0;
  c[0][0] = T(1);
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    T c2(1);
    const T c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const T c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (T(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - T(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<T> out(n);
  for (int j = 0; j < n; ++j) out[j] = c[j][m];
  return out;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m);

nlohmann::json probe_report_to_json(const ProbeReport& r);
nlohmann::json boundary_report_to_json(const BoundaryReport& r);
nlohmann::json dilation_report_to_json(const DilationReport& r);
nlohmann::json duality_report_to_json(const DualityReport& r);
nlohmann::json flatness_report_to_json(const FlatnessReport& r);

}  // namespace uext

#include "uext/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "uext/interpolant.hpp"
#include "uext/weierstrass.hpp"

namespace uext {

using json = nlohmann::ordered_json;

std::string kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::TwoSidedDyadic: return "two-sided-dyadic";
    case FamilyKind::OneSidedSeeley: return "one-sided-seeley";
    case FamilyKind::FiniteVandermonde: return "finite-vandermonde";
    case FamilyKind::FiniteDyadic: return "finite-dyadic";
  }
  throw ConfigError("unknown family kind");
}

FamilyKind kind_from_name(const std::string& name) {
  if (name == "two-sided-dyadic") return FamilyKind::TwoSidedDyadic;
  if (name == "one-sided-seeley") return FamilyKind::OneSidedSeeley;
  if (name == "finite-vandermonde") return FamilyKind::FiniteVandermonde;
  if (name == "finite-dyadic") return FamilyKind::FiniteDyadic;
  throw ConfigError("unknown family kind: " + name);
}

const FamilyEntry* CoefficientFamily::find(int j) const {
  for (const auto& e : entries)
    if (e.j == j) return &e;
  return nullptr;
}

namespace {

Real signed_pow(const Real& b, int k) {
  // (-b)^k for integer k, b > 0
  Real m = pow(b, k);
  return (k % 2 == 0) ? m : -m;
}

// Largest weight exponent from the report grid whose weighted sums still
// decay at the family's tail, probed over the given k-range.
double delta_max_converged(const CoefficientFamily& fam, int k_lo, int k_hi) {
  static const double grid[] = {0.25, 0.5, 1, 2, 4};
  if (fam.entries.size() < 3) return grid[4];
  double best = 0;
  for (double d : grid) {
    bool ok = true;
    for (int k = k_lo; k <= k_hi && ok; ++k) {
      // terms at the two outermost entries on each side must decrease outward
      auto term = [&](const FamilyEntry& e) {
        return std::pow(2.0, d * std::abs(e.j)) *
               static_cast<double>(abs(e.a) * pow(e.b, k));
      };
      const auto& es = fam.entries;
      std::size_t n = es.size();
      if (term(es[n - 1]) > term(es[n - 2])) ok = false;
      if (es.front().j < 0 && term(es[0]) > term(es[1])) ok = false;
    }
    if (ok && d > best) best = d;
  }
  return best;
}

// Geometric-model estimate of the dropped weighted tail beyond the retained
// entries, per side; `lead` and `prev` are the outermost two weighted terms.
double tail_model(double prev, double lead, bool* converged) {
  if (lead <= 0) return 0;
  if (prev <= 0 || lead >= prev) {
    *converged = false;
    return std::numeric_limits<double>::infinity();
  }
  const double rho = lead / prev;
  return lead * rho / (1.0 - rho);
}

struct SynthesisCore {
  std::vector<Real> taylor;  // one-sided coefficients by index j >= 0
  int iterations = 0;
  double max_ratio = 0;
  double cross_check = 0;
};

SynthesisCore synthesize_taylor(const PrecisionContext& ctx, const Real& beta, int K, int P,
                                bool fixed_point) {
  NodeProduct w(beta, P);
  std::vector<Real> wp = node_derivatives(w, K);

  BoundarySequence u;
  SynthesisCore core;
  if (fixed_point) {
    const Real fp_tol = pow(Real(2), -static_cast<int>(ctx.bits) / 2);
    FixedPointResult fp = fixed_point_boundary(w, wp, K, fp_tol, 0.756);
    u = std::move(fp.u);
    core.iterations = fp.iterations;
    for (double r : fp.ratios) core.max_ratio = std::max(core.max_ratio, r);
  } else {
    u.u.resize(K);
    for (int k = 0; k < K; ++k) u.u[k] = (k % 2 == 0) ? Real(1) : Real(-1);
  }

  std::vector<Real> a = taylor_synthetic(w, wp, u);
  std::vector<Real> b = taylor_series(w, wp, u);
  Real cross = 0;
  for (std::size_t i = 0; i < a.size(); ++i) cross = std::max(cross, abs(a[i] - b[i]));
  core.cross_check = static_cast<double>(cross);
  if (core.cross_check > ctx.tail_tol)
    throw PrecisionError("taylor extraction routes disagree by " +
                         std::to_string(core.cross_check));
  core.taylor = std::move(a);
  return core;
}

// Smallest cutoff J >= jmax such that the directly-summed dropped weighted
// tail max over |k| <= kmax stays below budget; -1 when the coefficient list
// is too short.
int effective_cutoff(const std::vector<Real>& tay, const Real& beta, double delta, int jmax,
                     int kmax, double budget, bool two_sided) {
  const int P = static_cast<int>(tay.size());
  for (int J = std::max(jmax, 1); J < P - 1; ++J) {
    Real worst = 0;
    for (int k = 0; k <= kmax; ++k) {
      Real drop = 0;
      for (int j = J + 1; j < P; ++j) {
        const Real wgt = pow(Real(2), Real(delta) * j) * abs(tay[j]);
        drop += wgt * pow(beta, j * k);
        if (two_sided) drop += wgt * pow(beta, -j * k);
      }
      worst = std::max(worst, drop);
    }
    if (worst <= budget) return J;
  }
  return -1;
}

}  // namespace

CoefficientFamily two_sided_dyadic(const PrecisionContext& ctx, int kmax, double delta) {
  ctx.validate();
  if (kmax < 1) throw ConfigError("two-sided synthesis: kmax must be >= 1");
  require_moment_bits(ctx, kmax, 4.0);
  ScopedPrecision scope(ctx.bits);

  const Real beta = 4;
  const int K = kmax + 8;
  int P = std::max(ctx.product_terms, K + 2);
  const double budget = ctx.tail_tol / 10;

  for (int attempt = 0; attempt < 5; ++attempt) {
    SynthesisCore core = synthesize_taylor(ctx, beta, K, P, /*fixed_point=*/true);
    const int J = effective_cutoff(core.taylor, beta, delta, ctx.jmax, kmax, budget, true);
    if (J < 0) {
      P += 16;  // coefficient list ended before the tail was certified
      continue;
    }
    CoefficientFamily fam;
    fam.kind = FamilyKind::TwoSidedDyadic;
    fam.beta = 4.0;
    fam.delta = delta;
    for (int j = -J; j <= J; ++j) {
      Real a = core.taylor[std::abs(j)];
      if (j == 0) a *= 2;  // node 0 is shared by both one-sided halves
      fam.entries.push_back({j, a, pow(beta, j)});
    }
    fam.meta.bits = ctx.bits;
    fam.meta.jmax_requested = ctx.jmax;
    fam.meta.jmax_effective = J;
    fam.meta.product_terms = P;
    fam.meta.tail_tol = ctx.tail_tol;
    fam.meta.validated_k_lo = -kmax;
    fam.meta.validated_k_hi = kmax;
    fam.meta.iterations = core.iterations;
    fam.meta.max_contraction_ratio = core.max_ratio;
    fam.meta.taylor_cross_check = core.cross_check;

    MomentReport rep = moment_report(fam, -kmax, kmax, ctx.tail_tol);
    if (!rep.pass) throw ToleranceError("two-sided synthesis: moment report failed after tail certification");
    fam.validated = true;
    return fam;
  }
  throw ToleranceError("two-sided synthesis: could not certify tail within product budget");
}

CoefficientFamily one_sided_seeley(const PrecisionContext& ctx, double beta_in, int kmax,
                                   double delta) {
  ctx.validate();
  if (!(beta_in > 1)) throw ConfigError("one-sided synthesis: beta must be > 1");
  if (kmax < 1) throw ConfigError("one-sided synthesis: kmax must be >= 1");
  require_moment_bits(ctx, kmax, beta_in);
  ScopedPrecision scope(ctx.bits);

  const Real beta(beta_in);
  const int K = kmax + 8;
  // Slow bases need more product factors before the coefficient tail clears
  // the tolerance; start from an analytic guess and grow on demand.
  int P = std::max({ctx.product_terms, K + 2,
                    K + static_cast<int>(std::ceil(-std::log2(ctx.tail_tol) /
                                                   std::log2(beta_in))) +
                        8});
  const double budget = ctx.tail_tol / 10;

  for (int attempt = 0; attempt < 5; ++attempt) {
    SynthesisCore core = synthesize_taylor(ctx, beta, K, P, /*fixed_point=*/false);
    const int J = effective_cutoff(core.taylor, beta, delta, ctx.jmax, kmax, budget, false);
    if (J < 0) {
      P += 24;
      continue;
    }
    CoefficientFamily fam;
    fam.kind = FamilyKind::OneSidedSeeley;
    fam.beta = beta_in;
    fam.delta = delta;
    for (int j = 0; j <= J; ++j) fam.entries.push_back({j, core.taylor[j], pow(beta, j)});
    fam.meta.bits = ctx.bits;
    fam.meta.jmax_requested = ctx.jmax;
    fam.meta.jmax_effective = J;
    fam.meta.product_terms = P;
    fam.meta.tail_tol = ctx.tail_tol;
    fam.meta.validated_k_lo = 0;
    fam.meta.validated_k_hi = kmax;
    fam.meta.taylor_cross_check = core.cross_check;

    MomentReport rep = moment_report(fam, 0, kmax, ctx.tail_tol);
    if (!rep.pass) throw ToleranceError("one-sided synthesis: moment report failed after tail certification");
    fam.validated = true;
    return fam;
  }
  throw ToleranceError("one-sided synthesis: could not certify tail within product budget");
}

CoefficientFamily finite_vandermonde(const std::vector<Real>& nodes, int M1, int M2) {
  const int N = static_cast<int>(nodes.size());
  if (M1 < 0 || M2 < 0) throw ConfigError("finite family: M1, M2 must be >= 0");
  if (N != M1 + M2 + 1)
    throw ConfigError("finite family: need exactly M1 + M2 + 1 nodes, got " + std::to_string(N));
  for (int i = 0; i < N; ++i) {
    if (!(nodes[i] > 0)) throw ConfigError("finite family: nodes must be positive");
    for (int k = i + 1; k < N; ++k)
      if (nodes[i] == nodes[k]) throw ConfigError("finite family: nodes must be distinct");
  }

  // Work at >= 256 bits regardless of the ambient default; nodes are re-homed
  // through their exact decimal form.
  const unsigned bits =
      std::max(256u, static_cast<unsigned>(Real::default_precision() * 10 / 3));
  ScopedPrecision scope(bits);
  std::vector<Real> nd;
  nd.reserve(nodes.size());
  for (const auto& n : nodes) nd.emplace_back(n.str());

  CoefficientFamily fam;
  fam.kind = FamilyKind::FiniteVandermonde;
  fam.beta = 0;
  for (int j = 0; j < N; ++j) {
    Real a = signed_pow(nd[j], M1);
    for (int k = 0; k < N; ++k) {
      if (k == j) continue;
      a *= (nd[k] + 1) / (nd[k] - nd[j]);
    }
    fam.entries.push_back({j, a, nd[j]});
  }
  fam.meta.bits = bits;
  fam.meta.jmax_requested = fam.meta.jmax_effective = N - 1;
  fam.meta.tail_tol = 0;
  fam.meta.validated_k_lo = -M1;
  fam.meta.validated_k_hi = M2;
  fam.validated = true;
  return fam;
}

CoefficientFamily finite_dyadic(int m, const Real& r) {
  if (m < 0) throw ConfigError("finite dyadic family: m must be >= 0");
  if (!(r > 0)) throw ConfigError("finite dyadic family: r must be > 0");
  std::vector<Real> nodes;
  Real b = r;
  for (int j = 0; j <= 2 * m; ++j) {
    nodes.push_back(b);
    b /= 2;
  }
  CoefficientFamily fam = finite_vandermonde(nodes, m, m);
  fam.kind = FamilyKind::FiniteDyadic;
  fam.beta = 2;
  return fam;
}

MomentReport moment_report(const CoefficientFamily& fam, int k_lo, int k_hi, double tol) {
  if (fam.entries.empty()) throw ConfigError("moment report: empty family");
  if (k_lo > k_hi) throw ConfigError("moment report: empty k range");
  ScopedPrecision scope(fam.meta.bits ? fam.meta.bits : 256);

  const bool finite_kind =
      fam.kind == FamilyKind::FiniteVandermonde || fam.kind == FamilyKind::FiniteDyadic;
  MomentReport rep;
  rep.tol = tol;
  for (int k = k_lo; k <= k_hi; ++k) {
    MomentRow row;
    row.k = k;
    Real s = 0;
    for (const auto& e : fam.entries) s += e.a * signed_pow(e.b, k);
    const Real resid = abs(s - 1);
    row.residual = static_cast<double>(resid);
    row.residual_str = resid.str();

    if (finite_kind) {
      row.weighted_tail = 0;
      row.tail_converged = true;
    } else {
      auto wterm = [&](const FamilyEntry& e) {
        return static_cast<double>(pow(Real(2), Real(fam.delta) * std::abs(e.j)) * abs(e.a) *
                                   pow(e.b, k));
      };
      const auto& es = fam.entries;
      const std::size_t n = es.size();
      bool conv = true;
      double tail = tail_model(wterm(es[n - 2]), wterm(es[n - 1]), &conv);
      if (es.front().j < 0) tail += tail_model(wterm(es[1]), wterm(es[0]), &conv);
      row.weighted_tail = tail;
      row.tail_converged = conv;
    }

    row.in_validated_range = k >= fam.meta.validated_k_lo && k <= fam.meta.validated_k_hi;
    row.pass = row.residual <= tol && row.tail_converged &&
               (finite_kind || row.weighted_tail <= tol);
    rep.rows.push_back(std::move(row));
  }
  rep.delta_max = finite_kind ? 4.0 : delta_max_converged(fam, k_lo, k_hi);
  rep.pass = true;
  for (const auto& r : rep.rows)
    if (r.in_validated_range && !r.pass) rep.pass = false;
  return rep;
}

CoefficientFamily commuted_family(const CoefficientFamily& fam, int power, bool invert_b) {
  if (power < fam.meta.validated_k_lo || power > fam.meta.validated_k_hi)
    throw ConfigError("commuted family: derivative order " + std::to_string(power) +
                      " outside the validated moment range");
  ScopedPrecision scope(fam.meta.bits ? fam.meta.bits : 256);
  CoefficientFamily out = fam;
  for (auto& e : out.entries) {
    e.a = e.a * signed_pow(e.b, power);
    if (invert_b) e.b = Real(1) / e.b;
  }
  if (invert_b) {
    out.beta = fam.beta > 0 ? 1.0 / fam.beta : 0.0;
    out.meta.validated_k_lo = power - fam.meta.validated_k_hi;
    out.meta.validated_k_hi = power - fam.meta.validated_k_lo;
  } else {
    out.meta.validated_k_lo = fam.meta.validated_k_lo - power;
    out.meta.validated_k_hi = fam.meta.validated_k_hi - power;
  }
  return out;
}

double explicit_norm_constant(const CoefficientFamily& fam, int k, double p) {
  const double invp = std::isinf(p) ? 0.0 : 1.0 / p;
  double s = 0;
  for (const auto& e : fam.entries) {
    const double a = std::abs(static_cast<double>(e.a));
    const double b = static_cast<double>(e.b);
    if (a == 0) continue;
    s += std::pow(2.0, fam.delta * std::abs(e.j)) * a *
         (std::pow(b, -invp) + std::pow(b, k - invp));
  }
  return s;
}

nlohmann::json family_to_json(const CoefficientFamily& fam) {
  json j;
  j["kind"] = kind_name(fam.kind);
  j["beta"] = fam.beta;
  j["delta"] = fam.delta;
  j["validated"] = fam.validated;
  json entries = json::array();
  for (const auto& e : fam.entries) {
    json row;
    row["j"] = e.j;
    row["a"] = e.a.str();
    row["b"] = e.b.str();
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  json meta;
  meta["bits"] = fam.meta.bits;
  meta["jmax_requested"] = fam.meta.jmax_requested;
  meta["jmax_effective"] = fam.meta.jmax_effective;
  meta["product_terms"] = fam.meta.product_terms;
  meta["tail_tol"] = fam.meta.tail_tol;
  meta["validated_k_lo"] = fam.meta.validated_k_lo;
  meta["validated_k_hi"] = fam.meta.validated_k_hi;
  meta["iterations"] = fam.meta.iterations;
  meta["max_contraction_ratio"] = fam.meta.max_contraction_ratio;
  meta["taylor_cross_check"] = fam.meta.taylor_cross_check;
  meta["tool_version"] = fam.meta.tool;
  j["meta"] = std::move(meta);
  return j;
}

CoefficientFamily family_from_json(const nlohmann::json& j) {
  CoefficientFamily fam;
  fam.kind = kind_from_name(j.at("kind").get<std::string>());
  fam.beta = j.at("beta").get<double>();
  fam.delta = j.at("delta").get<double>();
  fam.validated = j.at("validated").get<bool>();
  const auto& meta = j.at("meta");
  fam.meta.bits = meta.at("bits").get<unsigned>();
  fam.meta.jmax_requested = meta.at("jmax_requested").get<int>();
  fam.meta.jmax_effective = meta.at("jmax_effective").get<int>();
  fam.meta.product_terms = meta.at("product_terms").get<int>();
  fam.meta.tail_tol = meta.at("tail_tol").get<double>();
  fam.meta.validated_k_lo = meta.at("validated_k_lo").get<int>();
  fam.meta.validated_k_hi = meta.at("validated_k_hi").get<int>();
  fam.meta.iterations = meta.value("iterations", 0);
  fam.meta.max_contraction_ratio = meta.value("max_contraction_ratio", 0.0);
  fam.meta.taylor_cross_check = meta.value("taylor_cross_check", 0.0);
  fam.meta.tool = meta.value("tool_version", std::string(kToolVersion));

  ScopedPrecision scope(fam.meta.bits ? fam.meta.bits : 256);
  for (const auto& row : j.at("entries")) {
    FamilyEntry e;
    e.j = row.at("j").get<int>();
    e.a = Real(row.at("a").get<std::string>());
    e.b = Real(row.at("b").get<std::string>());
    fam.entries.push_back(std::move(e));
  }
  std::sort(fam.entries.begin(), fam.entries.end(),
            [](const FamilyEntry& x, const FamilyEntry& y) { return x.j < y.j; });
  return fam;
}

nlohmann::json moment_report_to_json(const MomentReport& rep) {
  json j;
  j["tol"] = rep.tol;
  j["delta_max"] = rep.delta_max;
  j["pass"] = rep.pass;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["k"] = r.k;
    row["residual"] = r.residual_str;
    row["residual_double"] = r.residual;
    row["weighted_tail"] = r.weighted_tail;
    row["tail_converged"] = r.tail_converged;
    row["in_validated_range"] = r.in_validated_range;
    row["pass"] = r.pass;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace uext

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uext/domain.hpp"
#include "uext/family.hpp"
#include "uext/grid.hpp"
#include "uext/normlab.hpp"
#include "uext/operators.hpp"

using json = nlohmann::ordered_json;
using namespace uext;

namespace {

// single-writer guard for an output path: <out>.lock created O_CREAT|O_EXCL
class Lockfile {
 public:
  explicit Lockfile(const std::string& target) : path_(target + ".lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) throw ConfigError("output is locked by another writer: " + path_);
    ::close(fd);
  }
  ~Lockfile() { std::remove(path_.c_str()); }
  Lockfile(const Lockfile&) = delete;

 private:
  std::string path_;
};

json report_meta(unsigned bits) {
  json m;
  m["tool_version"] = kToolVersion;
  m["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  m["precision"] = bits ? ("mpfr-" + std::to_string(bits) + "bit") : std::string("binary64");
  return m;
}

void write_json(const std::string& path, const json& j) {
  Lockfile lock(path);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

CoefficientFamily load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient file: " + path);
  json j;
  in >> j;
  return family_from_json(j);
}

std::function<double(Vec2)> builtin_field2(const std::string& name) {
  if (name == "const") return [](Vec2) { return 1.0; };
  if (name == "x1") return [](Vec2 p) { return p.x; };
  if (name == "x2") return [](Vec2 p) { return p.y; };
  if (name == "x1x2") return [](Vec2 p) { return p.x * p.y; };
  if (name == "exp-x1") return [](Vec2 p) { return std::exp(-p.x); };
  if (name == "gaussian") return [](Vec2 p) { return std::exp(-(p.x * p.x + p.y * p.y)); };
  throw ConfigError("unknown 2-d builtin: " + name);
}

PlanarDomain shape_by_name(const std::string& shape, std::optional<double> t_max) {
  if (shape == "disk") return make_disk(t_max.value_or(0.3));
  if (shape == "ellipse") return make_ellipse(1.3, 0.8, t_max.value_or(0.3));
  if (shape == "star") return make_star(0.15, 3, t_max.value_or(0.25));
  throw ConfigError("unknown shape: " + shape);
}

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_pass(bool pass, const std::string& what) {
  if (!pass) throw CheckFailure(what + ": FAIL");
}

std::vector<Real> parse_nodes(const std::string& csv) {
  std::vector<Real> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.emplace_back(tok);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reflection-family extension operator toolkit"};
  app.require_subcommand(1);

  unsigned bits = 512;
  int jmax = 20;
  double tol = 1e-30;
  std::string out_path;
  unsigned seed = 1;
  app.add_option("--bits", bits, "working mantissa bits for synthesis");
  app.add_option("--jmax", jmax, "baseline index cutoff");
  app.add_option("--tol", tol, "tail / moment tolerance");
  app.add_option("--out", out_path, "output file");
  app.add_option("--seed", seed, "seed for the probe function family");

  // ---- coeffs ----
  auto* coeffs = app.add_subcommand("coeffs", "coefficient family synthesis and checks");
  auto* gen = coeffs->add_subcommand("gen", "synthesize a family and write JSON + report");
  std::string kind = "two-sided";
  int kmax = 10, m1 = 0, m2 = 1, dy_m = 1;
  double beta = 2, delta = 0.5;
  std::string nodes_csv, dy_r = "1";
  gen->add_option("--kind", kind, "two-sided | seeley | vandermonde | dyadic");
  gen->add_option("--kmax", kmax, "validated moment range half-width");
  gen->add_option("--beta", beta, "node base (seeley)");
  gen->add_option("--delta", delta, "weight exponent recorded with the family");
  gen->add_option("--nodes", nodes_csv, "comma-separated nodes (vandermonde)");
  gen->add_option("--m1", m1, "negative moment count (vandermonde)");
  gen->add_option("--m2", m2, "positive moment count (vandermonde)");
  gen->add_option("--m", dy_m, "dyadic family order");
  gen->add_option("--r", dy_r, "dyadic family scale");

  auto* check = coeffs->add_subcommand("check", "re-validate a coefficient file");
  std::string in_path;
  int ck_lo = 0, ck_hi = 0;
  bool ck_range_set = false;
  check->add_option("--in", in_path, "coefficient JSON")->required();
  auto* cklo = check->add_option("--kmin", ck_lo, "lowest moment to check");
  check->add_option("--kmax", ck_hi, "highest moment to check");
  (void)cklo;
  check->callback([&] { ck_range_set = check->count("--kmin") || check->count("--kmax"); });

  // ---- extend ----
  auto* ext = app.add_subcommand("extend", "apply the extension operator");
  std::string coeff_path, f_spec = "builtin:exp-decay", grid_in, range = "-2:2", policy = "error";
  double h = 0.01;
  int order = 4;
  ext->add_option("--coeffs", coeff_path, "coefficient JSON")->required();
  ext->add_option("--f", f_spec, "builtin:<name> callable input");
  ext->add_option("--grid", grid_in, "sampled half-grid CSV input");
  ext->add_option("--spacing", h, "grid spacing");
  ext->add_option("--range", range, "output range lo:hi");
  ext->add_option("--order", order, "interpolation order (grid mode)");
  ext->add_option("--policy", policy, "out-of-range policy: error | zero-pad | decay-model");

  // ---- probe ----
  auto* probe = app.add_subcommand("probe", "operator-norm and structure probes");
  probe->require_subcommand(1);
  double pr_p = 2, pr_q = 2, pr_s = 0.5;
  int pr_k = 0;
  std::string pr_coeffs;
  for (auto* sub : {probe->add_subcommand("sobolev"), probe->add_subcommand("lp"),
                    probe->add_subcommand("holder"), probe->add_subcommand("besov"),
                    probe->add_subcommand("dilation"), probe->add_subcommand("boundary"),
                    probe->add_subcommand("adjoint")}) {
    sub->add_option("--coeffs", pr_coeffs, "coefficient JSON")->required();
    sub->add_option("--p", pr_p, "integrability exponent (inf accepted as 0)");
    sub->add_option("--q", pr_q, "besov second exponent");
    sub->add_option("--s", pr_s, "smoothness (besov/holder)");
    sub->add_option("--k", pr_k, "derivative order");
  }

  // ---- domain ----
  auto* dom = app.add_subcommand("domain", "bounded-domain extension");
  dom->require_subcommand(1);
  auto* dext = dom->add_subcommand("extend", "write the extended field on a bounding box");
  auto* ddep = dom->add_subcommand("depend", "normal-ray locality suite");
  std::string shape = "disk", dspec, f2 = "x1";
  std::optional<double> t_max_opt;
  double tube_width = 0;
  int nx = 101, ny = 101, cases = 20;
  for (auto* sub : {dext, ddep}) {
    sub->add_option("--shape", shape, "disk | ellipse | star");
    sub->add_option("--spec", dspec, "domain spec JSON (overrides --shape)");
    sub->add_option("--coeffs", pr_coeffs, "coefficient JSON")->required();
    sub->add_option("--t-max", tube_width, "tube half-width");
  }
  dext->add_option("--f", f2, "2-d builtin: const | x1 | x2 | x1x2 | exp-x1 | gaussian");
  dext->add_option("--nx", nx, "grid columns");
  dext->add_option("--ny", ny, "grid rows");
  ddep->add_option("--cases", cases, "number of disjoint-bump cases");

  // let --bits/--jmax/--tol/--out/--seed appear after any subcommand
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
    a->fallthrough();
    for (auto* sub : a->get_subcommands({})) enable_fallthrough(sub);
  };
  enable_fallthrough(&app);

  CLI11_PARSE(app, argc, argv);
  if (dext->count("--t-max") || ddep->count("--t-max")) t_max_opt = tube_width;

  try {
    const double p_eff = pr_p == 0 ? std::numeric_limits<double>::infinity() : pr_p;

    if (gen->parsed()) {
      PrecisionContext ctx{bits, jmax, std::max(40, jmax + 2), tol};
      CoefficientFamily fam;
      if (kind == "two-sided") {
        fam = two_sided_dyadic(ctx, kmax, delta);
      } else if (kind == "seeley") {
        fam = one_sided_seeley(ctx, beta, kmax, delta);
      } else if (kind == "vandermonde") {
        ScopedPrecision scope(bits);
        fam = finite_vandermonde(parse_nodes(nodes_csv), m1, m2);
      } else if (kind == "dyadic") {
        ScopedPrecision scope(bits);
        fam = finite_dyadic(dy_m, Real(dy_r));
      } else {
        throw ConfigError("unknown family kind: " + kind);
      }
      MomentReport rep =
          moment_report(fam, fam.meta.validated_k_lo, fam.meta.validated_k_hi,
                        fam.kind == FamilyKind::FiniteVandermonde ||
                                fam.kind == FamilyKind::FiniteDyadic
                            ? 1e-20
                            : tol);
      const std::string fam_path = out_path.empty() ? "coeffs.json" : out_path;
      write_json(fam_path, family_to_json(fam));
      json jr = moment_report_to_json(rep);
      jr["meta"] = report_meta(fam.meta.bits);
      write_json(fam_path + ".report.json", jr);
      std::cout << "family " << kind_name(fam.kind) << ": " << fam.entries.size()
                << " entries, report " << (rep.pass ? "PASS" : "FAIL") << "\n";
      require_pass(rep.pass, "moment report");
      return 0;
    }

    if (check->parsed()) {
      CoefficientFamily fam = load_family(in_path);
      const int lo = ck_range_set ? ck_lo : fam.meta.validated_k_lo;
      const int hi = ck_range_set ? ck_hi : fam.meta.validated_k_hi;
      MomentReport rep = moment_report(fam, lo, hi, tol);
      json jr = moment_report_to_json(rep);
      jr["meta"] = report_meta(fam.meta.bits);
      if (!out_path.empty()) write_json(out_path, jr);
      std::cout << "moment check k in [" << lo << ", " << hi << "]: "
                << (rep.pass ? "PASS" : "FAIL") << "\n";
      require_pass(rep.pass, "moment check");
      return 0;
    }

    if (ext->parsed()) {
      CoefficientFamily fam = load_family(coeff_path);
      const auto view = family_view<double>(fam);
      const auto colon = range.find(':');
      if (colon == std::string::npos) throw ConfigError("range must be lo:hi");
      const double lo = std::stod(range.substr(0, colon));
      const double hi = std::stod(range.substr(colon + 1));
      if (!(lo < 0) || !(hi > 0)) throw ConfigError("range must straddle 0");
      const std::string path = out_path.empty() ? "extended.csv" : out_path;
      Lockfile lock(path);

      if (!grid_in.empty()) {
        Grid1 g = read_grid1_csv(grid_in);
        InterpPlan plan;
        plan.order = order;
        plan.policy = policy == "zero-pad"      ? RangePolicy::ZeroPad
                      : policy == "decay-model" ? RangePolicy::DecayModel
                                                : RangePolicy::Error;
        InterpReport irep;
        Grid1 full = extend_grid(view, g, static_cast<int>(-lo / g.h) + 1, plan, &irep);
        write_grid_csv(path, full);
        std::cout << "extended grid written: " << path
                  << " (max stencil error estimate " << irep.max_stencil_error << ")\n";
      } else {
        if (f_spec.rfind("builtin:", 0) != 0)
          throw ConfigError("--f expects builtin:<name>, got " + f_spec);
        auto f = builtin_field<double>(f_spec.substr(8));
        Grid1 full;
        full.h = h;
        full.origin = std::floor(lo / h) * h;
        full.half = false;
        full.v.resize(static_cast<int>((hi - full.origin) / h) + 1);
        for (int i = 0; i < full.size(); ++i) full.v[i] = extend_point(view, f, full.x(i));
        write_grid_csv(path, full);
        std::cout << "extended field written: " << path << "\n";
      }
      return 0;
    }

    if (probe->parsed()) {
      CoefficientFamily fam = load_family(pr_coeffs);
      auto* sub = probe->get_subcommands().front();
      const std::string which = sub->get_name();
      json jr;
      bool pass = false;

      if (which == "sobolev" || which == "lp" || which == "holder" || which == "besov") {
        NormSpec spec;
        spec.p = p_eff;
        spec.q = pr_q;
        if (which == "lp") {
          spec.family = NormFamily::Lp;
        } else if (which == "sobolev") {
          spec.family = NormFamily::Sobolev;
          spec.order = pr_k;
        } else if (which == "holder") {
          spec.family = NormFamily::Holder;
          spec.order = pr_k;
          spec.holder_s = pr_s;
          spec.p = std::numeric_limits<double>::infinity();
        } else {
          spec.family = NormFamily::Besov;
          spec.order = pr_s;
        }
        ProbeReport rep = operator_norm_probe(fam, spec, build_test_family(seed));
        jr = probe_report_to_json(rep);
        pass = rep.pass;
      } else if (which == "dilation") {
        NormSpec spec;
        spec.family = pr_k > 0 ? NormFamily::Sobolev : NormFamily::Lp;
        spec.order = pr_k;
        spec.p = p_eff;
        DilationReport rep = dilation_growth_probe(spec, make_gaussian(0.0, 1.0));
        jr = dilation_report_to_json(rep);
        pass = rep.pass;
      } else if (which == "boundary") {
        BoundaryReport rep = boundary_smoothness_report(fam, builtin_field<Real>("exp-decay"),
                                                        pr_k > 0 ? pr_k : 6, {1e-2, 1e-3});
        jr = boundary_report_to_json(rep);
        pass = rep.pass;
      } else {  // adjoint
        DualityReport dual = adjoint_duality_probe(fam, make_gaussian(0.0, 1.0),
                                                   make_gaussian<double>(0.25, 1.0));
        FlatnessReport flat = adjoint_flatness_probe(fam, make_gaussian(0.0, 32.0));
        jr["duality"] = duality_report_to_json(dual);
        jr["flatness"] = flatness_report_to_json(flat);
        pass = dual.pass && flat.pass;
      }

      jr["meta"] = report_meta(0);
      if (!out_path.empty()) write_json(out_path, jr);
      std::cout << "probe " << which << ": " << (pass ? "PASS" : "FAIL") << "\n";
      require_pass(pass, "probe " + which);
      return 0;
    }

    if (dext->parsed() || ddep->parsed()) {
      CoefficientFamily fam = load_family(pr_coeffs);
      PlanarDomain d;
      if (!dspec.empty()) {
        std::ifstream in(dspec);
        if (!in) throw ConfigError("cannot open domain spec: " + dspec);
        json js;
        in >> js;
        d = domain_from_json(js);
      } else {
        d = shape_by_name(shape, t_max_opt);
      }
      DomainExtensionHandle handle(std::move(d), std::move(fam));

      if (dext->parsed()) {
        const std::string path = out_path.empty() ? "domain_field.csv" : out_path;
        write_domain_field_csv(path, handle, builtin_field2(f2), nx, ny);
        std::cout << "domain field written: " << path << "\n";
        return 0;
      }

      // dependence suite: evaluation points around the outer tube, bumps well
      // inside; one on-ray control case appended
      auto f = builtin_field2("gaussian");
      json rows = json::array();
      bool all = true;
      for (int i = 0; i < cases; ++i) {
        const double th = 2 * M_PI * i / cases;
        const Vec2 bc = 0.35 * Vec2{std::cos(th + 2.1), std::sin(th + 2.1)};
        const Vec2 xe = handle.chart.forward(th, -0.5);
        DependenceCase c = curve_dependence_check(handle, f, xe, bc, 0.1, 1e-12);
        json row;
        row["theta"] = th;
        row["difference"] = c.difference;
        row["margin"] = c.margin;
        row["disjoint"] = c.disjoint;
        row["pass"] = c.pass;
        rows.push_back(std::move(row));
        all = all && c.pass && c.disjoint;
      }
      {
        const Vec2 xe = handle.chart.forward(0.0, -0.5);
        const Vec2 on_ray = handle.chart.forward(0.0, 0.3);
        DependenceCase c = curve_dependence_check(handle, f, xe, on_ray, 0.1, 1e-12);
        json row;
        row["control"] = true;
        row["difference"] = c.difference;
        row["pass"] = c.pass;
        rows.push_back(std::move(row));
        all = all && c.pass;
      }
      json jr;
      jr["rows"] = std::move(rows);
      jr["pass"] = all;
      jr["meta"] = report_meta(0);
      if (!out_path.empty()) write_json(out_path, jr);
      std::cout << "dependence suite: " << (all ? "PASS" : "FAIL") << "\n";
      require_pass(all, "dependence suite");
      return 0;
    }

    throw ConfigError("no subcommand dispatched");
  } catch (const CheckFailure&) {
    // the failing check already reported itself on stdout
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "uext/operators.hpp"

namespace uext {

struct Vec2 {
  double x = 0, y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

// Closed curve as truncated trigonometric series: component c(theta) =
// cos_coeffs[0] + sum_k cos_coeffs[k] cos(k theta) + sin_coeffs[k] sin(k theta).
struct TrigCurve {
  std::vector<double> xc, xs, yc, ys;

  Vec2 point(double theta) const;
  Vec2 d1(double theta) const;
  Vec2 d2(double theta) const;
};

// Bounded domain enclosed by a simple smooth curve, oriented counterclockwise
// (interior on the left). `t_max` scales the tubular coordinate: chart
// parameter t = +/-1 maps to distance t_max from the boundary.
struct PlanarDomain {
  TrigCurve curve;
  double t_max = 0.3;
  bool interior_left = true;

  double reach_estimate = 0;          // filled by validate()
  std::vector<Vec2> boundary_poly;    // cached fine polygon for point tests

  // Checks |gamma'| > 0, simplicity, and t_max < reach on >= 1024 samples;
  // throws ConfigError on violation.
  void validate(int samples = 2048);

  Vec2 outward_normal(double theta) const;
  bool contains(Vec2 p) const;  // winding-number test on a fine polygon
};

PlanarDomain make_disk(double t_max = 0.3);
PlanarDomain make_ellipse(double a = 1.3, double b = 0.8, double t_max = 0.3);
PlanarDomain make_star(double amplitude = 0.15, int modes = 3, double t_max = 0.25);

PlanarDomain domain_from_json(const nlohmann::json& j);
nlohmann::json domain_to_json(const PlanarDomain& d);

// Normal-exponential chart (theta, t) -> gamma(theta) - t*t_max*nu_out(theta);
// t > 0 inside the domain. Inverse by coarse scan + damped Newton on the
// projection equation (x - gamma(theta)) . gamma'(theta) = 0.
struct TubularChart {
  const PlanarDomain* dom = nullptr;
  double tol = 1e-12;
  int max_iter = 60;
  int scan_nodes = 256;

  Vec2 forward(double theta, double t) const;
  // Returns false when x lies outside the tube |t| < 1.
  bool inverse(Vec2 x, double& theta, double& t) const;
};

// Smooth plateau/support profiles in the chart coordinate t:
//   chi0: 1 on [-1/2,1/2], 0 outside (-3/4, 3/4)
//   chi1: 1 on [-3/4,3/4], 0 outside (-7/8, 7/8)   (== 1 on supp chi0)
//   chi2: 1 on [-7/8,7/8], 0 outside (-15/16, 15/16) (== 1 on supp chi1)
// built from the exp(-1/t) mollified step.
struct CutoffProfile {
  double chi(int i, double t) const;
  static double plateau(int i);
  static double support(int i);
};

enum class PointClass { InsideBeyondTube, InsideTube, OutsideTube, OutsideBeyondTube };

struct DomainExtensionHandle {
  PlanarDomain dom;
  TubularChart chart;  // chart.dom points into this->dom
  CutoffProfile cut;
  CoefficientFamily fam;
  FamilyView<double> view;

  DomainExtensionHandle(PlanarDomain d, CoefficientFamily f);
  DomainExtensionHandle(const DomainExtensionHandle&) = delete;

  PointClass classify(Vec2 x, double* theta = nullptr, double* t = nullptr) const;

  // Extension of f (defined on the closed domain): f(x) exactly inside; the
  // finite cutoff-weighted reflection sum in the outer tube; 0 beyond.
  double extend(const std::function<double(Vec2)>& f, Vec2 x) const;

  // Normal-direction dependence field X = -chi2(t) * t_max * nu_out(theta);
  // zero outside the tube.
  Vec2 dependence_field(Vec2 x) const;
};

struct DependenceCase {
  Vec2 x;            // exterior evaluation point
  Vec2 bump_center;
  double bump_radius = 0;
  double difference = 0;  // |E(f + bump)(x) - Ef(x)|
  double margin = 0;      // clearance between bump support and the normal ray
  bool disjoint = false;
  bool pass = false;
};

// Locality check: perturbing f by a bump supported away from the normal ray
// through x must leave the extension at x unchanged (<= tol); the control
// case places the bump on the ray and must move the value.
DependenceCase curve_dependence_check(const DomainExtensionHandle& h,
                                      const std::function<double(Vec2)>& f, Vec2 x,
                                      Vec2 bump_center, double bump_radius, double tol);

// Bounding-box field sample with inside/outside/tube mask, written in the
// grid CSV format plus x,y,value,mask rows.
void write_domain_field_csv(const std::string& path, const DomainExtensionHandle& h,
                            const std::function<double(Vec2)>& f, int nx, int ny);

}  // namespace uext

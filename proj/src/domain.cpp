#include "uext/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <nlohmann/json.hpp>

namespace uext {

using json = nlohmann::ordered_json;

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

namespace {

double series_eval(const std::vector<double>& c, const std::vector<double>& s, double th,
                   int order) {
  const std::size_t n = std::max(c.size(), s.size());
  double acc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ck = k < c.size() ? c[k] : 0;
    const double sk = k < s.size() ? s[k] : 0;
    if (k == 0) {
      if (order == 0) acc += ck;
      continue;
    }
    const double kd = static_cast<double>(k);
    const double co = std::cos(kd * th), si = std::sin(kd * th);
    switch (order) {
      case 0: acc += ck * co + sk * si; break;
      case 1: acc += kd * (-ck * si + sk * co); break;
      case 2: acc += kd * kd * (-ck * co - sk * si); break;
      default: throw ConfigError("curve derivative order not supported");
    }
  }
  return acc;
}

double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

Vec2 TrigCurve::point(double th) const {
  return {series_eval(xc, xs, th, 0), series_eval(yc, ys, th, 0)};
}
Vec2 TrigCurve::d1(double th) const {
  return {series_eval(xc, xs, th, 1), series_eval(yc, ys, th, 1)};
}
Vec2 TrigCurve::d2(double th) const {
  return {series_eval(xc, xs, th, 2), series_eval(yc, ys, th, 2)};
}

void PlanarDomain::validate(int samples) {
  if (samples < 1024) samples = 1024;
  if (!(t_max > 0)) throw ConfigError("domain: t_max must be positive");
  if (!interior_left)
    throw ConfigError("domain: clockwise parametrizations are not supported");

  double min_speed = std::numeric_limits<double>::infinity();
  double min_curv_radius = std::numeric_limits<double>::infinity();
  std::vector<Vec2> pts(samples);
  for (int i = 0; i < samples; ++i) {
    const double th = 2 * M_PI * i / samples;
    pts[i] = curve.point(th);
    const Vec2 v = curve.d1(th), a = curve.d2(th);
    const double sp = norm(v);
    min_speed = std::min(min_speed, sp);
    const double cr = std::abs(cross(v, a));
    if (cr > 1e-14) min_curv_radius = std::min(min_curv_radius, sp * sp * sp / cr);
  }
  if (!(min_speed > 1e-9)) throw ConfigError("domain: boundary parametrization stalls");

  // the interior-on-the-left contract is geometric, not declarative: the
  // signed area must come out positive (counterclockwise traversal)
  double signed_area = 0;
  for (int i = 0; i < samples; ++i) signed_area += cross(pts[i], pts[(i + 1) % samples]);
  if (!(signed_area > 0))
    throw ConfigError("domain: boundary must be traversed counterclockwise");

  // far-segment clearance: distance between samples more than 1/8 turn apart
  double min_far = std::numeric_limits<double>::infinity();
  const int gap = samples / 8;
  const int stride = std::max(1, samples / 1024);
  for (int i = 0; i < samples; i += stride) {
    for (int j = i + gap; j <= i + samples - gap; j += stride) {
      const double d = norm(pts[i] - pts[j % samples]);
      min_far = std::min(min_far, d);
    }
  }
  if (!(min_far > 1e-9)) throw ConfigError("domain: boundary self-intersects");

  reach_estimate = std::min(min_curv_radius, min_far / 2);
  if (!(t_max < reach_estimate))
    throw ConfigError("domain: t_max " + std::to_string(t_max) +
                      " is not below the reach estimate " + std::to_string(reach_estimate));

  boundary_poly.resize(4096);
  for (int i = 0; i < 4096; ++i) boundary_poly[i] = curve.point(2 * M_PI * i / 4096);
}

Vec2 PlanarDomain::outward_normal(double theta) const {
  const Vec2 v = curve.d1(theta);
  const double sp = norm(v);
  return {v.y / sp, -v.x / sp};
}

bool PlanarDomain::contains(Vec2 p) const {
  if (boundary_poly.empty()) throw ConfigError("domain: validate() must run before point tests");
  bool in = false;
  const std::size_t n = boundary_poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = boundary_poly[i], b = boundary_poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      in = !in;
  }
  return in;
}

PlanarDomain make_disk(double t_max) {
  PlanarDomain d;
  d.curve.xc = {0, 1};
  d.curve.xs = {0, 0};
  d.curve.yc = {0, 0};
  d.curve.ys = {0, 1};
  d.t_max = t_max;
  d.validate();
  return d;
}

PlanarDomain make_ellipse(double a, double b, double t_max) {
  PlanarDomain d;
  d.curve.xc = {0, a};
  d.curve.xs = {0, 0};
  d.curve.yc = {0, 0};
  d.curve.ys = {0, b};
  d.t_max = t_max;
  d.validate();
  return d;
}

PlanarDomain make_star(double amplitude, int modes, double t_max) {
  // r(th) = 1 + amplitude*cos(modes*th); products collapse to sidebands at
  // modes -+ 1
  PlanarDomain d;
  const int m = modes;
  d.curve.xc.assign(m + 2, 0.0);
  d.curve.xs.assign(m + 2, 0.0);
  d.curve.yc.assign(m + 2, 0.0);
  d.curve.ys.assign(m + 2, 0.0);
  d.curve.xc[1] = 1;
  d.curve.ys[1] = 1;
  d.curve.xc[m - 1] += amplitude / 2;
  d.curve.xc[m + 1] += amplitude / 2;
  d.curve.ys[m - 1] -= amplitude / 2;
  d.curve.ys[m + 1] += amplitude / 2;
  d.t_max = t_max;
  d.validate();
  return d;
}

PlanarDomain domain_from_json(const nlohmann::json& j) {
  PlanarDomain d;
  const auto& fc = j.at("fourier-coefficients");
  d.curve.xc = fc.at("xc").get<std::vector<double>>();
  d.curve.xs = fc.at("xs").get<std::vector<double>>();
  d.curve.yc = fc.at("yc").get<std::vector<double>>();
  d.curve.ys = fc.at("ys").get<std::vector<double>>();
  d.t_max = j.at("t_max").get<double>();
  d.interior_left = j.value("orientation", std::string("ccw")) == "ccw";
  d.validate();
  return d;
}

nlohmann::json domain_to_json(const PlanarDomain& d) {
  json j;
  json fc;
  fc["xc"] = d.curve.xc;
  fc["xs"] = d.curve.xs;
  fc["yc"] = d.curve.yc;
  fc["ys"] = d.curve.ys;
  j["fourier-coefficients"] = std::move(fc);
  j["t_max"] = d.t_max;
  j["orientation"] = d.interior_left ? "ccw" : "cw";
  j["reach_estimate"] = d.reach_estimate;
  return j;
}

Vec2 TubularChart::forward(double theta, double t) const {
  return dom->curve.point(theta) - (t * dom->t_max) * dom->outward_normal(theta);
}

bool TubularChart::inverse(Vec2 x, double& theta, double& t) const {
  // coarse seed
  double best = std::numeric_limits<double>::infinity();
  double th = 0;
  for (int i = 0; i < scan_nodes; ++i) {
    const double cand = 2 * M_PI * i / scan_nodes;
    const Vec2 d = x - dom->curve.point(cand);
    const double q = dot(d, d);
    if (q < best) {
      best = q;
      th = cand;
    }
  }

  // damped Newton on the projection equation (x - gamma(th)) . gamma'(th) = 0
  auto h = [&](double a) { return dot(x - dom->curve.point(a), dom->curve.d1(a)); };
  for (int it = 0; it < max_iter; ++it) {
    const Vec2 g1 = dom->curve.d1(th);
    const double hv = h(th);
    const double hp = -dot(g1, g1) + dot(x - dom->curve.point(th), dom->curve.d2(th));
    if (hp == 0) return false;
    double step = -hv / hp;
    double damp = 1;
    while (damp > 1e-4 && std::abs(h(th + damp * step)) > 0.9 * std::abs(hv)) damp /= 2;
    th += damp * step;
    if (std::abs(damp * step) < tol) break;
  }
  th = std::fmod(std::fmod(th, 2 * M_PI) + 2 * M_PI, 2 * M_PI);

  const Vec2 nu = dom->outward_normal(th);
  t = dot(dom->curve.point(th) - x, nu) / dom->t_max;
  if (std::abs(t) >= 1) return false;
  // the residual orthogonal to the normal must vanish at the true projection
  if (norm(x - forward(th, t)) > 1e-8 * (1 + norm(x))) return false;
  theta = th;
  return true;
}

double CutoffProfile::plateau(int i) {
  switch (i) {
    case 0: return 0.5;
    case 1: return 0.75;
    case 2: return 0.875;
  }
  throw ConfigError("cutoff index must be 0, 1, or 2");
}

double CutoffProfile::support(int i) {
  switch (i) {
    case 0: return 0.75;
    case 1: return 0.875;
    case 2: return 0.9375;
  }
  throw ConfigError("cutoff index must be 0, 1, or 2");
}

double CutoffProfile::chi(int i, double t) const {
  const double p = plateau(i), s = support(i);
  const double a = std::abs(t);
  if (a <= p) return 1;
  if (a >= s) return 0;
  return smooth_step((s - a) / (s - p));
}

DomainExtensionHandle::DomainExtensionHandle(PlanarDomain d, CoefficientFamily f)
    : dom(std::move(d)), fam(std::move(f)) {
  if (dom.boundary_poly.empty()) dom.validate();
  if (!fam.validated) throw ConfigError("domain extension needs a validated family");
  chart.dom = &dom;
  view = family_view<double>(fam);
}

PointClass DomainExtensionHandle::classify(Vec2 x, double* theta, double* t) const {
  double th = 0, tt = 0;
  if (chart.inverse(x, th, tt)) {
    if (theta) *theta = th;
    if (t) *t = tt;
    return tt >= 0 ? PointClass::InsideTube : PointClass::OutsideTube;
  }
  return dom.contains(x) ? PointClass::InsideBeyondTube : PointClass::OutsideBeyondTube;
}

double DomainExtensionHandle::extend(const std::function<double(Vec2)>& f, Vec2 x) const {
  double th = 0, t = 0;
  switch (classify(x, &th, &t)) {
    case PointClass::InsideBeyondTube:
    case PointClass::InsideTube:
      return f(x);  // both cutoff branches sum to the identity inside
    case PointClass::OutsideBeyondTube:
      return 0;
    case PointClass::OutsideTube: {
      const double outer = cut.chi(1, t);
      if (outer == 0) return 0;
      double acc = 0;
      for (std::size_t i = 0; i < view.size(); ++i) {
        const double s = -view.b[i] * t;  // reflected chart coordinate, > 0
        const double c0 = cut.chi(0, s);
        if (c0 == 0) continue;
        acc += view.a[i] * c0 * f(chart.forward(th, s));
      }
      return outer * acc;
    }
  }
  return 0;
}

Vec2 DomainExtensionHandle::dependence_field(Vec2 x) const {
  double th = 0, t = 0;
  const PointClass c = classify(x, &th, &t);
  if (c != PointClass::InsideTube && c != PointClass::OutsideTube) return {0, 0};
  const double w = cut.chi(2, t);
  return (-w * dom.t_max) * dom.outward_normal(th);
}

DependenceCase curve_dependence_check(const DomainExtensionHandle& h,
                                      const std::function<double(Vec2)>& f, Vec2 x,
                                      Vec2 bump_center, double bump_radius, double tol) {
  DependenceCase out;
  out.x = x;
  out.bump_center = bump_center;
  out.bump_radius = bump_radius;

  double th = 0, t = 0;
  if (h.classify(x, &th, &t) != PointClass::OutsideTube)
    throw ConfigError("dependence check: evaluation point must lie in the outer tube");

  // clearance between the bump support and the in-domain normal ray at theta(x)
  double clearance = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double s = 0.9999 * i / 400;
    clearance = std::min(clearance, norm(h.chart.forward(th, s) - bump_center));
  }
  out.margin = clearance - bump_radius;
  out.disjoint = out.margin > 0;

  auto bump = [&](Vec2 p) {
    const Vec2 d = p - bump_center;
    const double u2 = dot(d, d) / (bump_radius * bump_radius);
    return u2 < 1 ? std::exp(-1.0 / (1.0 - u2)) : 0.0;
  };
  auto fp = [&](Vec2 p) { return f(p) + bump(p); };
  out.difference = std::abs(h.extend(fp, x) - h.extend(f, x));
  out.pass = out.disjoint ? out.difference <= tol : out.difference > 1e-6;
  return out;
}

void write_domain_field_csv(const std::string& path, const DomainExtensionHandle& h,
                            const std::function<double(Vec2)>& f, int nx, int ny) {
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const Vec2& p : h.dom.boundary_poly) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double pad = 1.5 * h.dom.t_max;
  lo_x -= pad;
  hi_x += pad;
  lo_y -= pad;
  hi_y += pad;
  const double hx = (hi_x - lo_x) / (nx - 1), hy = (hi_y - lo_y) / (ny - 1);

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << std::setprecision(17);
  out << "# dim=2, h=" << hx << " " << hy << ", origin=" << lo_x << " " << lo_y << ", full\n";
  out << "# columns: x,y,value,mask  (mask: 2 inside, 1 inside tube, -1 outside tube, -2 "
         "outside)\n";
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Vec2 p{lo_x + ix * hx, lo_y + iy * hy};
      int mask = 0;
      switch (h.classify(p)) {
        case PointClass::InsideBeyondTube: mask = 2; break;
        case PointClass::InsideTube: mask = 1; break;
        case PointClass::OutsideTube: mask = -1; break;
        case PointClass::OutsideBeyondTube: mask = -2; break;
      }
      out << p.x << "," << p.y << "," << h.extend(f, p) << "," << mask << "\n";
    }
  }
}

}  // namespace uext

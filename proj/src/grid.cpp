#include "uext/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace uext {

Grid1 sample_grid1(const std::function<double(double)>& f, double h, double origin, int n,
                   bool half) {
  if (h <= 0 || n < 2) throw ConfigError("grid sample: need h > 0 and n >= 2");
  if (half && origin != 0) throw ConfigError("grid sample: half grids start at 0");
  Grid1 g;
  g.h = h;
  g.origin = origin;
  g.half = half;
  g.v.resize(n);
  for (int i = 0; i < n; ++i) g.v[i] = f(g.x(i));
  return g;
}

namespace {

std::string header_line(int dim, const std::string& h, const std::string& origin, bool half) {
  std::ostringstream os;
  os << "# dim=" << dim << ", h=" << h << ", origin=" << origin << ", "
     << (half ? "half" : "full");
  return os.str();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

void write_grid_csv(const std::string& path, const Grid1& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << header_line(1, fmt(g.h), fmt(g.origin), g.half) << "\n";
  for (double v : g.v) out << fmt(v) << "\n";
}

void write_grid_csv(const std::string& path, const Grid2& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << header_line(2, fmt(g.ht) + " " + fmt(g.hn), fmt(g.ot) + " " + fmt(g.on), g.half)
      << "\n";
  for (int r = 0; r < g.nt; ++r) {
    for (int c = 0; c < g.nn; ++c) {
      if (c) out << ",";
      out << fmt(g.at(r, c));
    }
    out << "\n";
  }
}

Grid1 read_grid1_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw ConfigError("grid file missing header: " + path);

  Grid1 g;
  bool have_dim = false;
  std::stringstream hs(line.substr(1));
  std::string tok;
  while (std::getline(hs, tok, ',')) {
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    tok = trim(tok);
    if (tok.rfind("dim=", 0) == 0) {
      if (std::stoi(tok.substr(4)) != 1) throw ConfigError("only dim=1 grid files are readable");
      have_dim = true;
    } else if (tok.rfind("h=", 0) == 0) {
      g.h = std::stod(tok.substr(2));
    } else if (tok.rfind("origin=", 0) == 0) {
      g.origin = std::stod(tok.substr(7));
    } else if (tok == "half") {
      g.half = true;
    } else if (tok == "full") {
      g.half = false;
    }
  }
  if (!have_dim || g.h <= 0) throw ConfigError("malformed grid header: " + line);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    g.v.push_back(std::stod(line));
  }
  if (g.v.size() < 2) throw ConfigError("grid file has fewer than 2 values");
  return g;
}

namespace {

// Newton divided-difference leading coefficient over the given nodes.
double divided_difference(const Grid1& g, int i0, int npts) {
  std::vector<double> d(g.v.begin() + i0, g.v.begin() + i0 + npts);
  for (int lvl = 1; lvl < npts; ++lvl)
    for (int i = npts - 1; i >= lvl; --i)
      d[i] = (d[i] - d[i - 1]) / (g.x(i0 + i) - g.x(i0 + i - lvl));
  return d[npts - 1];
}

double edge_model_value(const Grid1& g, double x, const InterpPlan& plan) {
  if (plan.decay_model) return plan.decay_model(x);
  // Geometric continuation fitted to the last two samples; collapses to 0
  // when the data is not positive-decreasing.
  const int n = g.size();
  const double v1 = g.v[n - 1], v0 = g.v[n - 2];
  if (!(v1 > 0) || !(v0 > 0) || v1 >= v0) return 0;
  const double rho = v1 / v0;
  return v1 * std::pow(rho, (x - g.xmax()) / g.h);
}

}  // namespace

double interp_point(const Grid1& g, double x, const InterpPlan& plan, InterpReport* rep) {
  if (plan.order < 1 || plan.order > 8) throw ConfigError("interpolation order must be in 1..8");
  const int n = g.size();
  const double u = (x - g.origin) / g.h;
  const double eps = 1e-9;
  if (u < -eps || u > n - 1 + eps) {
    if (rep) rep->out_of_range_hits += 1;
    switch (plan.policy) {
      case RangePolicy::Error:
        throw ConfigError("interpolation point " + std::to_string(x) +
                          " outside sampled range [" + std::to_string(g.origin) + ", " +
                          std::to_string(g.xmax()) + "]");
      case RangePolicy::ZeroPad:
        return 0;
      case RangePolicy::DecayModel:
        // the model continues past the far edge; below the origin pad with 0
        return u > n - 1 ? edge_model_value(g, x, plan) : 0;
    }
  }

  const int npts = std::min(plan.order + 1, n);
  int i0 = static_cast<int>(std::floor(u)) - (npts - 1) / 2;
  i0 = std::clamp(i0, 0, n - npts);

  // exact node hit: return the sample (also dodges 0/0 in the weights)
  const int nearest = static_cast<int>(std::lround(u));
  if (nearest >= 0 && nearest < n && std::abs(u - nearest) < 1e-12) return g.v[nearest];

  double acc = 0;
  for (int i = 0; i < npts; ++i) {
    double w = 1;
    for (int k = 0; k < npts; ++k) {
      if (k == i) continue;
      w *= (x - g.x(i0 + k)) / (g.x(i0 + i) - g.x(i0 + k));
    }
    acc += w * g.v[i0 + i];
  }

  if (rep) {
    int e0 = i0, epts = npts + 1;
    if (e0 + epts > n) e0 = n - epts;
    if (e0 >= 0) {
      double prod = 1;
      for (int i = 0; i < npts; ++i) prod *= (x - g.x(i0 + i));
      const double est = std::abs(divided_difference(g, e0, epts) * prod);
      rep->max_stencil_error = std::max(rep->max_stencil_error, est);
    }
  }
  return acc;
}

Grid1 extend_grid(const FamilyView<double>& fam, const Grid1& g, int n_negative,
                  const InterpPlan& plan, InterpReport* rep) {
  if (!g.half) throw ConfigError("extend_grid expects a half grid");
  if (n_negative < 1) throw ConfigError("extend_grid: n_negative must be >= 1");
  Grid1 out;
  out.h = g.h;
  out.origin = -n_negative * g.h;
  out.half = false;
  out.v.resize(n_negative + g.size());
  for (int i = 0; i < n_negative; ++i) {
    const double x = out.origin + i * g.h;
    double acc = 0;
    for (std::size_t t = 0; t < fam.size(); ++t)
      acc += fam.a[t] * interp_point(g, -fam.b[t] * x, plan, rep);
    out.v[i] = acc;
  }
  std::copy(g.v.begin(), g.v.end(), out.v.begin() + n_negative);
  return out;
}

Grid2 extend_grid2(const FamilyView<double>& fam, const Grid2& g, int n_negative,
                   const InterpPlan& plan, InterpReport* rep) {
  if (!g.half) throw ConfigError("extend_grid2 expects a half grid");
  Grid2 out;
  out.ht = g.ht;
  out.hn = g.hn;
  out.ot = g.ot;
  out.on = -n_negative * g.hn;
  out.half = false;
  out.nt = g.nt;
  out.nn = n_negative + g.nn;
  out.v.resize(static_cast<std::size_t>(out.nt) * out.nn);
  for (int r = 0; r < g.nt; ++r) {
    Grid1 row;
    row.h = g.hn;
    row.origin = g.on;
    row.half = true;
    row.v.assign(g.v.begin() + static_cast<std::size_t>(r) * g.nn,
                 g.v.begin() + static_cast<std::size_t>(r + 1) * g.nn);
    Grid1 ext = extend_grid(fam, row, n_negative, plan, rep);
    std::copy(ext.v.begin(), ext.v.end(), out.v.begin() + static_cast<std::size_t>(r) * out.nn);
  }
  return out;
}

Grid1 dilate_grid(const Grid1& g, double r, const InterpPlan& plan) {
  if (r == 0) throw ConfigError("dilation factor must be nonzero");
  Grid1 out = g;
  for (int i = 0; i < g.size(); ++i) out.v[i] = interp_point(g, r * g.x(i), plan);
  return out;
}

Grid1 fd_derivative(const Grid1& g, int m) {
  if (m < 0) throw ConfigError("derivative order must be >= 0");
  Grid1 cur = g;
  for (int pass = 0; pass < m; ++pass) {
    if (cur.size() < 3) throw ConfigError("grid too coarse for requested derivative order");
    Grid1 next;
    next.h = cur.h;
    next.origin = cur.origin + cur.h;
    next.half = cur.half;
    next.v.resize(cur.size() - 2);
    for (int i = 1; i + 1 < cur.size(); ++i)
      next.v[i - 1] = (cur.v[i + 1] - cur.v[i - 1]) / (2 * cur.h);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace uext

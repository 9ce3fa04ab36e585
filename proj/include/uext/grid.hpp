#pragma once

#include <functional>
#include <string>
#include <vector>

#include "uext/operators.hpp"

namespace uext {

// Uniform 1-D grid: node i sits at origin + i*h. `half` means the grid starts
// at the boundary (origin == 0) and covers the nonnegative axis only.
struct Grid1 {
  double h = 0;
  double origin = 0;
  bool half = true;
  std::vector<double> v;

  double x(int i) const { return origin + i * h; }
  int size() const { return static_cast<int>(v.size()); }
  double xmax() const { return x(size() - 1); }
};

// Uniform 2-D grid, row-major: row r = tangential index (spacing ht, origin
// ot), column c = normal index (spacing hn, origin on).
struct Grid2 {
  double ht = 0, hn = 0;
  double ot = 0, on = 0;
  bool half = true;
  int nt = 0, nn = 0;
  std::vector<double> v;

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * nn + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * nn + c]; }
  double tcoord(int r) const { return ot + r * ht; }
  double ncoord(int c) const { return on + c * hn; }
};

Grid1 sample_grid1(const std::function<double(double)>& f, double h, double origin, int n,
                   bool half);

// CSV: comment header `# dim=1, h=..., origin=..., half|full`, then one value
// per line (dim=1) or one row per line (dim=2, comma-separated).
void write_grid_csv(const std::string& path, const Grid1& g);
void write_grid_csv(const std::string& path, const Grid2& g);
Grid1 read_grid1_csv(const std::string& path);

enum class RangePolicy { Error, ZeroPad, DecayModel };

struct InterpPlan {
  int order = 4;  // polynomial degree of the centered Lagrange stencil, <= 8
  RangePolicy policy = RangePolicy::Error;
  // Model used beyond the sampled range under DecayModel; when absent, a
  // geometric decay fitted to the last two samples is used.
  std::function<double(double)> decay_model;
};

struct InterpReport {
  double max_stencil_error = 0;  // next-order divided-difference remainder estimate
  int out_of_range_hits = 0;
};

// Centered Lagrange interpolation of `g` at coordinate x (shifted one-sided
// near the edges). Out-of-range behavior per plan.policy.
double interp_point(const Grid1& g, double x, const InterpPlan& plan, InterpReport* rep = nullptr);

// Reflection extension of a sampled half-grid: returns a full grid with
// n_negative extra nodes below 0; positive values copied verbatim.
Grid1 extend_grid(const FamilyView<double>& fam, const Grid1& g, int n_negative,
                  const InterpPlan& plan, InterpReport* rep = nullptr);

// Row-wise (per tangential index) version for 2-D half grids.
Grid2 extend_grid2(const FamilyView<double>& fam, const Grid2& g, int n_negative,
                   const InterpPlan& plan, InterpReport* rep = nullptr);

// Dilation on grids: resamples f(r x) over the same node set via interpolation.
Grid1 dilate_grid(const Grid1& g, double r, const InterpPlan& plan);

// Central finite-difference derivative of order m (second-order accurate),
// shrinking the grid by m nodes at each end.
Grid1 fd_derivative(const Grid1& g, int m);

}  // namespace uext

#include "uext/normlab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <fftw3.h>

namespace uext {

std::string norm_family_name(NormFamily f) {
  switch (f) {
    case NormFamily::Lp: return "lp";
    case NormFamily::Sobolev: return "sobolev";
    case NormFamily::NegSobolevUpper: return "neg-sobolev-upper";
    case NormFamily::Holder: return "holder";
    case NormFamily::Besov: return "besov";
    case NormFamily::TriebelDiag: return "triebel-diag";
  }
  throw ConfigError("unknown norm family");
}

namespace {

double lp_combine(const std::vector<double>& parts, double p) {
  if (std::isinf(p)) return *std::max_element(parts.begin(), parts.end());
  double s = 0;
  for (double v : parts) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

double lp_of_samples(const std::vector<double>& v, double h, double p) {
  if (std::isinf(p)) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * h, 1.0 / p);
}

}  // namespace

double lp_norm(const Grid1& g, double p) {
  if (!(p > 0)) throw ConfigError("lp norm requires p > 0");
  return lp_of_samples(g.v, g.h, p);
}

double lp_norm(const TorusEmbed& t, double p) {
  if (!(p > 0)) throw ConfigError("lp norm requires p > 0");
  return lp_of_samples(t.v, t.h(), p);
}

double sobolev_norm(const Grid1& g, int k, double p) {
  if (k < 0) throw ConfigError("sobolev norm requires k >= 0");
  if (g.size() < k + 2) throw ConfigError("grid too coarse for derivative order");
  std::vector<double> parts;
  for (int m = 0; m <= k; ++m) parts.push_back(lp_norm(fd_derivative(g, m), p));
  return lp_combine(parts, p);
}

double holder_seminorm(const Grid1& g, int k, double s, double window) {
  if (!(s > 0) || s >= 1) throw ConfigError("holder seminorm requires s in (0,1)");
  Grid1 d = fd_derivative(g, k);
  const int n = d.size();
  if (window <= 0) window = (n - 1) * d.h / 4;
  const int dmax = std::min(n - 1, static_cast<int>(window / d.h));
  double best = 0;
  // all small offsets, then geometrically thinned larger ones
  for (int off = 1; off <= dmax; off = off < 64 ? off + 1 : off + off / 4) {
    const double denom = std::pow(off * d.h, s);
    for (int i = 0; i + off < n; ++i)
      best = std::max(best, std::abs(d.v[i + off] - d.v[i]) / denom);
  }
  return best;
}

// ---- torus / spectral ----

namespace {

// smooth 0 -> 1 step on [0,1] from the exp(-1/t) mollifier
double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Littlewood-Paley base window in frequency: 1 on r <= 1, 0 on r >= 2
double eta(double r) { return smooth_step(2.0 - r); }

struct Spectrum {
  int N = 0;
  double L = 0;
  std::vector<std::complex<double>> c;  // bins 0..N/2

  double xi(int m) const { return 2.0 * M_PI * m / L; }
};

Spectrum forward_fft(const TorusEmbed& t) {
  Spectrum s;
  s.N = static_cast<int>(t.v.size());
  s.L = t.L;
  s.c.resize(s.N / 2 + 1);
  std::vector<double> in(t.v);
  fftw_plan plan = fftw_plan_dft_r2c_1d(s.N, in.data(),
                                        reinterpret_cast<fftw_complex*>(s.c.data()),
                                        FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return s;
}

std::vector<double> inverse_fft(Spectrum s) {
  std::vector<double> out(s.N);
  fftw_plan plan = fftw_plan_dft_c2r_1d(s.N, reinterpret_cast<fftw_complex*>(s.c.data()),
                                        out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (double& v : out) v /= s.N;
  return out;
}

// Parseval weight: bin 0 and Nyquist count once, interior bins twice.
double bin_mult(int m, int N) { return (m == 0 || 2 * m == N) ? 1.0 : 2.0; }

}  // namespace

TorusEmbed torus_embed(const std::function<double(double)>& f, double L, int N, bool window) {
  if (L <= 0 || N < 8) throw ConfigError("torus embed: need L > 0 and N >= 8");
  TorusEmbed t;
  t.L = L;
  t.v.resize(N);
  for (int i = 0; i < N; ++i) {
    const double x = -L / 2 + i * L / N;
    double w = 1;
    if (window) {
      const double r = std::abs(x) / (L / 2);  // 0 at center, 1 at the seam
      w = smooth_step((0.96 - r) / (0.96 - 0.5));
    }
    t.v[i] = w * f(x);
  }
  return t;
}

double h_s_norm(const TorusEmbed& t, double s, bool* aliasing) {
  Spectrum sp = forward_fft(t);
  const double h = t.h();
  double total = 0, acc = 0, tail = 0;
  const int cut = static_cast<int>(0.9 * (sp.N / 2));
  for (int m = 0; m < static_cast<int>(sp.c.size()); ++m) {
    const double e = bin_mult(m, sp.N) * std::norm(sp.c[m]);
    total += e;
    if (m >= cut) tail += e;
    acc += e * std::pow(1.0 + sp.xi(m) * sp.xi(m), s);
  }
  if (aliasing) *aliasing = total > 0 && tail > 0.01 * total;
  return std::sqrt(acc * h / sp.N);
}

TorusEmbed h_s_multiplier(const TorusEmbed& t, double s) {
  Spectrum sp = forward_fft(t);
  for (int m = 0; m < static_cast<int>(sp.c.size()); ++m)
    sp.c[m] *= std::pow(1.0 + sp.xi(m) * sp.xi(m), s / 2);
  TorusEmbed out;
  out.L = t.L;
  out.v = inverse_fft(std::move(sp));
  return out;
}

double besov_quasinorm(const TorusEmbed& t, double p, double q, double s, int levels,
                       double* tail) {
  if (!(p > 0) || !(q > 0)) throw ConfigError("besov quasinorm requires p, q > 0");
  if (levels < 2) throw ConfigError("besov quasinorm needs at least 2 levels");
  Spectrum sp = forward_fft(t);
  const int bins = static_cast<int>(sp.c.size());

  std::vector<double> level_norms;
  for (int j = 0; j < levels; ++j) {
    Spectrum piece = sp;
    const double scale = std::pow(2.0, j);
    for (int m = 0; m < bins; ++m) {
      const double r = sp.xi(m);
      const double mult = (j == 0) ? eta(r) : eta(r / scale) - eta(2 * r / scale);
      piece.c[m] *= mult;
    }
    TorusEmbed lvl;
    lvl.L = t.L;
    lvl.v = inverse_fft(std::move(piece));
    level_norms.push_back(std::pow(2.0, j * s) * lp_norm(lvl, p));
  }

  if (tail) {
    // spectral mass not covered by the telescoped multipliers
    double total = 0, beyond = 0;
    const double top = std::pow(2.0, levels - 1);
    for (int m = 0; m < bins; ++m) {
      const double e = bin_mult(m, sp.N) * std::norm(sp.c[m]);
      total += e;
      beyond += e * (1.0 - eta(sp.xi(m) / top));
    }
    *tail = total > 0 ? beyond / total : 0;
  }

  if (std::isinf(q)) return *std::max_element(level_norms.begin(), level_norms.end());
  double acc = 0;
  for (double v : level_norms) acc += std::pow(v, q);
  return std::pow(acc, 1.0 / q);
}

double witness_cost(const DecompositionWitness& w, double p, double lo, double hi, double h) {
  if (w.parts.empty()) return 0;
  std::vector<double> parts;
  const int n = static_cast<int>((hi - lo) / h) + 1;
  for (const auto& part : w.parts) {
    Grid1 g;
    g.h = h;
    g.origin = lo;
    g.half = lo == 0;
    g.v.resize(n);
    for (int i = 0; i < n; ++i) g.v[i] = part.deriv(0, lo + i * h);
    parts.push_back(lp_norm(g, p));
  }
  return lp_combine(parts, p);
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
  return fd_weights_t<double>(x0, nodes, m);
}

}  // namespace uext

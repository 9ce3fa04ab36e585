#pragma once

#include <vector>

#include "uext/weierstrass.hpp"

namespace uext {

// Values u_k prescribed at the geometric nodes beta^k, k = 0..size-1.
struct BoundarySequence {
  std::vector<Real> u;
  int size() const { return static_cast<int>(u.size()); }
};

// Node derivatives W'(beta^k) for k = 0..K-1, precomputed once per synthesis.
inline std::vector<Real> node_derivatives(const NodeProduct& w, int K) {
  std::vector<Real> out;
  out.reserve(K);
  for (int k = 0; k < K; ++k) out.push_back(w.derivative_at_node(k));
  return out;
}

// Cardinal interpolant F_u(z) = sum_k u_k / W'(beta^k) * W(z) / (z - beta^k).
// Reproduces u_k at the nodes; entire in z (here: polynomial of degree
// terms-1 by truncation).
inline Real interpolant_eval(const NodeProduct& w, const std::vector<Real>& wprime,
                             const BoundarySequence& u, const Real& z) {
  const Real wz = w.eval(z);
  Real s = 0;
  for (int k = 0; k < u.size(); ++k) {
    s += u.u[k] / wprime[k] * (wz / (z - w.node(k)));
  }
  return s;
}

struct FixedPointResult {
  BoundarySequence u;
  std::vector<double> ratios;  // per-step contraction ratios ||d_{v+1}||/||d_v||
  int iterations = 0;
};

// Fixed-point iteration for the two-sided moment problem:
//   u_0 = 1/2,  u_k^{v} = (-1)^k - F_{u^{v-1}}(beta^{-k})   (k >= 1),
// run until the sup-norm step falls below fp_tol. Every observed contraction
// ratio must stay below ratio_cap or the iteration aborts.
inline FixedPointResult fixed_point_boundary(const NodeProduct& w, const std::vector<Real>& wprime,
                                             int K, const Real& fp_tol, double ratio_cap,
                                             int max_iter = 4000) {
  BoundarySequence u;
  u.u.resize(K);
  u.u[0] = Real(1) / 2;
  for (int k = 1; k < K; ++k) u.u[k] = (k % 2 == 0) ? Real(1) : Real(-1);

  FixedPointResult res;
  Real prev_delta = -1;
  for (int it = 0; it < max_iter; ++it) {
    BoundarySequence nu;
    nu.u.resize(K);
    nu.u[0] = Real(1) / 2;
    Real delta = 0;
    for (int k = 1; k < K; ++k) {
      const Real fv = interpolant_eval(w, wprime, u, pow(w.beta(), -k));
      nu.u[k] = ((k % 2 == 0) ? Real(1) : Real(-1)) - fv;
      const Real d = abs(nu.u[k] - u.u[k]);
      if (d > delta) delta = d;
    }
    if (prev_delta > 0) {
      const double ratio = static_cast<double>(delta / prev_delta);
      res.ratios.push_back(ratio);
      if (ratio > ratio_cap)
        throw ContractionError("fixed point: contraction ratio " + std::to_string(ratio) +
                               " exceeds cap " + std::to_string(ratio_cap));
    }
    prev_delta = delta;
    u = std::move(nu);
    res.iterations = it + 1;
    if (delta < fp_tol) {
      res.u = std::move(u);
      return res;
    }
  }
  throw ContractionError("fixed point: no convergence within iteration limit");
}

// Taylor coefficients of F_u: route A, per-node synthetic division of W by
// (z - beta^k), accumulated with the cardinal weights.
inline std::vector<Real> taylor_synthetic(const NodeProduct& w, const std::vector<Real>& wprime,
                                          const BoundarySequence& u) {
  const int deg = w.terms();  // F has degree terms-1
  std::vector<Real> out(deg, Real(0));
  for (int k = 0; k < u.size(); ++k) {
    const Poly q = poly_divide_synthetic(w.coeffs(), w.node(k));
    const Real c = u.u[k] / wprime[k];
    for (int i = 0; i < deg; ++i) out[i] += c * q[i];
  }
  return out;
}

// Route B: bottom-up power-series division. Independent evaluation order;
// agreement with route A certifies the extraction.
inline std::vector<Real> taylor_series(const NodeProduct& w, const std::vector<Real>& wprime,
                                       const BoundarySequence& u) {
  const int deg = w.terms();
  std::vector<Real> out(deg, Real(0));
  for (int k = 0; k < u.size(); ++k) {
    const Poly q = poly_divide_series(w.coeffs(), w.node(k));
    const Real c = u.u[k] / wprime[k];
    for (int i = 0; i < deg; ++i) out[i] += c * q[i];
  }
  return out;
}

}  // namespace uext

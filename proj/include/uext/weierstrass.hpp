#pragma once

#include <vector>

#include "uext/poly.hpp"
#include "uext/precision.hpp"

namespace uext {

// Truncated node product W(z) = prod_{j=0}^{terms-1} (1 - z / beta^j).
// A polynomial of degree `terms` with simple zeros exactly at beta^0 ..
// beta^{terms-1}; all downstream identities (cardinal interpolation, Taylor
// extraction, node derivatives) are kept consistent with this truncation.
class NodeProduct {
 public:
  NodeProduct(Real beta, int terms) : beta_(std::move(beta)), terms_(terms) {
    if (!(beta_ > 1)) throw ConfigError("node product: beta must be > 1");
    if (terms_ < 2) throw ConfigError("node product: need at least 2 factors");
    coeffs_.assign(1, Real(1));
    Real ipow = 1;  // beta^{-j}
    for (int j = 0; j < terms_; ++j) {
      poly_mul_linear(coeffs_, -ipow);
      ipow /= beta_;
    }
  }

  const Real& beta() const { return beta_; }
  int terms() const { return terms_; }
  const Poly& coeffs() const { return coeffs_; }
  Real node(int k) const { return pow(beta_, k); }

  Real eval(const Real& z) const { return poly_eval(coeffs_, z); }

  // W'(beta^k) in closed form: -beta^{-k} * prod_{l=1}^{k} (1 - beta^l)
  // * prod_{m=1}^{terms-1-k} (1 - beta^{-m}). The second factor is the
  // truncation-consistent stand-in for W(1/beta)-style tail products.
  Real derivative_at_node(int k) const {
    if (k < 0 || k >= terms_) throw ConfigError("node derivative: k outside node range");
    Real acc = -pow(beta_, -k);
    Real bp = beta_;
    for (int l = 1; l <= k; ++l) {
      acc *= (1 - bp);
      bp *= beta_;
    }
    Real ibp = 1 / beta_;
    for (int m = 1; m <= terms_ - 1 - k; ++m) {
      acc *= (1 - ibp);
      ibp /= beta_;
    }
    return acc;
  }

  // Lower bound |W'(beta^k)| >= |W(1/beta)| (beta-1)^k beta^{-k} beta^{(k^2-k)/2}.
  bool derivative_growth_ok(int kmax) const {
    const Real w_inv = eval(1 / beta_);
    for (int k = 0; k <= kmax && k < terms_; ++k) {
      const Real lhs = abs(derivative_at_node(k));
      const Real rhs =
          abs(w_inv) * pow(beta_ - 1, k) * pow(beta_, -k) * pow(beta_, Real(k) * (k - 1) / 2);
      if (lhs < rhs) return false;
    }
    return true;
  }

 private:
  Real beta_;
  int terms_;
  Poly coeffs_;
};

// Closed-form majorant for the off-node cardinal sums:
// beta^3 exp(2/(beta-1)) / ((beta^2-1)(beta^2-beta-1)). Requires beta > 2 so
// the denominator is positive (beta^2 - beta - 1 > 1).
inline Real cardinal_sum_bound(const Real& beta) {
  if (!(beta > 2)) throw ConfigError("cardinal sum bound: requires beta > 2");
  return pow(beta, 3) * exp(Real(2) / (beta - 1)) /
         ((beta * beta - 1) * (beta * beta - beta - 1));
}

// sum_{k=1}^{K-1} | W(beta^{-l}) / (W'(beta^k) (beta^{-l} - beta^k)) |,
// the quantity the majorant above controls, evaluated for probe index l >= 1.
inline Real cardinal_tail_sum(const NodeProduct& w, int l, int K) {
  const Real zl = pow(w.beta(), -l);
  const Real wz = w.eval(zl);
  Real s = 0;
  for (int k = 1; k < K; ++k) {
    s += abs(wz / (w.derivative_at_node(k) * (zl - w.node(k))));
  }
  return s;
}

}  // namespace uext

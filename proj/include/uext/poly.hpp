#pragma once

#include <vector>

#include "uext/precision.hpp"

namespace uext {

// Dense polynomial, coefficients in ascending degree order.
using Poly = std::vector<Real>;

inline Real poly_eval(const Poly& p, const Real& z) {
  Real acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// p(z) *= (1 + c z)
inline void poly_mul_linear(Poly& p, const Real& c) {
  p.push_back(Real(0));
  for (std::size_t i = p.size() - 1; i > 0; --i) p[i] += c * p[i - 1];
}

// Exact quotient p(z) / (z - node) for p with p(node) = 0, computed top-down
// from the leading coefficient (synthetic division). The remainder — p(node)
// evaluated by the same recurrence — is returned through `remainder` when
// requested so callers can assert it is negligible.
inline Poly poly_divide_synthetic(const Poly& p, const Real& node, Real* remainder = nullptr) {
  const std::size_t n = p.size();
  Poly q(n - 1, Real(0));
  Real carry = p[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    q[i] = carry;
    carry = p[i] + node * carry;
  }
  if (remainder) *remainder = carry;
  return q;
}

// Same quotient, built bottom-up from the constant term as a power series:
// p(z)/(z - b) = -(1/b) p(z) sum_m (z/b)^m, truncated at deg p - 1. Used as an
// independent cross-check of poly_divide_synthetic.
inline Poly poly_divide_series(const Poly& p, const Real& node) {
  const std::size_t n = p.size();
  Poly q(n - 1, Real(0));
  const Real inv = Real(1) / node;
  Real acc = 0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    acc = acc * inv + p[j];
    q[j] = -inv * acc;
  }
  return q;
}

}  // namespace uext

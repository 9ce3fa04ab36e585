#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include "uext/family.hpp"
#include "uext/functions.hpp"

namespace uext {

// Family coefficients lowered to the scalar type used at evaluation time.
template <typename T>
struct FamilyView {
  std::vector<int> j;
  std::vector<T> a;
  std::vector<T> b;
  std::size_t size() const { return a.size(); }
};

template <typename T>
FamilyView<T> family_view(const CoefficientFamily& fam) {
  FamilyView<T> v;
  v.j.reserve(fam.entries.size());
  v.a.reserve(fam.entries.size());
  v.b.reserve(fam.entries.size());
  for (const auto& e : fam.entries) {
    v.j.push_back(e.j);
    v.a.push_back(static_cast<T>(e.a));
    v.b.push_back(static_cast<T>(e.b));
  }
  return v;
}

struct ExtendOptions {
  double skip_tol = 0;  // certified per-term skip threshold; 0 disables skipping
};

struct ExtendCert {
  double skipped_bound = 0;  // sum of certified bounds of skipped terms
  int terms_used = 0;
};

// Pointwise extension: (Ef)(t) = f(t) for t >= 0, sum_j a_j f(-b_j t) for t < 0.
template <typename T, typename F>
T extend_point(const FamilyView<T>& v, const F& f, const T& t,
               const ExtendOptions& opt = {}, ExtendCert* cert = nullptr) {
  if (t >= 0) {
    if (cert) cert->terms_used += 1;
    return f.value(t);
  }
  double td = std::abs(detail::as_double(t));
  T acc(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (opt.skip_tol > 0) {
      double bd = std::abs(detail::as_double(v.a[i])) *
                  f.envelope(detail::as_double(v.b[i]) * td);
      if (bd < opt.skip_tol) {
        if (cert) cert->skipped_bound += bd;
        continue;
      }
    }
    acc += v.a[i] * f.value(-v.b[i] * t);
    if (cert) cert->terms_used += 1;
  }
  return acc;
}

// Zero extension: (Sf)(t) = f(t) for t >= 0, 0 otherwise.
template <typename T, typename F>
T zero_extend_point(const F& f, const T& t) {
  return t >= 0 ? f.value(t) : T(0);
}

// Adjoint against the Lebesgue pairing: for t > 0,
//   (E*g)(t) = g(t) + sum_j (a_j / b_j) g(-t / b_j);
// E*g lives on the half-line, so t <= 0 returns 0.
template <typename T, typename G>
T adjoint_point(const FamilyView<T>& v, const G& g, const T& t) {
  if (t <= 0) return T(0);
  T acc = g.value(t);
  for (std::size_t i = 0; i < v.size(); ++i) acc += v.a[i] / v.b[i] * g.value(-t / v.b[i]);
  return acc;
}

// Dilation (delta_sigma f)(t) = f(sigma t); extension commutes with it.
template <typename T>
Field1<T> field_dilate(Field1<T> f, const T& sigma) {
  auto env = f.envelope;
  double sd = std::abs(detail::as_double(sigma));
  return {f.name, [f, sigma](const T& y) { return f.value(sigma * y); },
          [f, sigma](int m, const T& y) {
            return detail::pow_int(sigma, m) * f.deriv(m, sigma * y);
          },
          [env, sd](double r) { return env(sd * r); }};
}

// Finite-order extension E^{m,r}: the dyadic family with nodes r 2^{-j}.
template <typename T, typename F>
T finite_extend_point(int m, const T& r, const F& f, const T& t) {
  Real rr;
  if constexpr (std::is_same_v<T, Real>)
    rr = r;
  else
    rr = Real(r);
  auto fam = finite_dyadic(m, rr);
  auto v = family_view<T>(fam);
  return extend_point(v, f, t);
}

// Quasi-norm triangle constant for exponent q and weight delta:
//   K = ((2^{delta/(1-q)} + 1)/(2^{delta/(1-q)} - 1))^{1/q - 1} for q < 1,
// and 1 for q >= 1.
inline double triangle_constant(double q, double delta) {
  if (q >= 1.0) return 1.0;
  if (q <= 0.0 || delta <= 0.0) throw ConfigError("triangle constant needs q in (0,1), delta > 0");
  double s = std::pow(2.0, delta / (1.0 - q));
  return std::pow((s + 1.0) / (s - 1.0), 1.0 / q - 1.0);
}

}  // namespace uext

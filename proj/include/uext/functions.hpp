#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "uext/precision.hpp"

namespace uext {

// Scalar test profile in the normal variable. `value` must be defined for
// y >= 0 (the half-space side); extension code never samples y < 0 through
// this interface. `deriv(m, y)` is the m-th derivative where available and
// throws std::logic_error otherwise. `envelope(r)` is a nondecreasing upper
// bound for |f| on [0, r], used for truncation skip certificates.
template <typename T>
struct Field1 {
  std::string name;
  std::function<T(const T&)> value;
  std::function<T(int, const T&)> deriv;
  std::function<double(double)> envelope;
};

namespace detail {

template <typename T>
T pow_int(T base, int n) {
  if (n < 0) return T(1) / pow_int(base, -n);
  T r(1);
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

inline double as_double(double x) { return x; }
inline double as_double(const Real& x) { return static_cast<double>(x); }

}  // namespace detail

template <typename T>
Field1<T> make_const(const T& c) {
  double cb = std::abs(detail::as_double(c));
  return {"const", [c](const T&) { return c; },
          [c](int m, const T&) { return m == 0 ? c : T(0); },
          [cb](double) { return cb; }};
}

template <typename T>
Field1<T> make_poly(int degree) {
  if (degree < 0) throw std::invalid_argument("poly degree must be >= 0");
  auto d = degree;
  return {"poly:" + std::to_string(degree),
          [d](const T& y) { return detail::pow_int(y, d); },
          [d](int m, const T& y) {
            if (m > d) return T(0);
            T c(1);
            for (int i = 0; i < m; ++i) c *= T(d - i);
            return c * detail::pow_int(y, d - m);
          },
          [d](double r) { return std::pow(std::max(r, 0.0), d); }};
}

template <typename T>
Field1<T> make_exp_decay(const T& rate = T(1)) {
  return {"exp-decay", [rate](const T& y) { return exp(-rate * y); },
          [rate](int m, const T& y) {
            using std::exp;
            return detail::pow_int(-rate, m) * exp(-rate * y);
          },
          [](double) { return 1.0; }};
}

template <typename T>
Field1<T> make_gaussian(const T& center = T(0), const T& width = T(1)) {
  // d^m/dy^m exp(-u^2) = (-1)^m H_m(u) exp(-u^2) with physicists' Hermite.
  auto deriv = [center, width](int m, const T& y) {
    using std::exp;
    T u = (y - center) / width;
    T hm1(0), h(1);
    for (int i = 0; i < m; ++i) {
      T next = T(2) * u * h - T(2 * i) * hm1;
      hm1 = h;
      h = next;
    }
    T sign = (m % 2) ? T(-1) : T(1);
    return sign * h * exp(-u * u) / detail::pow_int(width, m);
  };
  return {"gaussian",
          [center, width](const T& y) {
            using std::exp;
            T u = (y - center) / width;
            return exp(-u * u);
          },
          deriv, [](double) { return 1.0; }};
}

template <typename T>
Field1<T> make_sine(double omega, double phase = 0.0) {
  T w(omega), ph(phase);
  return {"sine:" + std::to_string(omega),
          [w, ph](const T& y) {
            using std::sin;
            return sin(w * y + ph);
          },
          [w, ph](int m, const T& y) {
            using std::sin;
            using std::atan;
            // d^m sin(t) = sin(t + m pi/2)
            T half_pi = atan(T(1)) * 2;
            return detail::pow_int(w, m) * sin(w * y + ph + T(m) * half_pi);
          },
          [](double) { return 1.0; }};
}

// Smooth compactly supported bump exp(-1/(1-u^2)) on |u| < 1, u = (y-c)/w.
// Derivatives provided up to order 2.
template <typename T>
Field1<T> make_bump(const T& center, const T& halfwidth) {
  auto val = [center, halfwidth](const T& y) {
    using std::exp;
    T u = (y - center) / halfwidth;
    T s = T(1) - u * u;
    if (s <= 0) return T(0);
    return exp(T(-1) / s);
  };
  auto deriv = [center, halfwidth, val](int m, const T& y) {
    using std::exp;
    if (m == 0) return val(y);
    T u = (y - center) / halfwidth;
    T s = T(1) - u * u;
    if (s <= 0) return T(0);
    T f = exp(T(-1) / s);
    T g1 = T(-2) * u / (s * s);  // d/du of -1/s
    if (m == 1) return f * g1 / halfwidth;
    if (m == 2) {
      T g2 = (T(-2) * s - T(8) * u * u) / (s * s * s);
      return f * (g1 * g1 + g2) / (halfwidth * halfwidth);
    }
    throw std::logic_error("bump derivative order > 2 not available");
  };
  return {"bump", val, deriv, [](double) { return 1.0; }};
}

template <typename T>
Field1<T> field_scale(Field1<T> f, const T& c) {
  double cb = std::abs(detail::as_double(c));
  auto env = f.envelope;
  return {f.name, [f, c](const T& y) { return c * f.value(y); },
          [f, c](int m, const T& y) { return c * f.deriv(m, y); },
          [env, cb](double r) { return cb * env(r); }};
}

template <typename T>
Field1<T> field_sum(Field1<T> a, Field1<T> b) {
  auto ea = a.envelope, eb = b.envelope;
  return {a.name + "+" + b.name,
          [a, b](const T& y) { return a.value(y) + b.value(y); },
          [a, b](int m, const T& y) { return a.deriv(m, y) + b.deriv(m, y); },
          [ea, eb](double r) { return ea(r) + eb(r); }};
}

// Product with Leibniz derivatives.
template <typename T>
Field1<T> field_product(Field1<T> a, Field1<T> b) {
  auto ea = a.envelope, eb = b.envelope;
  return {a.name + "*" + b.name,
          [a, b](const T& y) { return a.value(y) * b.value(y); },
          [a, b](int m, const T& y) {
            T acc(0);
            double binom = 1;
            for (int i = 0; i <= m; ++i) {
              acc += T(binom) * a.deriv(i, y) * b.deriv(m - i, y);
              binom = binom * (m - i) / (i + 1);
            }
            return acc;
          },
          [ea, eb](double r) { return ea(r) * eb(r); }};
}

// y^alpha on the half-line for real alpha > 0 (value 0 at y = 0).
template <typename T>
Field1<T> make_power(double alpha) {
  return {"power:" + std::to_string(alpha),
          [alpha](const T& y) {
            using std::pow;
            return y > 0 ? T(pow(y, T(alpha))) : T(0);
          },
          [alpha](int m, const T& y) {
            using std::pow;
            if (!(y > 0)) return T(0);
            T c(1);
            for (int i = 0; i < m; ++i) c *= T(alpha - i);
            return c * pow(y, T(alpha - m));
          },
          [alpha](double r) { return std::pow(std::max(r, 0.0), alpha); }};
}

// m-th-derivative view of a field (shifts the derivative index). No useful
// envelope survives differentiation in general, so skipping is disabled.
template <typename T>
Field1<T> field_derivative(Field1<T> f, int order) {
  return {f.name + "'", [f, order](const T& y) { return f.deriv(order, y); },
          [f, order](int m, const T& y) { return f.deriv(order + m, y); },
          [](double) { return std::numeric_limits<double>::max(); }};
}

// Parses builtin profile specs: const | poly:k | exp-decay | gaussian | sine:w
template <typename T>
Field1<T> builtin_field(const std::string& spec) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "const") return make_const(T(1));
  if (head == "poly") {
    if (arg.empty()) throw ConfigError("poly:<degree> requires a degree");
    return make_poly<T>(std::stoi(arg));
  }
  if (head == "exp-decay") return make_exp_decay<T>();
  if (head == "gaussian") return make_gaussian<T>();
  if (head == "sine") {
    if (arg.empty()) throw ConfigError("sine:<omega> requires a frequency");
    return make_sine<T>(std::stod(arg));
  }
  throw ConfigError("unknown builtin profile: " + spec);
}

}  // namespace uext

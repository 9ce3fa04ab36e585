#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace uext {

// Arbitrary-precision real. Variable precision: every value carries the
// precision that was the thread default at its construction. Keep one
// precision per computation scope (see ScopedPrecision) — mixing precisions
// silently degrades accuracy to the coarsest operand.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline unsigned bits_to_digits10(unsigned bits) {
  // ceil(bits * log10(2)) plus slack so the mpfr mantissa is >= bits wide.
  return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 4;
}

// RAII guard: sets the thread-default decimal precision from a bit count and
// restores the previous default on scope exit.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits)
      : prev_(Real::default_precision()) {
    Real::default_precision(bits_to_digits10(bits));
  }
  ~ScopedPrecision() { Real::default_precision(prev_); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned prev_;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Synthesis-time configuration for the infinite (geometric-node) families.
struct PrecisionContext {
  unsigned bits = 512;    // working mantissa width for synthesis
  int jmax = 20;          // baseline index cutoff; synthesis may retain more
                          // entries when needed to certify tail_tol (the
                          // effective cutoff is recorded in the family)
  int product_terms = 40; // factors kept in the node product (floor; raised
                          // automatically for slowly-converging bases)
  double tail_tol = 1e-30;

  double fp_tol() const { return std::pow(2.0, -static_cast<double>(bits) / 2); }

  void validate() const {
    if (bits < 64) throw ConfigError("precision context: bits must be >= 64");
    if (jmax < 1) throw ConfigError("precision context: jmax must be >= 1");
    if (product_terms < jmax)
      throw ConfigError("precision context: product_terms must be >= jmax");
    if (!(tail_tol > 0)) throw ConfigError("precision context: tail_tol must be positive");
  }
};

// Working-precision requirement for validating moments up to |k| <= kmax at
// tolerance tol. The k-th moment sum contains terms as large as
// beta^{k(k+1)/2} (the coefficients decay like beta^{-j(j+1)/2} against node
// growth beta^{jk}), all of which must cancel down to a residual of size tol.
inline unsigned moment_bits_required(int kmax, double beta, double tol) {
  const double peak = 0.5 * kmax * (kmax + 1) * std::log2(beta);
  const double res = -std::log2(tol);
  return static_cast<unsigned>(std::ceil(peak + res)) + 64;
}

inline void require_moment_bits(const PrecisionContext& ctx, int kmax, double beta) {
  const unsigned need = moment_bits_required(kmax, beta, ctx.tail_tol);
  if (ctx.bits < need) {
    std::ostringstream msg;
    msg << "insufficient precision: validating |k| <= " << kmax << " at tolerance "
        << ctx.tail_tol << " needs " << need << " bits, context has " << ctx.bits;
    throw PrecisionError(msg.str());
  }
}

}  // namespace uext

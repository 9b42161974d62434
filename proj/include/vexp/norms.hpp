#pragma once

#include "vexp/exponent.hpp"
#include "vexp/grid.hpp"
#include "vexp/weights.hpp"

namespace vexp {

inline constexpr double kDefaultNormTolerance = 1e-10;

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  /// |modular(f / value) - 1| at return; 0 when value = 0.
  double residual = 0.0;
};

/// integral of |f(x)|^{p(x)}, evaluated in log space. Returns +inf when the
/// sum overflows.
double modular(const GridFunction& f, const Exponent& p);

/// inf { lambda > 0 : modular(f / lambda) <= 1 } by bisection.
///
/// The bracket starts at lambda_hi = |f|_inf * max(1, |domain|)^{1/p_minus},
/// where the modular is <= 1, and is halved downwards until the modular
/// exceeds 1. Bisection stops once the bracket is narrower than tol * lambda
/// and the modular is within tol of 1 (or the bracket reaches machine
/// precision).
NormResult luxemburg_norm(const GridFunction& f, const Exponent& p, double tol = kDefaultNormTolerance);

/// || |f|^{p0} ||_{p/p0}^{1/p0}; the quasi-norm that extends the Luxemburg
/// norm to p_minus <= 1. Requires 0 < p0 < p_minus.
NormResult quasi_norm(const GridFunction& f, const Exponent& p, double p0, double tol = kDefaultNormTolerance);

/// (integral |f|^p w)^{1/p} for a constant exponent p > 0.
double weighted_norm(const GridFunction& f, double p, const Weight& w);

/// integral f g.
double dual_pairing(const GridFunction& f, const GridFunction& g);

}  // namespace vexp

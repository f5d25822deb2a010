#pragma once

#include <cmath>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Scalar nonlinearities shared by the tape ops, the plain (tape-free)
// evaluation paths, and the test oracles.  Everything funnels through these
// so that "recompute the same formula elsewhere" reproduces results bit for
// bit.  Keep them as plain expressions over std:: math; no fast-math tricks.

inline Real sigmoid_scalar(Real x) { return 1.0 / (1.0 + std::exp(-x)); }

// softplus_beta(x) = log(1 + exp(beta*x)) / beta, computed stably.  For large
// arguments the exact value is x + log1p(exp(-beta*x))/beta; beyond the
// switch point the correction underflows well below double epsilon relative
// to x, so returning x is the correctly rounded result.
inline Real softplus_scalar(Real x, Real beta) {
  const Real bx = beta * x;
  if (bx > 40.0) return x;
  return std::log1p(std::exp(bx)) / beta;
}

// d/dx softplus_beta(x) = sigmoid(beta*x)
inline Real softplus_deriv_scalar(Real x, Real beta) {
  return sigmoid_scalar(beta * x);
}

}  // namespace neusurf

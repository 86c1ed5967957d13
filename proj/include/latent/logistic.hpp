#pragma once

#include <cmath>
#include <limits>

namespace latent {

// Overflow-safe logistic helpers. Every branch exponentiates a non-positive argument.

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(x))
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  if (x > Scalar(0)) return x + log1p(exp(-x));
  return log1p(exp(x));
}

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  return -softplus(-x);
}

/// log(1 - exp(-x)) for x > 0.
template <typename Scalar>
Scalar log1mexp(Scalar x) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  if (x < Scalar(0.6931471805599453)) return log(-expm1(-x));
  return log1p(-exp(-x));
}

}  // namespace latent

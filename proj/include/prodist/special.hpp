#pragma once

#include <cmath>

namespace prodist {

// ln B(a,b)
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a,b), Lentz continued fraction with a
// power-series fallback. Absolute accuracy ~1e-14, target tolerance 1e-12.
double ibeta_reg(double a, double b, double x);

// Gamma(x) for any non-pole x, including negative non-integers.
double gamma_signed(double x);

// ln(1 + e^x) without overflow.
inline double log1p_exp(double x) {
  if (x > 36.0) return x;
  if (x < -745.0) return 0.0;
  return std::log1p(std::exp(x));
}

// Logistic sigmoid 1/(1+e^{-x}), exact at both ends.
inline double expit(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace prodist

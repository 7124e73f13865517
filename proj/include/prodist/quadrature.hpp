#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "prodist/errors.hpp"

namespace prodist::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_level = 12;
};

namespace detail {

// Abscissa of the tanh-sinh rule on (0,1) at parameter t, together with the
// exact distances to both endpoints and the weight d(x)/dt. The distance to
// the nearer endpoint is computed through exp(-2|y|) directly so integrands
// with endpoint singularities like u^(s-1) keep full relative precision.
struct TsNode {
  double from_a;  // x
  double from_b;  // 1 - x
  double weight;  // dx/dt
};

inline TsNode ts_node(double t) {
  const double y = 1.5707963267948966 * std::sinh(t);  // (pi/2) sinh t
  const double e = std::exp(-2.0 * std::fabs(y));
  const double near_end = e / (1.0 + e);
  const double far_end = 1.0 / (1.0 + e);
  TsNode n;
  if (y >= 0.0) {
    n.from_a = far_end;
    n.from_b = near_end;
  } else {
    n.from_a = near_end;
    n.from_b = far_end;
  }
  n.weight = 2.0 * 1.5707963267948966 * std::cosh(t) * near_end * far_end;
  return n;
}

}  // namespace detail

// Integrate f over (a,b). The integrand is called as f(x, x-a, b-x) with the
// endpoint distances computed without cancellation; non-finite values are
// treated as zero (they can only occur where the weight has underflowed).
template <class F>
double tanh_sinh(F&& f, double a, double b, Options opt = {}) {
  const double scale = b - a;
  if (!(scale > 0.0)) throw std::domain_error("tanh_sinh: empty interval");

  const double t_cap = 6.2;  // weights underflow beyond this
  auto eval = [&](double t) -> double {
    const detail::TsNode n = detail::ts_node(t);
    if (n.weight <= 0.0) return 0.0;
    const double da = scale * n.from_a;
    const double db = scale * n.from_b;
    const double v = f(a + da, da, db);
    if (!std::isfinite(v)) return 0.0;
    return n.weight * v;
  };

  // level 0: trapezoid with h=1
  double h = 1.0;
  double sum = eval(0.0);
  for (int k = 1; k * h <= t_cap; ++k) sum += eval(k * h) + eval(-k * h);
  double prev = scale * h * sum;

  for (int level = 1; level <= opt.max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (int j = 0; (2 * j + 1) * h <= t_cap; ++j) {
      const double t = (2 * j + 1) * h;
      add += eval(t) + eval(-t);
    }
    const double cur = 0.5 * prev + scale * h * add;
    const double err = std::fabs(cur - prev);
    if (level >= 2 &&
        (err <= opt.abs_tol || err <= opt.rel_tol * std::fabs(cur))) {
      return cur;
    }
    prev = cur;
  }
  std::ostringstream msg;
  msg << "tanh_sinh: no convergence after level " << opt.max_level
      << ", estimate " << prev;
  throw numerical_error(msg.str());
}

}  // namespace prodist::quad

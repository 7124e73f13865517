#include "prodist/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prodist::opt {

MinResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                      const std::vector<double>& step, int max_iter,
                      double f_rel_tol) {
  const std::size_t n = x0.size();
  MinResult res;

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  res.evals = static_cast<int>(n) + 1;

  std::vector<std::size_t> ord(n + 1);
  auto rank = [&] {
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    rank();
    const std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];
    if (std::fabs(fv[worst] - fv[best]) <=
        f_rel_tol * (std::fabs(fv[best]) + 1.0)) {
      res.converged = true;
      break;
    }

    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        if (i != worst) s += pts[i][j];
      centroid[j] = s / static_cast<double>(n);
    }

    auto blend = [&](std::vector<double>& out, double coef) {
      for (std::size_t j = 0; j < n; ++j)
        out[j] = centroid[j] + coef * (centroid[j] - pts[worst][j]);
    };

    blend(xr, 1.0);
    const double fr = f(xr);
    ++res.evals;
    if (fr < fv[ord[0]]) {
      blend(xe, 2.0);
      const double fe = f(xe);
      ++res.evals;
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    blend(xc, -0.5);
    const double fc = f(xc);
    ++res.evals;
    if (fc < fv[worst]) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      fv[i] = f(pts[i]);
      ++res.evals;
    }
  }

  rank();
  res.x = pts[ord[0]];
  res.f = fv[ord[0]];
  return res;
}

namespace {

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double h0, int& evals) {
  const std::size_t n = x.size();
  std::vector<double> g(n), xp(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = h0 * (1.0 + std::fabs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
    evals += 2;
  }
  return g;
}

}  // namespace

MinResult bfgs_polish(const Objective& f, const std::vector<double>& x0,
                      int max_iter, double f_rel_tol, double grad_step) {
  const std::size_t n = x0.size();
  MinResult res;
  res.x = x0;
  res.f = f(x0);
  res.evals = 1;

  // inverse Hessian approximation, start from identity
  std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;

  std::vector<double> g = fd_gradient(f, res.x, grad_step, res.evals);

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i] -= H[i][j] * g[j];

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    if (slope >= 0.0) {
      // reset to steepest descent if the approximation lost positivity
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) H[i][j] = 0.0;
        H[i][i] = 1.0;
        d[i] = -g[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
      if (slope >= 0.0) break;
    }

    double alpha = 1.0;
    std::vector<double> xn(n);
    double fn = res.f;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + alpha * d[i];
      fn = f(xn);
      ++res.evals;
      if (fn <= res.f + 1e-4 * alpha * slope) {
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;

    const double f_prev = res.f;
    std::vector<double> gn = fd_gradient(f, xn, grad_step, res.evals);

    std::vector<double> s(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - res.x[i];
      yv[i] = gn[i] - g[i];
    }
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sy += s[i] * yv[i];
    if (sy > 1e-14) {
      // BFGS inverse update
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i][j] * yv[j];
      double yHy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
      const double r = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i][j] += ((1.0 + yHy * r) * s[i] * s[j]) * r - (Hy[i] * s[j] + s[i] * Hy[j]) * r;
        }
      }
    }

    res.x = xn;
    res.f = fn;
    g = gn;

    if (std::fabs(f_prev - res.f) <= f_rel_tol * (std::fabs(res.f) + 1.0)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace prodist::opt

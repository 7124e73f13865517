#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace prodist::opt {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

// Downhill simplex. Stops when the simplex f-spread shrinks below
// f_rel_tol relative to the best value.
MinResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                      const std::vector<double>& step, int max_iter = 4000,
                      double f_rel_tol = 1e-12);

// BFGS with central-difference gradients and Armijo backtracking.
// Convergence on relative objective change below f_rel_tol.
MinResult bfgs_polish(const Objective& f, const std::vector<double>& x0,
                      int max_iter = 300, double f_rel_tol = 1e-10,
                      double grad_step = 1e-5);

}  // namespace prodist::opt

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "prodist/gb2.hpp"
#include "prodist/records.hpp"

namespace prodist {

// A sample value with a replication weight (e.g. one productivity level
// shared by many workers).
struct WeightedSample {
  double value;
  double weight;
};

struct FitOptions {
  int n_starts = 8;
  // optional fit window: only samples with window_lo < c < window_hi enter
  // the (truncated, renormalized) likelihood
  double window_lo = 0.0;
  double window_hi = std::numeric_limits<double>::infinity();
};

struct FitResult {
  Gb2Params params{1.0, 1.0, 1.0, 1.0};
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_used = 0;
  bool converged = false;
  double se_mu = 0.0;  // observed-information standard error of mu
};

// Maximum-likelihood GB2 fit: multi-start Nelder-Mead in log-parameter
// space, quasi-Newton polish, deterministic tie-breaking (lowest start
// index wins). Requires at least 50 observations (total weight).
FitResult fit_gb2_mle(const std::vector<double>& samples, FitOptions opts = {});
FitResult fit_gb2_mle_weighted(const std::vector<WeightedSample>& samples,
                               FitOptions opts = {});

// Hill tail-index estimate from the top k+1 order statistics.
double hill_estimator(const std::vector<double>& samples, std::size_t k);

// Same estimator on a weighted sample: order statistics are taken over the
// expanded multiset in which each value appears `weight` times.
double hill_estimator_weighted(const std::vector<WeightedSample>& samples,
                               double k);

enum class CutMode { none, top_k, threshold };

struct CutPolicy {
  CutMode mode = CutMode::top_k;
  std::size_t k = 10;          // top_k: drop the k largest-c records
  double c_max = 1e9;          // threshold: drop records with c > c_max
};

struct CutResult {
  std::vector<ProductivityRecord> records;
  // top_k with n <= k removes everything; that is reported, not thrown
  bool removed_all = false;
};

// Outlier cuts ahead of fitting. top_k ties are broken by input order,
// removing later records first; survivors keep their input order.
CutResult apply_cuts(const std::vector<ProductivityRecord>& records,
                     const CutPolicy& policy);

}  // namespace prodist

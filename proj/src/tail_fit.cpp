#include "prodist/tail_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "prodist/errors.hpp"
#include "prodist/optimize.hpp"
#include "prodist/special.hpp"

namespace prodist {

namespace {

constexpr double kBigPenalty = 1e30;

struct PreparedSample {
  std::vector<double> logv;
  std::vector<double> w;
  double total_w = 0.0;
  double sum_w_logv = 0.0;
  double log_lo = -std::numeric_limits<double>::infinity();
  double log_hi = std::numeric_limits<double>::infinity();
  bool windowed = false;
};

// Negative log-likelihood in theta = (ln mu, ln nu, ln q, ln c1).
// For a windowed fit the density is renormalized to the window mass.
double neg_log_lik(const PreparedSample& s, const std::vector<double>& th) {
  const double mu = std::exp(th[0]);
  const double nu = std::exp(th[1]);
  const double q = std::exp(th[2]);
  const double lc = th[3];
  const double a = mu / q, b = nu / q;
  if (!(a > 1e-3) || !(b > 1e-3) || a > 500.0 || b > 500.0 ||
      std::fabs(lc) > 60.0) {
    return kBigPenalty;
  }

  double s2 = 0.0;
  const std::size_t n = s.logv.size();
  for (std::size_t i = 0; i < n; ++i) {
    s2 += s.w[i] * log1p_exp(q * (s.logv[i] - lc));
  }
  double ll = s.total_w * (std::log(q) - log_beta(a, b)) +
              nu * (s.sum_w_logv - s.total_w * lc) - s.sum_w_logv -
              ((mu + nu) / q) * s2;

  if (s.windowed) {
    // window mass through the incomplete beta in the z variable
    auto upper = [&](double logc) {
      if (std::isinf(logc)) return logc > 0.0 ? 0.0 : 1.0;
      return ibeta_reg(a, b, expit(-q * (logc - lc)));
    };
    const double mass = upper(s.log_lo) - upper(s.log_hi);
    if (!(mass > 1e-300)) return kBigPenalty;
    ll -= s.total_w * std::log(mass);
  }
  return std::isfinite(ll) ? -ll : kBigPenalty;
}

// 4x4 observed information in the original parameters; returns true and the
// se of mu when the matrix is positive definite.
bool se_from_observed_information(const PreparedSample& s,
                                  const std::vector<double>& theta,
                                  double& se_mu) {
  double p[4] = {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2]),
                 std::exp(theta[3])};
  auto nll_nat = [&](const double* v) {
    std::vector<double> th = {std::log(v[0]), std::log(v[1]), std::log(v[2]),
                              std::log(v[3])};
    return neg_log_lik(s, th);
  };

  double H[4][4];
  const double f0 = nll_nat(p);
  double h[4];
  for (int i = 0; i < 4; ++i) h[i] = 1e-4 * p[i];
  for (int i = 0; i < 4; ++i) {
    double v[4];
    std::copy(p, p + 4, v);
    v[i] = p[i] + h[i];
    const double fp = nll_nat(v);
    v[i] = p[i] - h[i];
    const double fm = nll_nat(v);
    H[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (int j = i + 1; j < 4; ++j) {
      std::copy(p, p + 4, v);
      v[i] = p[i] + h[i];
      v[j] = p[j] + h[j];
      const double fpp = nll_nat(v);
      v[j] = p[j] - h[j];
      const double fpm = nll_nat(v);
      v[i] = p[i] - h[i];
      v[j] = p[j] + h[j];
      const double fmp = nll_nat(v);
      v[j] = p[j] - h[j];
      const double fmm = nll_nat(v);
      H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }

  // Cholesky for the PD check, then invert via the factor.
  double L[4][4] = {};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = H[i][j];
      for (int k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        L[i][i] = std::sqrt(sum);
      } else {
        L[i][j] = sum / L[j][j];
      }
    }
  }
  // first column of H^{-1}: solve H x = e0
  double y[4], x[4];
  for (int i = 0; i < 4; ++i) {
    double sum = (i == 0) ? 1.0 : 0.0;
    for (int k = 0; k < i; ++k) sum -= L[i][k] * y[k];
    y[i] = sum / L[i][i];
  }
  for (int i = 3; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < 4; ++k) sum -= L[k][i] * x[k];
    x[i] = sum / L[i][i];
  }
  if (!(x[0] > 0.0) || !std::isfinite(x[0])) return false;
  se_mu = std::sqrt(x[0]);
  return true;
}

FitResult fit_prepared(PreparedSample s, const FitOptions& opts) {
  FitResult out;
  out.n_used = static_cast<std::size_t>(std::llround(s.total_w));

  if (s.total_w < 50.0) {
    std::ostringstream msg;
    msg << "fit_gb2_mle: needs at least 50 observations, got " << s.total_w;
    throw insufficient_data_error(msg.str());
  }

  // degenerate sample: no spread to identify four parameters
  const auto [mn, mx] =
      std::minmax_element(s.logv.begin(), s.logv.end());
  if (!(*mx - *mn > 1e-12)) {
    out.converged = false;
    out.params = Gb2Params(1.0, 1.0, 1.0, std::exp(*mn));
    return out;
  }

  // starting point heuristics (logv is sorted ascending by prepare())
  double cum = 0.0;
  double median_log = s.logv.back();
  for (std::size_t i = 0; i < s.logv.size(); ++i) {
    cum += s.w[i];
    if (cum >= 0.5 * s.total_w) {
      median_log = s.logv[i];
      break;
    }
  }

  std::vector<WeightedSample> ws(s.logv.size());
  for (std::size_t i = 0; i < s.logv.size(); ++i)
    ws[i] = {std::exp(s.logv[i]), s.w[i]};
  const double kh = std::max(
      2.0, std::floor(std::sqrt(s.total_w)));
  double mu0 = 2.0, nu0 = 1.0;
  try {
    mu0 = std::clamp(hill_estimator_weighted(ws, kh), 0.3, 8.0);
  } catch (const std::exception&) {
  }
  try {
    std::vector<WeightedSample> inv(ws);
    for (auto& e : inv) e.value = 1.0 / e.value;
    nu0 = std::clamp(hill_estimator_weighted(inv, kh), 0.2, 8.0);
  } catch (const std::exception&) {
  }

  const std::vector<double> theta0 = {std::log(mu0), std::log(nu0), 0.0,
                                      median_log};
  // deterministic spread of starting points in log-parameter space
  static const double offsets[][4] = {
      {0.0, 0.0, 0.0, 0.0},    {0.5, -0.5, 0.0, 0.0},
      {-0.5, 0.5, 0.0, 0.0},   {0.0, 0.0, 0.7, 0.0},
      {0.0, 0.0, -0.7, 0.0},   {0.7, 0.7, 0.0, 0.7},
      {-0.7, -0.7, 0.0, -0.7}, {0.35, -0.35, -0.35, 0.35},
  };
  const int n_starts =
      std::clamp(opts.n_starts, 1,
                 static_cast<int>(sizeof(offsets) / sizeof(offsets[0])));

  auto objective = [&](const std::vector<double>& th) {
    return neg_log_lik(s, th);
  };

  opt::MinResult best;
  best.f = std::numeric_limits<double>::infinity();
  bool best_converged = false;
  for (int k = 0; k < n_starts; ++k) {
    std::vector<double> x0(4);
    for (int j = 0; j < 4; ++j) x0[j] = theta0[j] + offsets[k][j];
    opt::MinResult nm =
        opt::nelder_mead(objective, x0, {0.3, 0.3, 0.3, 0.3}, 4000, 1e-12);
    opt::MinResult po = opt::bfgs_polish(objective, nm.x, 300, 1e-10);
    if (po.f < best.f) {
      best = po;
      best_converged = po.converged || nm.converged;
    }
  }

  if (!(best.f < kBigPenalty)) {
    out.converged = false;
    return out;
  }

  out.params = Gb2Params(std::exp(best.x[0]), std::exp(best.x[1]),
                         std::exp(best.x[2]), std::exp(best.x[3]));
  out.log_likelihood = -best.f;

  double se = 0.0;
  const bool info_ok = se_from_observed_information(s, best.x, se);
  out.se_mu = info_ok ? se : 0.0;
  out.converged = best_converged && info_ok;
  return out;
}

PreparedSample prepare(const std::vector<WeightedSample>& samples,
                       const FitOptions& opts) {
  PreparedSample s;
  s.windowed = opts.window_lo > 0.0 || std::isfinite(opts.window_hi);
  if (s.windowed) {
    s.log_lo = opts.window_lo > 0.0
                   ? std::log(opts.window_lo)
                   : -std::numeric_limits<double>::infinity();
    s.log_hi = std::isfinite(opts.window_hi)
                   ? std::log(opts.window_hi)
                   : std::numeric_limits<double>::infinity();
  }
  std::vector<std::pair<double, double>> kept;
  kept.reserve(samples.size());
  for (const auto& e : samples) {
    if (!(e.value > 0.0) || !std::isfinite(e.value)) {
      throw std::domain_error("fit_gb2_mle: samples must be positive finite");
    }
    if (!(e.weight > 0.0)) {
      throw std::domain_error("fit_gb2_mle: weights must be positive");
    }
    if (e.value <= opts.window_lo || e.value >= opts.window_hi) continue;
    kept.emplace_back(std::log(e.value), e.weight);
  }
  // canonical order: makes the fit independent of input permutation
  std::sort(kept.begin(), kept.end());
  s.logv.reserve(kept.size());
  s.w.reserve(kept.size());
  for (const auto& [lv, w] : kept) {
    s.logv.push_back(lv);
    s.w.push_back(w);
    s.total_w += w;
    s.sum_w_logv += w * lv;
  }
  return s;
}

}  // namespace

FitResult fit_gb2_mle(const std::vector<double>& samples, FitOptions opts) {
  std::vector<WeightedSample> ws(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) ws[i] = {samples[i], 1.0};
  return fit_prepared(prepare(ws, opts), opts);
}

FitResult fit_gb2_mle_weighted(const std::vector<WeightedSample>& samples,
                               FitOptions opts) {
  return fit_prepared(prepare(samples, opts), opts);
}

double hill_estimator(const std::vector<double>& samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (k < 1 || k + 1 > n) {
    throw std::invalid_argument("hill_estimator: need 1 <= k < n");
  }
  std::vector<double> top(samples);
  std::partial_sort(top.begin(), top.begin() + k + 1, top.end(),
                    std::greater<double>());
  if (!(top[k] > 0.0)) {
    throw std::domain_error("hill_estimator: samples must be positive");
  }
  const double log_thr = std::log(top[k]);
  double denom = 0.0;
  for (std::size_t i = 0; i < k; ++i) denom += std::log(top[i]) - log_thr;
  if (!(denom > 0.0)) {
    throw degenerate_tail_error(
        "hill_estimator: top order statistics coincide, index undefined");
  }
  return static_cast<double>(k) / denom;
}

double hill_estimator_weighted(const std::vector<WeightedSample>& samples,
                               double k) {
  const double kk = std::floor(k);
  if (!(kk >= 1.0)) {
    throw std::invalid_argument("hill_estimator_weighted: need k >= 1");
  }
  std::vector<WeightedSample> v;
  v.reserve(samples.size());
  double total = 0.0;
  for (const auto& e : samples) {
    if (!(e.value > 0.0)) {
      throw std::domain_error(
          "hill_estimator_weighted: samples must be positive");
    }
    if (e.weight <= 0.0) continue;
    v.push_back(e);
    total += e.weight;
  }
  if (total < kk + 1.0) {
    throw std::invalid_argument(
        "hill_estimator_weighted: need total weight > k");
  }
  std::sort(v.begin(), v.end(), [](const WeightedSample& a,
                                   const WeightedSample& b) {
    return a.value > b.value;
  });

  double used = 0.0, s = 0.0, log_thr = 0.0;
  for (const auto& e : v) {
    if (used < kk) {
      const double take = std::min(e.weight, kk - used);
      s += take * std::log(e.value);
      used += take;
      if (used >= kk && e.weight > take) {
        log_thr = std::log(e.value);  // threshold falls inside this group
        used = kk + 1.0;
        break;
      }
    } else {
      log_thr = std::log(e.value);
      used = kk + 1.0;
      break;
    }
  }
  const double denom = s - kk * log_thr;
  if (!(denom > 0.0)) {
    throw degenerate_tail_error(
        "hill_estimator_weighted: top order statistics coincide");
  }
  return kk / denom;
}

CutResult apply_cuts(const std::vector<ProductivityRecord>& records,
                     const CutPolicy& policy) {
  CutResult res;
  switch (policy.mode) {
    case CutMode::none:
      res.records = records;
      return res;
    case CutMode::threshold: {
      res.records.reserve(records.size());
      for (const auto& r : records) {
        if (r.c <= policy.c_max) res.records.push_back(r);
      }
      return res;
    }
    case CutMode::top_k: {
      if (records.size() <= policy.k) {
        res.removed_all = true;
        return res;
      }
      // remove the k largest by c; among equal c the later record goes first
      std::vector<std::size_t> idx(records.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::partial_sort(idx.begin(), idx.begin() + policy.k, idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          if (records[a].c != records[b].c)
                            return records[a].c > records[b].c;
                          return a > b;
                        });
      std::vector<bool> drop(records.size(), false);
      for (std::size_t i = 0; i < policy.k; ++i) drop[idx[i]] = true;
      res.records.reserve(records.size() - policy.k);
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!drop[i]) res.records.push_back(records[i]);
      }
      return res;
    }
  }
  return res;
}

}  // namespace prodist

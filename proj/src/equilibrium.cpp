#include "prodist/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "prodist/errors.hpp"
#include "prodist/quadrature.hpp"
#include "prodist/special.hpp"

namespace prodist {

namespace {

// Expectation of exp(log_g(c)) over a GB2 firm density, via the exact map
// to the Beta(nu/q, mu/q) variable w with c = c1*(w/(1-w))^(1/q). The
// change of variables has no truncation error; tanh-sinh handles the
// endpoint singularities w^(a-1), (1-w)^(b-1). The callback receives
// log c and must return the log of the weight function.
template <typename LogG>
double gb2_expect(const Gb2Params& p, LogG&& log_g) {
  const double a = p.nu / p.q;
  const double b = p.mu / p.q;
  const double lb = log_beta(a, b);
  const double lc1 = std::log(p.c1);
  auto f = [&](double, double from0, double from1) {
    // from0 = w, from1 = 1 - w, both exact near their endpoints
    const double lw = std::log(from0);
    const double l1w = std::log(from1);
    const double logc = lc1 + (lw - l1w) / p.q;
    return std::exp((a - 1.0) * lw + (b - 1.0) * l1w - lb + log_g(logc));
  };
  return quad::tanh_sinh(f, 0.0, 1.0, {});
}

double mean0(const FirmDistribution& firm) {
  switch (firm.kind) {
    case FirmDistribution::Kind::gb2:
      return gb2_moment(firm.gb2, 1.0);
    case FirmDistribution::Kind::exponential:
      return 1.0 / firm.lambda;
    case FirmDistribution::Kind::empirical:
      return std::accumulate(firm.levels.begin(), firm.levels.end(), 0.0) /
             static_cast<double>(firm.levels.size());
  }
  return 0.0;
}

// <c^n exp(-beta c)> and <exp(-beta c)> for the empirical kind, computed
// with the exp(-beta (c - c_min)) shift so large beta stays finite.
double empirical_tilted_moment(const std::vector<double>& levels, double beta,
                               unsigned n) {
  const double c_min = levels.front();
  double num = 0.0, den = 0.0;
  for (double c : levels) {
    const double e = std::exp(-beta * (c - c_min));
    num += e * std::pow(c, static_cast<double>(n));
    den += e;
  }
  return num / den;
}

void check_beta(double beta, const char* who) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    std::ostringstream msg;
    msg << who << ": beta must be finite and >= 0, got " << beta;
    throw std::domain_error(msg.str());
  }
}

}  // namespace

FirmDistribution FirmDistribution::make_gb2(const Gb2Params& params) {
  FirmDistribution f;
  f.kind = Kind::gb2;
  f.gb2 = params;
  f.tail_mu = params.mu;
  f.tail_c0 = gb2_tail_scale(params);
  return f;
}

FirmDistribution FirmDistribution::make_exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::domain_error("FirmDistribution: rate must be positive finite");
  }
  FirmDistribution f;
  f.kind = Kind::exponential;
  f.lambda = rate;
  f.tail_mu = std::numeric_limits<double>::infinity();
  f.tail_c0 = 1.0 / rate;
  return f;
}

FirmDistribution FirmDistribution::make_empirical(std::vector<double> levels) {
  if (levels.empty()) {
    throw std::domain_error("FirmDistribution: levels must be non-empty");
  }
  for (double c : levels) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw std::domain_error(
          "FirmDistribution: levels must be positive finite");
    }
  }
  std::sort(levels.begin(), levels.end());
  FirmDistribution f;
  f.kind = Kind::empirical;
  f.levels = std::move(levels);
  f.tail_mu = std::numeric_limits<double>::infinity();
  f.tail_c0 = f.levels.back();
  return f;
}

double FirmDistribution::pdf(double c) const {
  if (!(c > 0.0)) throw std::domain_error("FirmDistribution::pdf: c must be > 0");
  switch (kind) {
    case Kind::gb2:
      return gb2_pdf(gb2, c);
    case Kind::exponential:
      return lambda * std::exp(-lambda * c);
    case Kind::empirical:
      throw std::domain_error(
          "FirmDistribution::pdf: empirical firm distributions are discrete "
          "and have no density");
  }
  return 0.0;
}

double partition_function(const FirmDistribution& firm, double beta) {
  check_beta(beta, "partition_function");
  if (beta == 0.0) return 1.0;
  switch (firm.kind) {
    case FirmDistribution::Kind::exponential:
      return firm.lambda / (firm.lambda + beta);
    case FirmDistribution::Kind::empirical: {
      double s = 0.0;
      for (double c : firm.levels) s += std::exp(-beta * c);
      return s / static_cast<double>(firm.levels.size());
    }
    case FirmDistribution::Kind::gb2:
      return gb2_expect(firm.gb2, [beta](double logc) {
        return -beta * std::exp(logc);
      });
  }
  return 0.0;
}

double moment(const FirmDistribution& firm, double beta, unsigned n) {
  check_beta(beta, "moment");
  if (n == 0) return 1.0;
  if (beta == 0.0 && !(static_cast<double>(n) < firm.tail_mu)) {
    std::ostringstream msg;
    msg << "moment: <c^" << n << "> diverges at beta=0 (tail index "
        << firm.tail_mu << ")";
    throw divergent_moment_error(msg.str());
  }
  switch (firm.kind) {
    case FirmDistribution::Kind::exponential: {
      // <c^n>_beta = n! / (lambda + beta)^n
      double r = 1.0;
      for (unsigned i = 1; i <= n; ++i) {
        r *= static_cast<double>(i) / (firm.lambda + beta);
      }
      return r;
    }
    case FirmDistribution::Kind::empirical:
      return empirical_tilted_moment(firm.levels, beta, n);
    case FirmDistribution::Kind::gb2: {
      if (beta == 0.0) return gb2_moment(firm.gb2, static_cast<double>(n));
      const double num = gb2_expect(firm.gb2, [beta, n](double logc) {
        return static_cast<double>(n) * logc - beta * std::exp(logc);
      });
      const double den = gb2_expect(firm.gb2, [beta](double logc) {
        return -beta * std::exp(logc);
      });
      if (!(den > 0.0)) {
        throw numerical_error("moment: partition function underflowed");
      }
      return num / den;
    }
  }
  return 0.0;
}

double mean_demand(const FirmDistribution& firm, double beta) {
  return moment(firm, beta, 1);
}

double invert_demand(const FirmDistribution& firm, double D) {
  if (!(D > 0.0) || !std::isfinite(D)) {
    throw std::domain_error("invert_demand: D must be positive finite");
  }
  if (firm.kind == FirmDistribution::Kind::empirical &&
      D <= firm.levels.front()) {
    std::ostringstream msg;
    msg << "invert_demand: D=" << D
        << " is at or below the smallest productivity level "
        << firm.levels.front() << " (the beta -> infinity limit)";
    throw demand_out_of_range_error(msg.str());
  }
  if (!firm.infinite_mean()) {
    const double m0 = mean0(firm);
    if (D >= m0) {
      std::ostringstream msg;
      msg << "invert_demand: D=" << D << " is at or above the beta=0 mean "
          << m0 << "; no nonnegative beta exists";
      throw demand_out_of_range_error(msg.str());
    }
  }

  double lo = 0.0;
  double hi = 1.0 / D;
  int guard = 0;
  while (mean_demand(firm, hi) > D) {
    lo = hi;
    hi *= 8.0;
    if (++guard > 200) {
      throw numerical_error("invert_demand: failed to bracket beta");
    }
  }
  for (int i = 0; i < 300 && (hi - lo) > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_demand(firm, mid) > D) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double worker_pdf(const FirmDistribution& firm, double beta, double c) {
  check_beta(beta, "worker_pdf");
  if (!(c > 0.0)) throw std::domain_error("worker_pdf: c must be > 0");
  const double z = partition_function(firm, beta);
  if (!(z > 0.0)) {
    throw numerical_error("worker_pdf: partition function underflowed");
  }
  return std::exp(-beta * c) * firm.pdf(c) / z;
}

namespace {

// Completed small-beta expansion for a GB2 firm away from tail_mu = 2:
//   D = m1 - (m2* - m1^2) beta - mu^2 Gamma(-mu) c0^mu beta^(mu-1)
// where m2* is the analytically continued second moment. For
// 1 < mu < 2 the fractional-power term dominates and m2* supplies the
// next-order linear correction; for 2 < mu < 3 the roles swap. The two
// gamma-family poles at mu = 2 cancel each other in the sum, which the
// logarithmic boundary branch exploits by averaging mu = 2 -+ eps.
// For mu >= 3 the fractional term is beyond the expansion's order (and
// Gamma(-mu) hits integer poles), so only the variance term is kept.
double demand_expansion_gb2(const Gb2Params& p, double beta) {
  const double m1 = gb2_moment_continued(p, 1.0);
  const double m2r = gb2_moment_continued(p, 2.0);
  double d = m1 - (m2r - m1 * m1) * beta;
  if (p.mu < 3.0) {
    const double c0 = gb2_tail_scale(p);
    d -= p.mu * p.mu * gamma_signed(-p.mu) *
         std::exp(p.mu * std::log(c0) + (p.mu - 1.0) * std::log(beta));
  }
  return d;
}

}  // namespace

double demand_small_beta(const FirmDistribution& firm, double beta) {
  check_beta(beta, "demand_small_beta");
  if (firm.infinite_mean()) {
    std::ostringstream msg;
    msg << "demand_small_beta: mean diverges for tail index " << firm.tail_mu
        << " <= 1";
    throw divergent_moment_error(msg.str());
  }
  if (beta == 0.0) return mean0(firm);

  switch (firm.kind) {
    case FirmDistribution::Kind::exponential:
      return 1.0 / firm.lambda - beta / (firm.lambda * firm.lambda);
    case FirmDistribution::Kind::empirical: {
      const double m1 = mean0(firm);
      double v = 0.0;
      for (double c : firm.levels) v += (c - m1) * (c - m1);
      v /= static_cast<double>(firm.levels.size());
      return m1 - v * beta;
    }
    case FirmDistribution::Kind::gb2: {
      const Gb2Params& p = firm.gb2;
      if (std::fabs(p.mu - 2.0) < 1e-9) {
        // logarithmic boundary: the pole pair at mu = 2 cancels in the
        // symmetric average of the generic branch
        const double eps = 1e-6;
        const Gb2Params lo(2.0 - eps, p.nu, p.q, p.c1);
        const Gb2Params hi(2.0 + eps, p.nu, p.q, p.c1);
        return 0.5 *
               (demand_expansion_gb2(lo, beta) + demand_expansion_gb2(hi, beta));
      }
      return demand_expansion_gb2(p, beta);
    }
  }
  return 0.0;
}

EquilibriumTable tabulate_equilibrium(const FirmDistribution& firm,
                                      const std::vector<double>& beta_grid) {
  if (beta_grid.size() < 2) {
    throw std::invalid_argument(
        "tabulate_equilibrium: need at least two grid points");
  }
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0) || !std::isfinite(beta_grid[i])) {
      throw std::invalid_argument(
          "tabulate_equilibrium: grid must be positive and finite");
    }
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1])) {
      throw std::invalid_argument(
          "tabulate_equilibrium: grid must be strictly increasing");
    }
  }

  EquilibriumTable t;
  t.betas_ = beta_grid;
  const std::size_t n = beta_grid.size();
  t.z_.resize(n);
  t.d_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.z_[i] = partition_function(firm, beta_grid[i]);
    t.d_[i] = mean_demand(firm, beta_grid[i]);
    if (!(t.z_[i] > 0.0 && t.z_[i] <= 1.0)) {
      std::ostringstream msg;
      msg << "tabulate_equilibrium: Z out of (0,1] at beta=" << beta_grid[i];
      throw numerical_error(msg.str());
    }
    if (i > 0 && (!(t.z_[i] < t.z_[i - 1]) || !(t.d_[i] < t.d_[i - 1]))) {
      std::ostringstream msg;
      msg << "tabulate_equilibrium: Z or D failed to decrease between beta="
          << beta_grid[i - 1] << " and beta=" << beta_grid[i];
      throw numerical_error(msg.str());
    }
  }

  // Fritsch-Carlson monotone cubic for x = -log D  ->  y = log beta
  t.x_.resize(n);
  t.y_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.x_[i] = -std::log(t.d_[i]);
    t.y_[i] = std::log(beta_grid[i]);
  }
  std::vector<double> sec(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sec[i] = (t.y_[i + 1] - t.y_[i]) / (t.x_[i + 1] - t.x_[i]);
  }
  t.slope_.resize(n);
  t.slope_.front() = sec.front();
  t.slope_.back() = sec.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    t.slope_[i] = 0.5 * (sec[i - 1] + sec[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = t.slope_[i] / sec[i];
    const double b = t.slope_[i + 1] / sec[i];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      t.slope_[i] = tau * a * sec[i];
      t.slope_[i + 1] = tau * b * sec[i];
    }
  }
  return t;
}

double EquilibriumTable::invert(double demand) const {
  if (!(demand > 0.0) || !std::isfinite(demand)) {
    throw std::domain_error("EquilibriumTable::invert: demand must be > 0");
  }
  const double x = -std::log(demand);
  if (x < x_.front() || x > x_.back()) {
    std::ostringstream msg;
    msg << "EquilibriumTable::invert: demand " << demand
        << " outside the tabulated range [" << d_.back() << ", " << d_.front()
        << "]";
    throw demand_out_of_range_error(msg.str());
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i =
      std::min(static_cast<std::size_t>(
                   std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0)),
               x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  const double y = h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] +
                   h11 * h * slope_[i + 1];
  return std::exp(y);
}

}  // namespace prodist

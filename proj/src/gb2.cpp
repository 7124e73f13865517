#include "prodist/gb2.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "prodist/errors.hpp"
#include "prodist/rng.hpp"
#include "prodist/special.hpp"

namespace prodist {

Gb2Params::Gb2Params(double mu_, double nu_, double q_, double c1_)
    : mu(mu_), nu(nu_), q(q_), c1(c1_) {
  if (!(mu > 0.0) || !(nu > 0.0) || !(q > 0.0) || !(c1 > 0.0) ||
      !std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(q) ||
      !std::isfinite(c1)) {
    std::ostringstream msg;
    msg << "Gb2Params: all parameters must be positive finite, got mu=" << mu_
        << " nu=" << nu_ << " q=" << q_ << " c1=" << c1_;
    throw std::domain_error(msg.str());
  }
}

double gb2_log_pdf(const Gb2Params& p, double c) {
  if (!(c > 0.0)) throw std::domain_error("gb2_log_pdf: c must be > 0");
  const double lr = std::log(c) - std::log(p.c1);
  return std::log(p.q) - log_beta(p.mu / p.q, p.nu / p.q) - std::log(c) +
         p.nu * lr - ((p.mu + p.nu) / p.q) * log1p_exp(p.q * lr);
}

double gb2_pdf(const Gb2Params& p, double c) {
  return std::exp(gb2_log_pdf(p, c));
}

double gb2_cdf_upper(const Gb2Params& p, double c) {
  if (c < 0.0) throw std::domain_error("gb2_cdf_upper: c must be >= 0");
  if (c == 0.0) return 1.0;
  // z = 1/(1+(c/c1)^q), upper cdf = I_z(mu/q, nu/q)
  const double z = expit(-p.q * (std::log(c) - std::log(p.c1)));
  return ibeta_reg(p.mu / p.q, p.nu / p.q, z);
}

double gb2_cdf_lower(const Gb2Params& p, double c) {
  if (c < 0.0) throw std::domain_error("gb2_cdf_lower: c must be >= 0");
  if (c == 0.0) return 0.0;
  const double v = expit(p.q * (std::log(c) - std::log(p.c1)));
  return ibeta_reg(p.nu / p.q, p.mu / p.q, v);
}

double gb2_tail_upper(const Gb2Params& p, double c) {
  if (!(c > 0.0)) throw std::domain_error("gb2_tail_upper: c must be > 0");
  const double lr = std::log(c) - std::log(p.c1);
  return std::exp(std::log(p.q / p.mu) - log_beta(p.mu / p.q, p.nu / p.q) -
                  p.mu * lr);
}

double gb2_tail_scale(const Gb2Params& p) {
  const double la =
      std::log(p.q / p.mu) - log_beta(p.mu / p.q, p.nu / p.q);
  return p.c1 * std::exp(la / p.mu);
}

LogNormalApprox gb2_lognormal_peak(const Gb2Params& p) {
  LogNormalApprox b;
  b.c_ln = std::pow(p.nu / p.mu, 1.0 / p.q);
  b.sigma = (p.nu + p.mu) / (p.nu * p.mu) / p.q;
  return b;
}

double gb2_moment(const Gb2Params& p, double h) {
  if (h >= p.mu || h <= -p.nu) {
    std::ostringstream msg;
    msg << "gb2_moment: E[c^" << h << "] diverges (finite for -" << p.nu
        << " < h < " << p.mu << ")";
    throw divergent_moment_error(msg.str());
  }
  return gb2_moment_continued(p, h);
}

double gb2_moment_continued(const Gb2Params& p, double h) {
  if (h == 0.0) return 1.0;
  const double a1 = (p.nu + h) / p.q;
  const double a2 = (p.mu - h) / p.q;
  const double b1 = p.nu / p.q;
  const double b2 = p.mu / p.q;
  if ((a1 <= 0.0 && a1 == std::floor(a1)) ||
      (a2 <= 0.0 && a2 == std::floor(a2))) {
    throw numerical_error("gb2_moment_continued: gamma pole");
  }
  double sign = 1.0;
  if (a1 <= 0.0) sign *= (static_cast<long long>(std::floor(a1)) % 2 == 0)
                             ? 1.0
                             : -1.0;
  if (a2 <= 0.0) sign *= (static_cast<long long>(std::floor(a2)) % 2 == 0)
                             ? 1.0
                             : -1.0;
  const double lg = std::lgamma(a1) + std::lgamma(a2) - std::lgamma(b1) -
                    std::lgamma(b2);
  return sign * std::exp(h * std::log(p.c1) + lg);
}

std::vector<double> gb2_sample(const Gb2Params& p, std::uint64_t seed,
                               std::size_t n) {
  Rng rng(seed);
  std::vector<double> out(n);
  const double a = p.nu / p.q;
  const double b = p.mu / p.q;
  for (std::size_t i = 0; i < n; ++i) {
    double x, y;
    do {
      x = rng.gamma(a);
      y = rng.gamma(b);
    } while (x <= 0.0 || y <= 0.0);
    out[i] = p.c1 * std::pow(x / y, 1.0 / p.q);
  }
  return out;
}

}  // namespace prodist

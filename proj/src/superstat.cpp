#include "prodist/superstat.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "prodist/errors.hpp"
#include "prodist/quadrature.hpp"
#include "prodist/rng.hpp"
#include "prodist/special.hpp"

namespace prodist {

namespace {

void check_transfer_args(double mu_f, double delta, const char* who) {
  if (!std::isfinite(mu_f) || !(mu_f > 1.0)) {
    std::ostringstream msg;
    msg << who << ": requires a tail index mu_f > 1, got " << mu_f;
    throw out_of_theory_error(msg.str());
  }
  if (!std::isfinite(delta) || !(delta < 1.0)) {
    std::ostringstream msg;
    msg << who << ": requires delta < 1 for a normalizable demand law, got "
        << delta;
    throw normalizability_error(msg.str());
  }
}

// beta(u) = beta_max * u^(1/(1-gamma)) maps the flattened variable u in
// (0,1) back to the power-law-weighted beta.
double beta_of_u(double u, double gamma, double beta_max) {
  return beta_max * std::exp(std::log(u) / (1.0 - gamma));
}

}  // namespace

BetaWeight BetaWeight::make_point_mass(double beta0) {
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
    throw std::domain_error("BetaWeight: beta0 must be positive finite");
  }
  BetaWeight w;
  w.kind = Kind::point_mass;
  w.beta0 = beta0;
  return w;
}

BetaWeight BetaWeight::make_power_law(double gamma, double beta_max) {
  if (!std::isfinite(gamma) || !(gamma < 1.0)) {
    std::ostringstream msg;
    msg << "BetaWeight: power-law exponent must satisfy gamma < 1 "
           "(integrability at beta = 0), got "
        << gamma;
    throw normalizability_error(msg.str());
  }
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) {
    throw std::domain_error("BetaWeight: beta_max must be positive finite");
  }
  BetaWeight w;
  w.kind = Kind::power_law;
  w.gamma = gamma;
  w.beta_max = beta_max;
  return w;
}

BetaWeight BetaWeight::make_empirical(std::vector<double> betas) {
  if (betas.empty()) {
    throw std::domain_error("BetaWeight: empirical sample must be non-empty");
  }
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw std::domain_error("BetaWeight: betas must be positive finite");
    }
  }
  BetaWeight w;
  w.kind = Kind::empirical;
  w.betas = std::move(betas);
  return w;
}

double generalized_boltzmann(const BetaWeight& weight, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::domain_error("generalized_boltzmann: c must be positive");
  }
  switch (weight.kind) {
    case BetaWeight::Kind::point_mass:
      return std::exp(-weight.beta0 * c);
    case BetaWeight::Kind::empirical: {
      double s = 0.0;
      for (double b : weight.betas) s += std::exp(-b * c);
      return s / static_cast<double>(weight.betas.size());
    }
    case BetaWeight::Kind::power_law: {
      const double g = weight.gamma;
      const double bm = weight.beta_max;
      return quad::tanh_sinh(
          [&](double, double from0, double) {
            return std::exp(-beta_of_u(from0, g, bm) * c);
          },
          0.0, 1.0, {});
    }
  }
  return 0.0;
}

SuperstatWorker::SuperstatWorker(FirmDistribution firm, BetaWeight weight)
    : firm_(std::move(firm)), weight_(std::move(weight)) {
  // Z_B = \int p^F(c) B(c) dc = E_{f_beta}[Z(beta)], the beta-side form,
  // which works uniformly for every firm kind.
  switch (weight_.kind) {
    case BetaWeight::Kind::point_mass:
      z_b_ = partition_function(firm_, weight_.beta0);
      break;
    case BetaWeight::Kind::empirical: {
      double s = 0.0;
      for (double b : weight_.betas) s += partition_function(firm_, b);
      z_b_ = s / static_cast<double>(weight_.betas.size());
      break;
    }
    case BetaWeight::Kind::power_law: {
      const double g = weight_.gamma;
      const double bm = weight_.beta_max;
      z_b_ = quad::tanh_sinh(
          [&](double, double from0, double) {
            return partition_function(firm_, beta_of_u(from0, g, bm));
          },
          0.0, 1.0, {});
      break;
    }
  }
  if (!(z_b_ > 0.0) || !std::isfinite(z_b_)) {
    throw numerical_error("SuperstatWorker: normalization Z_B underflowed");
  }
}

double SuperstatWorker::pdf(double c) const {
  return firm_.pdf(c) * generalized_boltzmann(weight_, c) / z_b_;
}

double SuperstatWorker::cdf_upper(double c) const {
  if (c < 0.0) throw std::domain_error("SuperstatWorker::cdf_upper: c < 0");
  if (c == 0.0) return 1.0;
  switch (firm_.kind) {
    case FirmDistribution::Kind::empirical: {
      double s = 0.0;
      for (double level : firm_.levels) {
        if (level > c) s += generalized_boltzmann(weight_, level);
      }
      return s / (static_cast<double>(firm_.levels.size()) * z_b_);
    }
    case FirmDistribution::Kind::exponential: {
      // \int_c^infty lambda e^{-(lambda+beta)c'} dc' averaged over f_beta
      const double l = firm_.lambda;
      auto tail_at = [&](double beta) {
        return l / (l + beta) * std::exp(-(l + beta) * c);
      };
      switch (weight_.kind) {
        case BetaWeight::Kind::point_mass:
          return tail_at(weight_.beta0) / z_b_;
        case BetaWeight::Kind::empirical: {
          double s = 0.0;
          for (double b : weight_.betas) s += tail_at(b);
          return s / (static_cast<double>(weight_.betas.size()) * z_b_);
        }
        case BetaWeight::Kind::power_law: {
          const double g = weight_.gamma;
          const double bm = weight_.beta_max;
          const double v = quad::tanh_sinh(
              [&](double, double from0, double) {
                return tail_at(beta_of_u(from0, g, bm));
              },
              0.0, 1.0, {});
          return v / z_b_;
        }
      }
      return 0.0;
    }
    case FirmDistribution::Kind::gb2: {
      // integrate p^F(c') B(c') over (c, infinity) in the Beta variable
      // w = (c'/c1)^q / (1 + (c'/c1)^q), where the measure is exact
      const Gb2Params& p = firm_.gb2;
      const double a = p.nu / p.q;
      const double b = p.mu / p.q;
      const double lb = log_beta(a, b);
      const double lc1 = std::log(p.c1);
      const double w_lo = expit(p.q * (std::log(c) - lc1));
      if (w_lo >= 1.0) return 0.0;
      const double v = quad::tanh_sinh(
          [&](double w, double, double from1) {
            const double l1w = std::log(from1);
            const double lw = w > 0.5 ? std::log1p(-from1) : std::log(w);
            const double logc = lc1 + (lw - l1w) / p.q;
            const double cc = std::exp(logc);
            // So close to w = 1 that c overflows double: the remaining mass
            // is below 1e-300 of the result, so the panel contributes 0.
            if (!std::isfinite(cc) || cc <= 0.0) return 0.0;
            const double kern = generalized_boltzmann(weight_, cc);
            if (!(kern > 0.0)) return 0.0;
            const double log_dens = (a - 1.0) * lw + (b - 1.0) * l1w - lb;
            return std::exp(log_dens + std::log(kern));
          },
          w_lo, 1.0, {});
      return v / z_b_;
    }
  }
  return 0.0;
}

double worker_pdf_super(const FirmDistribution& firm, const BetaWeight& weight,
                        double c) {
  return SuperstatWorker(firm, weight).pdf(c);
}

std::vector<double> sample_demand(const DemandLaw& law, std::uint64_t seed,
                                  std::size_t n) {
  if (!std::isfinite(law.delta) || !(law.delta < 1.0)) {
    std::ostringstream msg;
    msg << "sample_demand: delta must be < 1 for a normalizable demand law, "
           "got "
        << law.delta;
    throw normalizability_error(msg.str());
  }
  if (!(law.c_mean > 0.0) || !std::isfinite(law.c_mean) ||
      !(law.d_min >= 0.0) || !(law.d_min < law.c_mean)) {
    throw std::domain_error(
        "sample_demand: need 0 <= d_min < c_mean with c_mean positive finite");
  }
  if (n == 0) {
    throw std::invalid_argument("sample_demand: need n >= 1");
  }
  Rng rng(seed);
  const double span = law.c_mean - law.d_min;
  const double inv = 1.0 / (1.0 - law.delta);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = law.c_mean - span * std::pow(rng.uniform01(), inv);
  }
  return out;
}

double gamma_from_delta(double delta, double mu_f) {
  check_transfer_args(mu_f, delta, "gamma_from_delta");
  if (mu_f > 2.0) return delta;
  return 1.0 + (mu_f - 1.0) * (delta - 1.0);
}

double predict_mu_w(double mu_f, double delta) {
  check_transfer_args(mu_f, delta, "predict_mu_w");
  return mu_f - gamma_from_delta(delta, mu_f) + 1.0;
}

double predict_mu_f(double mu_w, double delta) {
  if (!std::isfinite(mu_w) || !(mu_w > 1.0)) {
    std::ostringstream msg;
    msg << "predict_mu_f: requires an aggregated index mu_w > 1, got " << mu_w;
    throw out_of_theory_error(msg.str());
  }
  if (!std::isfinite(delta) || !(delta < 1.0)) {
    std::ostringstream msg;
    msg << "predict_mu_f: requires delta < 1, got " << delta;
    throw normalizability_error(msg.str());
  }
  // the forward map sends mu_f = 2 to 3 - delta; pick the branch from that
  const double at_two = 3.0 - delta;
  if (mu_w > at_two) return mu_w + delta - 1.0;
  if (mu_w < at_two) return (mu_w + 1.0 - delta) / (2.0 - delta);
  return 2.0;
}

DeltaInference infer_delta(double mu_f, double mu_w) {
  if (!std::isfinite(mu_f) || !(mu_f > 1.0)) {
    std::ostringstream msg;
    msg << "infer_delta: requires mu_f > 1, got " << mu_f;
    throw out_of_theory_error(msg.str());
  }
  if (!std::isfinite(mu_w)) {
    throw std::domain_error("infer_delta: mu_w must be finite");
  }
  DeltaInference r;
  if (mu_f > 2.0) {
    r.delta = mu_f - mu_w + 1.0;
  } else {
    r.delta = (mu_f - mu_w) / (mu_f - 1.0) + 1.0;
  }
  r.theory_consistent = mu_w > mu_f;
  return r;
}

double default_beta_max(const FirmDistribution& firm) {
  return invert_demand(firm, 0.01 * mean_demand(firm, 0.0));
}

}  // namespace prodist

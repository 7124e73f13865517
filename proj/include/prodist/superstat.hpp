#pragma once

#include <cstdint>
#include <vector>

#include "prodist/equilibrium.hpp"

namespace prodist {

// Mixing weight f_beta(beta) for the fluctuating inverse temperature:
// a point mass, a truncated power law ~ beta^(-gamma) on (0, beta_max]
// (gamma < 1 for integrability at 0), or an empirical sample of betas.
struct BetaWeight {
  enum class Kind { point_mass, power_law, empirical };

  Kind kind = Kind::point_mass;
  double beta0 = 1.0;             // point_mass
  double gamma = 0.0;             // power_law exponent, < 1
  double beta_max = 1.0;          // power_law upper support bound
  std::vector<double> betas;      // empirical sample

  static BetaWeight make_point_mass(double beta0);
  static BetaWeight make_power_law(double gamma, double beta_max);
  static BetaWeight make_empirical(std::vector<double> betas);
};

// Demand fluctuation law f_D(D) ~ (c_mean - D)^(-delta) on (d_min, c_mean);
// delta < 1 keeps it normalizable.
struct DemandLaw {
  double delta = 0.0;
  double c_mean = 1.0;
  double d_min = 0.0;
};

// B(c) = integral of exp(-beta c) against the mixing weight. The power-law
// kind is computed exactly on (0, beta_max] via the substitution
// u = (beta/beta_max)^(1-gamma), which flattens the weight to du on (0,1).
double generalized_boltzmann(const BetaWeight& weight, double c);

// Demand-averaged worker distribution: pdf(c) = p^F(c) B(c) / Z_B with
// Z_B = integral of p^F B. Precomputes Z_B once; immutable afterwards.
class SuperstatWorker {
 public:
  SuperstatWorker(FirmDistribution firm, BetaWeight weight);

  // density; throws for empirical firm kinds (discrete levels)
  double pdf(double c) const;
  // P(C > c) for the superstatistical worker distribution
  double cdf_upper(double c) const;
  double normalization() const { return z_b_; }

 private:
  FirmDistribution firm_;
  BetaWeight weight_;
  double z_b_;
};

// One-shot evaluation of the superstatistical worker density.
double worker_pdf_super(const FirmDistribution& firm, const BetaWeight& weight,
                        double c);

// n inverse-transform draws D = c_mean - (c_mean - d_min) U^(1/(1-delta)).
std::vector<double> sample_demand(const DemandLaw& law, std::uint64_t seed,
                                  std::size_t n);

// Exponent of the induced beta-weight power law: gamma = delta for
// tail indices above 2, gamma = 1 + (mu_f - 1)(delta - 1) below 2; the
// branches agree at mu_f = 2.
double gamma_from_delta(double delta, double mu_f);

// Pareto-index transfer under demand fluctuations: the aggregated (tilted)
// level has index mu_f - gamma_from_delta(delta, mu_f) + 1, always > mu_f.
double predict_mu_w(double mu_f, double delta);

// Inverse transfer: recover the base-level index from the aggregated one.
// predict_mu_f(predict_mu_w(m, d), d) == m for every m > 1, d < 1.
double predict_mu_f(double mu_w, double delta);

struct DeltaInference {
  double delta;
  // false when mu_w <= mu_f, i.e. the inferred delta lands at >= 1 where no
  // normalizable demand law exists
  bool theory_consistent;
};

// Solve the transfer relation for delta given both measured indices.
DeltaInference infer_delta(double mu_f, double mu_w);

// Default upper support bound for power-law beta-weights over this firm
// distribution: the beta at which mean demand has fallen to 1% of the
// beta = 0 mean.
double default_beta_max(const FirmDistribution& firm);

}  // namespace prodist

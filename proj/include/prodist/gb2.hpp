#pragma once

#include <cstdint>
#include <vector>

namespace prodist {

// Generalized beta distribution of the second kind. mu is the upper
// (Pareto) power-law index, nu the lower one, q the crossover sharpness,
// c1 the crossover scale.
struct Gb2Params {
  double mu;
  double nu;
  double q;
  double c1;

  Gb2Params(double mu_, double nu_, double q_, double c1_);
};

// Location and width of the log-normal-like body around the peak of c*p(c):
// c_ln = (nu/mu)^(1/q) in units of c1, sigma = (1/q)(nu+mu)/(nu*mu).
struct LogNormalApprox {
  double c_ln;
  double sigma;
};

double gb2_log_pdf(const Gb2Params& p, double c);
double gb2_pdf(const Gb2Params& p, double c);

// P(C > c) and P(C < c); the lower version is evaluated directly so it keeps
// relative precision as c -> 0 (needed for small-c slope checks).
double gb2_cdf_upper(const Gb2Params& p, double c);
double gb2_cdf_lower(const Gb2Params& p, double c);

// Asymptotic Pareto tail (q/mu)/B(mu/q,nu/q) * (c/c1)^(-mu).
double gb2_tail_upper(const Gb2Params& p, double c);

// Tail scale c0 such that the asymptote is (c/c0)^(-mu).
double gb2_tail_scale(const Gb2Params& p);

LogNormalApprox gb2_lognormal_peak(const Gb2Params& p);

// E[C^h], finite for -nu < h < mu; throws divergent_moment_error otherwise.
double gb2_moment(const Gb2Params& p, double h);

// Analytic continuation of the moment formula in h through the gamma-ratio
// closed form; finite wherever (mu-h)/q and (nu+h)/q avoid the gamma poles.
double gb2_moment_continued(const Gb2Params& p, double h);

// n iid draws via the beta-ratio representation c = c1*(X/Y)^(1/q),
// X ~ Gamma(nu/q), Y ~ Gamma(mu/q). Deterministic given the seed.
std::vector<double> gb2_sample(const Gb2Params& p, std::uint64_t seed,
                               std::size_t n);

}  // namespace prodist

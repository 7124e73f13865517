#pragma once

#include <cstddef>
#include <vector>

#include "prodist/gb2.hpp"

namespace prodist {

// Distribution of firm productivity levels ("density of energy levels").
// Continuous families (gb2, exponential) carry a pdf; the empirical kind is
// a uniform mixture of point masses at the given levels.
//
// tail_mu / tail_c0 describe the upper power-law asymptote
// P_>(c) ~ (c/c0)^(-mu). Kinds whose tails fall faster than any power law
// (exponential, empirical) report tail_mu = +infinity; tail_c0 then holds a
// characteristic scale (1/lambda, resp. the largest level).
struct FirmDistribution {
  enum class Kind { gb2, exponential, empirical };

  Kind kind = Kind::exponential;
  Gb2Params gb2{1.0, 1.0, 1.0, 1.0};  // valid iff kind == gb2
  double lambda = 1.0;                // valid iff kind == exponential
  std::vector<double> levels;         // valid iff kind == empirical; sorted

  double tail_mu = 0.0;
  double tail_c0 = 0.0;

  static FirmDistribution make_gb2(const Gb2Params& params);
  static FirmDistribution make_exponential(double rate);
  static FirmDistribution make_empirical(std::vector<double> levels);

  // The mean <c>_0 diverges when the tail index is at or below 1.
  bool infinite_mean() const { return !(tail_mu > 1.0); }

  // Firm-level density p^F(c); throws for the empirical kind (point masses
  // have no density).
  double pdf(double c) const;
};

// Cached (beta, Z, D) rows for fast demand inversion inside sampling loops.
// Rows are strictly monotone: Z and D decrease as beta increases. Immutable
// once built, hence safe to share across threads.
class EquilibriumTable {
 public:
  const std::vector<double>& betas() const { return betas_; }
  const std::vector<double>& Z() const { return z_; }
  const std::vector<double>& D() const { return d_; }

  // Monotone-cubic interpolated inverse of D(beta). Demands outside the
  // tabulated D range throw demand_out_of_range_error.
  double invert(double demand) const;

 private:
  friend EquilibriumTable tabulate_equilibrium(const FirmDistribution&,
                                               const std::vector<double>&);
  std::vector<double> betas_, z_, d_;
  // interpolation knots: x = -log D (increasing), y = log beta, plus
  // Fritsch-Carlson slopes that keep the cubic monotone
  std::vector<double> x_, y_, slope_;
};

// Z(beta) = integral of exp(-beta c) over the firm distribution; Z(0) = 1.
double partition_function(const FirmDistribution& firm, double beta);

// <c^n>_beta, the exp(-beta c)-weighted n-th productivity moment.
// Diverges (throws divergent_moment_error) when beta = 0 and n >= tail_mu.
double moment(const FirmDistribution& firm, double beta, unsigned n);

// D(beta) = <c>_beta = -(d/d beta) ln Z(beta).
double mean_demand(const FirmDistribution& firm, double beta);

// Unique beta >= 0 with mean_demand(beta) = D, by bracketing + bisection to
// 1e-10 relative. Valid demands lie strictly between the beta -> infinity
// limit (0 for continuous kinds, the smallest level for empirical ones) and
// the beta = 0 mean.
double invert_demand(const FirmDistribution& firm, double D);

// Worker-level density at inverse temperature beta:
// p^W(c) = exp(-beta c) p^F(c) / Z(beta). Continuous kinds only.
double worker_pdf(const FirmDistribution& firm, double beta, double c);

// Small-beta expansion of mean_demand with the regime selected by tail_mu:
// quadratic-fluctuation term for tail_mu > 2, fractional power
// beta^(tail_mu - 1) for 1 < tail_mu < 2, and the logarithmic boundary
// branch when |tail_mu - 2| < 1e-9. Throws divergent_moment_error when the
// mean itself diverges (tail_mu <= 1).
double demand_small_beta(const FirmDistribution& firm, double beta);

// Evaluate (beta, Z, D) on an increasing positive grid and prepare the
// interpolated inverse. Throws if the grid is invalid or the tabulated
// values fail the monotonicity invariants.
EquilibriumTable tabulate_equilibrium(const FirmDistribution& firm,
                                      const std::vector<double>& beta_grid);

}  // namespace prodist

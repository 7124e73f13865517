#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "prodist/equilibrium.hpp"
#include "prodist/errors.hpp"
#include "prodist/gb2.hpp"
#include "prodist/superstat.hpp"

using namespace prodist;

TEST_CASE("generalized Boltzmann factor") {
  SUBCASE("point mass is the plain exponential") {
    const BetaWeight w = BetaWeight::make_point_mass(2.0);
    CHECK(generalized_boltzmann(w, 1.0) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  }
  SUBCASE("uniform rate mixture has the closed form (1-e^-c)/c") {
    const BetaWeight w = BetaWeight::make_power_law(0.0, 1.0);
    CHECK(generalized_boltzmann(w, 10.0) ==
          doctest::Approx(0.099995460007023752).epsilon(1e-10));
    CHECK(generalized_boltzmann(w, 0.3) ==
          doctest::Approx((1.0 - std::exp(-0.3)) / 0.3).epsilon(1e-10));
  }
  SUBCASE("power-law mixture attains its Gamma-function limit") {
    const BetaWeight w = BetaWeight::make_power_law(0.5, 1.0);
    const double c = 1e4;
    // B(c) -> Gamma(1-g) (1-g) beta_max^(g-1) c^(g-1)
    const double limit = 1.772453850905516 * 0.5 * std::pow(c, -0.5);
    CHECK(generalized_boltzmann(w, c) ==
          doctest::Approx(limit).epsilon(0.02));
  }
  SUBCASE("empirical mixture averages the exponentials") {
    const BetaWeight w = BetaWeight::make_empirical({1.0, 2.0});
    CHECK(generalized_boltzmann(w, 0.7) ==
          doctest::Approx(0.5 * (std::exp(-0.7) + std::exp(-1.4)))
              .epsilon(1e-14));
  }
  SUBCASE("log-log slope tends to gamma - 1") {
    for (double g : {0.0, 0.25, 0.5, 0.75}) {
      const BetaWeight w = BetaWeight::make_power_law(g, 2.0);
      const double c = 1e4 / w.beta_max;
      const double slope =
          (std::log(generalized_boltzmann(w, c * 1.1)) -
           std::log(generalized_boltzmann(w, c / 1.1))) /
          (std::log(c * 1.1) - std::log(c / 1.1));
      CAPTURE(g);
      CHECK(slope == doctest::Approx(g - 1.0).epsilon(0.02));
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(BetaWeight::make_power_law(1.0, 1.0),
                    normalizability_error);
    CHECK_THROWS_AS(BetaWeight::make_power_law(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(BetaWeight::make_point_mass(-1.0), std::domain_error);
    CHECK_THROWS_AS(
        generalized_boltzmann(BetaWeight::make_point_mass(1.0), 0.0),
        std::domain_error);
  }
}

TEST_CASE("superstatistical worker density") {
  const FirmDistribution firm =
      FirmDistribution::make_gb2(Gb2Params(2.2, 1.2, 1.0, 1.0));

  SUBCASE("point-mass weight reduces to the fixed-beta worker density") {
    const double beta = 0.35;
    const BetaWeight w = BetaWeight::make_point_mass(beta);
    for (double c : {0.1, 1.0, 5.0, 40.0}) {
      CHECK(worker_pdf_super(firm, w, c) ==
            doctest::Approx(worker_pdf(firm, beta, c)).epsilon(1e-10));
    }
  }
  SUBCASE("density integrates to one") {
    const BetaWeight w = BetaWeight::make_power_law(0.4, 1.5);
    const auto f = [&](double c) { return worker_pdf_super(firm, w, c); };
    const double total = oracle::integrate(f, 1e-300, 1.0, 1e-12) +
                         oracle::integrate_to_inf(f, 1.0, 1e-12);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("upper tail follows the transferred Pareto index") {
    const FirmDistribution heavy =
        FirmDistribution::make_gb2(Gb2Params(1.8, 1.2, 1.0, 1.0));
    const BetaWeight w = BetaWeight::make_power_law(0.6, 1.0);
    const SuperstatWorker worker(heavy, w);
    // mu_w = mu_f - gamma + 1 = 1.8 - 0.6 + 1 = 2.2
    const double lo = 1e2, hi = 1e4;
    const double slope = (std::log(worker.cdf_upper(hi)) -
                          std::log(worker.cdf_upper(lo))) /
                         (std::log(hi) - std::log(lo));
    CHECK(slope == doctest::Approx(-2.2).epsilon(0.05));
  }
  SUBCASE("exponential firm with mixed rates") {
    const FirmDistribution expo = FirmDistribution::make_exponential(1.0);
    const BetaWeight w = BetaWeight::make_empirical({0.5, 1.5});
    const SuperstatWorker worker(expo, w);
    // Z_B = (1/2)(1/1.5 + 1/2.5); pdf(c) = (1/Z_B) e^(-c) (e^(-c/2)+e^(-3c/2))/2
    const double zb = 0.5 * (1.0 / 1.5 + 1.0 / 2.5);
    CHECK(worker.normalization() == doctest::Approx(zb).epsilon(1e-12));
    const double c = 0.8;
    const double want = std::exp(-c) * 0.5 *
                        (std::exp(-0.5 * c) + std::exp(-1.5 * c)) / zb;
    CHECK(worker.pdf(c) == doctest::Approx(want).epsilon(1e-12));
    // cdf_upper via the closed-form mixture of exponential tails
    const double tail = 0.5 * ((1.0 / 1.5) * std::exp(-1.5 * c) +
                               (1.0 / 2.5) * std::exp(-2.5 * c)) /
                        zb;
    CHECK(worker.cdf_upper(c) == doctest::Approx(tail).epsilon(1e-10));
  }
}

TEST_CASE("demand sampling from the fluctuation law") {
  SUBCASE("flat law: uniform on (d_min, c_mean)") {
    const auto draws = sample_demand({0.0, 1.0, 0.0}, 8, 1000000);
    double mean = 0.0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    CHECK(mean == doctest::Approx(0.5).epsilon(2e-3));
  }
  SUBCASE("support is the open interval") {
    const auto draws = sample_demand({0.5, 2.0, 0.25}, 9, 100000);
    for (double d : draws) {
      CHECK(d > 0.25);
      CHECK(d < 2.0);
    }
  }
  SUBCASE("density slope of the gap 1 - D matches -delta") {
    const auto draws = sample_demand({0.5, 1.0, 0.0}, 10, 1000000);
    std::vector<double> gap(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) gap[i] = 1.0 - draws[i];
    const double slope = oracle::log_histogram_slope(gap, 1e-4, 1e-1, 24);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.06));
  }
  SUBCASE("determinism and validation") {
    CHECK(sample_demand({0.3, 1.0, 0.0}, 4, 100) ==
          sample_demand({0.3, 1.0, 0.0}, 4, 100));
    CHECK_THROWS_AS(sample_demand({1.0, 1.0, 0.0}, 4, 10),
                    normalizability_error);
    CHECK_THROWS_AS(sample_demand({0.3, -1.0, 0.0}, 4, 10),
                    std::domain_error);
    CHECK_THROWS_AS(sample_demand({0.3, 1.0, 2.0}, 4, 10), std::domain_error);
  }
}

TEST_CASE("fluctuation exponent transfer map") {
  SUBCASE("upper branch passes delta through") {
    CHECK(gamma_from_delta(0.4, 3.0) == doctest::Approx(0.4).epsilon(1e-14));
  }
  SUBCASE("lower branch direct substitution") {
    CHECK(gamma_from_delta(0.5, 1.5) == doctest::Approx(0.75).epsilon(1e-14));
  }
  SUBCASE("continuous at the regime boundary") {
    const double below = gamma_from_delta(0.3, 2.0 - 1e-9);
    const double above = gamma_from_delta(0.3, 2.0 + 1e-9);
    CHECK(std::fabs(below - 0.3) < 1e-8);
    CHECK(std::fabs(above - 0.3) < 1e-8);
  }
  SUBCASE("theory domain") {
    CHECK_THROWS_AS(gamma_from_delta(0.5, 1.0), out_of_theory_error);
    CHECK_THROWS_AS(gamma_from_delta(0.5, 0.3), out_of_theory_error);
    CHECK_THROWS_AS(gamma_from_delta(1.0, 2.5), normalizability_error);
  }
}

TEST_CASE("Pareto index transfer between aggregation levels") {
  SUBCASE("direct substitutions") {
    CHECK(predict_mu_w(3.0, 0.5) == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(predict_mu_w(1.5, 0.5) == doctest::Approx(1.75).epsilon(1e-14));
  }
  SUBCASE("aggregation always raises the index") {
    for (double mu_f = 1.05; mu_f <= 4.0; mu_f += 0.05) {
      for (double delta = -2.0; delta < 1.0; delta += 0.1) {
        CHECK(predict_mu_w(mu_f, delta) > mu_f);
      }
    }
  }
  SUBCASE("continuous at mu_f -> 1 with limit 1") {
    for (double delta : {-1.0, 0.0, 0.5, 0.9}) {
      const double eps = 1e-8;
      const double v = predict_mu_w(1.0 + eps, delta);
      CAPTURE(delta);
      CHECK(std::fabs(v - 1.0) < 1e-6);
    }
  }
  SUBCASE("inverse map undoes the forward map") {
    for (double mu_w : {1.4, 2.0, 2.2, 3.1, 4.5}) {
      for (double delta : {-1.5, 0.0, 0.5, 0.9}) {
        const double mu_f = predict_mu_f(mu_w, delta);
        CHECK(predict_mu_w(mu_f, delta) ==
              doctest::Approx(mu_w).epsilon(1e-12));
      }
    }
  }
  SUBCASE("downward iteration approaches 1 and never crosses") {
    double mu = 3.0;
    for (int step = 0; step < 60; ++step) {
      const double next = predict_mu_f(mu, 0.5);
      CHECK(next < mu);
      CHECK(next > 1.0);
      mu = next;
    }
    CHECK(mu < 1.05);
  }
}

TEST_CASE("inferring the fluctuation exponent from an index pair") {
  SUBCASE("direct substitutions") {
    const DeltaInference a = infer_delta(2.5, 3.0);
    CHECK(a.delta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(a.theory_consistent);
    const DeltaInference b = infer_delta(1.5, 1.75);
    CHECK(b.delta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.theory_consistent);
  }
  SUBCASE("round trip across the grid") {
    for (int i = 0; i < 50; ++i) {
      const double mu_f = 1.0 + (i + 1) * (3.0 / 50.0);
      for (int j = 0; j < 50; ++j) {
        const double delta = -2.0 + j * (2.99 / 49.0);
        const double mu_w = predict_mu_w(mu_f, delta);
        const DeltaInference inf = infer_delta(mu_f, mu_w);
        CHECK(std::fabs(inf.delta - delta) <= 1e-12);
        CHECK(inf.theory_consistent);
      }
    }
  }
  SUBCASE("theory violation is flagged, not thrown") {
    const DeltaInference bad = infer_delta(2.5, 2.0);
    CHECK_FALSE(bad.theory_consistent);
    CHECK(bad.delta >= 1.0);
    CHECK_THROWS_AS(infer_delta(0.9, 2.0), out_of_theory_error);
  }
}

TEST_CASE("default upper cutoff for the rate mixture") {
  const FirmDistribution firm =
      FirmDistribution::make_gb2(Gb2Params(2.5, 1.2, 1.5, 2.0));
  const double beta_max = default_beta_max(firm);
  CHECK(mean_demand(firm, beta_max) ==
        doctest::Approx(0.01 * mean_demand(firm, 0.0)).epsilon(1e-6));
}

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "prodist/errors.hpp"
#include "prodist/gb2.hpp"
#include "prodist/tail_fit.hpp"

using namespace prodist;

namespace {

ProductivityRecord rec(const char* firm, double c) {
  ProductivityRecord r;
  r.firm_id = firm;
  r.year = 2000;
  r.sector_id = "S01";
  r.employees = 1;
  r.sales_yen = c;
  r.c = c;
  return r;
}

double log_lik_at(const Gb2Params& p, const std::vector<double>& sample) {
  double s = 0.0;
  for (double v : sample) s += gb2_log_pdf(p, v);
  return s;
}

}  // namespace

TEST_CASE("maximum likelihood round trip recovers the tail index") {
  const Gb2Params truth(2.2, 1.0, 1.5, 50.0);
  const auto draws = gb2_sample(truth, 101, 50000);
  const FitResult fit = fit_gb2_mle(draws);
  CHECK(fit.converged);
  CHECK(fit.n_used == 50000);
  CHECK(fit.params.mu == doctest::Approx(2.2).epsilon(0.1 / 2.2));
  CHECK(fit.se_mu > 0.0);
  CHECK(fit.se_mu < 0.2);
}

TEST_CASE("fitted likelihood is at least the likelihood at the truth") {
  const Gb2Params truth(1.8, 0.9, 1.2, 10.0);
  const auto draws = gb2_sample(truth, 5, 5000);
  const FitResult fit = fit_gb2_mle(draws);
  CHECK(fit.converged);
  CHECK(fit.log_likelihood >= log_lik_at(truth, draws) - 1e-6);
}

TEST_CASE("constant sample never reports a spurious converged fit") {
  const std::vector<double> flat(200, 3.5);
  const FitResult fit = fit_gb2_mle(flat);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(fit_gb2_mle(std::vector<double>(10, 1.0)),
                  insufficient_data_error);
  std::vector<double> bad(100, 1.0);
  bad[50] = -2.0;
  CHECK_THROWS_AS(fit_gb2_mle(bad), std::domain_error);
}

TEST_CASE("fit is invariant under input permutation") {
  const auto draws = gb2_sample(Gb2Params(2.0, 1.0, 1.0, 5.0), 17, 3000);
  auto shuffled = draws;
  std::mt19937_64 eng(99);
  std::shuffle(shuffled.begin(), shuffled.end(), eng);
  const FitResult a = fit_gb2_mle(draws);
  const FitResult b = fit_gb2_mle(shuffled);
  CHECK(a.params.mu == b.params.mu);
  CHECK(a.params.nu == b.params.nu);
  CHECK(a.params.q == b.params.q);
  CHECK(a.params.c1 == b.params.c1);
  CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("weighted fit with unit weights equals the plain fit") {
  const auto draws = gb2_sample(Gb2Params(2.3, 1.1, 1.4, 2.0), 23, 2000);
  std::vector<WeightedSample> weighted(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) weighted[i] = {draws[i], 1.0};
  const FitResult a = fit_gb2_mle(draws);
  const FitResult b = fit_gb2_mle_weighted(weighted);
  CHECK(a.params.mu == doctest::Approx(b.params.mu).epsilon(1e-12));
  CHECK(a.log_likelihood == doctest::Approx(b.log_likelihood).epsilon(1e-12));
}

TEST_CASE("weighted fit equals plain fit on the replicated sample") {
  const auto values = gb2_sample(Gb2Params(2.0, 1.2, 1.0, 1.0), 31, 300);
  std::vector<WeightedSample> weighted;
  std::vector<double> replicated;
  std::mt19937_64 eng(7);
  for (double v : values) {
    const double w = 1.0 + static_cast<double>(eng() % 5);
    weighted.push_back({v, w});
    for (int i = 0; i < static_cast<int>(w); ++i) replicated.push_back(v);
  }
  const FitResult a = fit_gb2_mle_weighted(weighted);
  const FitResult b = fit_gb2_mle(replicated);
  CHECK(a.params.mu == doctest::Approx(b.params.mu).epsilon(1e-9));
  CHECK(a.log_likelihood == doctest::Approx(b.log_likelihood).epsilon(1e-12));
}

TEST_CASE("sample-size doubling shrinks the mean absolute error") {
  const Gb2Params truth(2.2, 1.0, 1.5, 50.0);
  double mae_small = 0.0;
  double mae_large = 0.0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const auto small = gb2_sample(truth, 1000 + t, 20000);
    const auto large = gb2_sample(truth, 2000 + t, 40000);
    mae_small += std::fabs(fit_gb2_mle(small).params.mu - truth.mu);
    mae_large += std::fabs(fit_gb2_mle(large).params.mu - truth.mu);
  }
  CHECK(mae_large / trials < mae_small / trials);
}

TEST_CASE("hill estimator: hand-computable order statistics") {
  const std::vector<double> s = {std::exp(3.0), std::exp(2.0), std::exp(1.0),
                                 1.0};
  CHECK(hill_estimator(s, 3) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("hill estimator recovers an exact Pareto index") {
  const auto draws = oracle::pareto_sample(1.5, 1.0, 100000, 2024);
  const double got = hill_estimator(draws, 316);
  CHECK(got == doctest::Approx(1.5).epsilon(0.10));
}

TEST_CASE("hill estimator degenerate and domain errors") {
  CHECK_THROWS_AS(hill_estimator(std::vector<double>(50, 2.0), 10),
                  degenerate_tail_error);
  CHECK_THROWS_AS(hill_estimator({1.0, 2.0, 3.0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(hill_estimator({1.0, 2.0, 3.0}, 0), std::invalid_argument);
}

TEST_CASE("weighted hill equals plain hill on the replicated sample") {
  const auto values = gb2_sample(Gb2Params(1.7, 1.0, 1.0, 1.0), 13, 500);
  std::vector<WeightedSample> weighted;
  std::vector<double> replicated;
  std::mt19937_64 eng(3);
  for (double v : values) {
    const double w = 1.0 + static_cast<double>(eng() % 4);
    weighted.push_back({v, w});
    for (int i = 0; i < static_cast<int>(w); ++i) replicated.push_back(v);
  }
  const double k = 120.0;
  CHECK(hill_estimator_weighted(weighted, k) ==
        doctest::Approx(hill_estimator(replicated, 120)).epsilon(1e-12));
}

TEST_CASE("hill and MLE agree on heavy-tailed samples") {
  for (double mu : {1.5, 2.5}) {
    const Gb2Params truth(mu, 1.0, 1.0, 1.0);
    const auto draws = gb2_sample(truth, 77, 100000);
    const double hill = hill_estimator(draws, 316);
    const FitResult fit = fit_gb2_mle(draws);
    CAPTURE(mu);
    CHECK(fit.converged);
    CHECK(std::fabs(hill - fit.params.mu) <= 0.2);
  }
}

TEST_CASE("cuts: top-k removal count and tie handling") {
  std::vector<ProductivityRecord> records;
  for (int i = 0; i < 3000; ++i) {
    records.push_back(rec(("F" + std::to_string(i)).c_str(), 1.0 + i * 0.001));
  }
  const CutResult r = apply_cuts(records, CutPolicy{CutMode::top_k, 10, 1e9});
  CHECK_FALSE(r.removed_all);
  CHECK(r.records.size() == 2990);
  // the ten largest c values are gone
  double cmax = 0.0;
  for (const auto& x : r.records) cmax = std::max(cmax, x.c);
  CHECK(cmax == doctest::Approx(1.0 + 2989 * 0.001));

  SUBCASE("ties removed from the back of the input order") {
    std::vector<ProductivityRecord> tied = {rec("A", 5.0), rec("B", 5.0),
                                            rec("C", 5.0), rec("D", 1.0)};
    const CutResult t = apply_cuts(tied, CutPolicy{CutMode::top_k, 1, 1e9});
    REQUIRE(t.records.size() == 3);
    CHECK(t.records[0].firm_id == "A");
    CHECK(t.records[1].firm_id == "B");
    CHECK(t.records[2].firm_id == "D");
  }
}

TEST_CASE("cuts: threshold keeps only values at or below the cap") {
  std::vector<ProductivityRecord> records = {rec("A", 2e9), rec("B", 5e8)};
  const CutResult r =
      apply_cuts(records, CutPolicy{CutMode::threshold, 10, 1e9});
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].firm_id == "B");

  SUBCASE("idempotent") {
    const CutResult again =
        apply_cuts(r.records, CutPolicy{CutMode::threshold, 10, 1e9});
    CHECK(again.records.size() == r.records.size());
  }
}

TEST_CASE("cuts: none is the identity") {
  std::vector<ProductivityRecord> records = {rec("A", 3.0), rec("B", 1.0)};
  const CutResult r = apply_cuts(records, CutPolicy{CutMode::none, 10, 1e9});
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].firm_id == "A");
  CHECK(r.records[1].firm_id == "B");
}

TEST_CASE("cuts: double top-k removes twice as many") {
  std::vector<ProductivityRecord> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back(rec(("F" + std::to_string(i)).c_str(), 1.0 + i));
  }
  const CutPolicy policy{CutMode::top_k, 10, 1e9};
  const CutResult once = apply_cuts(records, policy);
  const CutResult twice = apply_cuts(once.records, policy);
  CHECK(once.records.size() == 90);
  CHECK(twice.records.size() == 80);
}

TEST_CASE("cuts: removing everything raises the flag, not an error") {
  std::vector<ProductivityRecord> records = {rec("A", 1.0), rec("B", 2.0)};
  const CutResult r = apply_cuts(records, CutPolicy{CutMode::top_k, 5, 1e9});
  CHECK(r.removed_all);
  CHECK(r.records.empty());
}

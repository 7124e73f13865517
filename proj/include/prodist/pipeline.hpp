#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "prodist/gb2.hpp"
#include "prodist/records.hpp"
#include "prodist/tail_fit.hpp"

namespace prodist {

// One rejected CSV row: the 1-based line number plus what was wrong.
struct IngestIssue {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<ProductivityRecord> records;
  std::vector<IngestIssue> issues;
};

// Parse a panel CSV with the exact header
//   firm_id,year,sector_id,sales_yen,employees
// computing c = sales_yen / employees per row. Malformed rows are skipped
// and reported in `issues`; header problems throw schema_error.
IngestResult ingest_csv(const std::string& path);

// Inverse of ingest_csv: numbers are written with enough digits (%.17g)
// that a write-then-read round trip reproduces every field bit-exactly.
void write_csv(const std::vector<ProductivityRecord>& records,
               const std::string& path);

enum class Level { worker, firm, sector };

// Productivity sample at one aggregation level, sorted ascending:
//   firm   - one c per distinct firm_id
//   worker - each record's c replicated `employees` times
//   sector - ratio of sums (total sales / total employees) per sector_id
std::vector<double> aggregate(const std::vector<ProductivityRecord>& records,
                              Level level);

// Memory-friendly form of the worker level: one entry per firm carrying its
// productivity level and the firm's total employee count as weight (the
// replicated sample collapsed firm by firm).
std::vector<WeightedSample> aggregate_worker_weighted(
    const std::vector<ProductivityRecord>& records);

// Fitted tail index for one aggregation level, with the independent Hill
// cross-check at depth floor(sqrt(sample size)).
struct LevelEstimate {
  double mu = 0.0;
  double se_mu = 0.0;
  double hill_mu = 0.0;
  bool converged = false;
  bool hill_available = false;
  std::size_t n = 0;
};

struct YearReport {
  int year = 0;
  std::size_t n_firms = 0;
  std::size_t n_workers = 0;
  std::size_t n_sectors = 0;
  CutPolicy cut;
  LevelEstimate worker;
  LevelEstimate firm;
  LevelEstimate sector;
  double delta = 0.0;
  bool delta_available = false;   // requires converged worker and firm fits
  bool delta_consistent = false;  // mu_w > mu_f, i.e. inferred delta < 1
  bool ordering_law2 = false;     // mu_w > mu_f > mu_s with all three fits
};

// Single-year analysis: apply cuts, build the three aggregation samples,
// fit each (worker level through the weighted likelihood), cross-check with
// the Hill estimator, and infer delta from (mu_f, mu_w). Fewer than 50
// distinct firms after cuts throws insufficient_data_error.
YearReport analyze_year(const std::vector<ProductivityRecord>& records,
                        const CutPolicy& cut);

// Group records by year (ascending) and analyze each year independently.
std::vector<YearReport> analyze_panel(
    const std::vector<ProductivityRecord>& records, const CutPolicy& cut);

struct SynthConfig {
  std::size_t firms = 1000;
  std::size_t workers = 100000;
  Gb2Params firm_params{2.0, 1.0, 1.0, 50.0};
  double delta = 0.5;
  std::size_t periods = 100;
  std::uint64_t seed = 1;
  int year = 2000;          // all periods share it: the panel is pooled
  std::size_t sectors = 20; // c-quantile blocks
};

// Boltzmann-allocation panel generator. Draws firm levels once from the
// GB2, then per period draws aggregate demand D from the delta power law,
// inverts it to beta on the empirical firm distribution, and allocates the
// workers multinomially with p_k proportional to exp(-beta c_k). Emits one
// record per firm-period with sales = n_k c_k (firms with n_k = 0 omitted);
// every period's employee counts sum to `workers` exactly.
std::vector<ProductivityRecord> synth_generate(const SynthConfig& cfg);

// The demand draws D_t the generator targets, in period order. Exposed so
// callers can check the realized per-period allocation against its target.
std::vector<double> synth_demand_sequence(const SynthConfig& cfg);

// Rank-size file for log-log cdf plots: per distinct value v, one line
// "v P" with P = (number of sample points >= v) / n, descending in v.
void emit_plotdata(const std::vector<double>& sample, const std::string& path);
void emit_plotdata_weighted(const std::vector<WeightedSample>& sample,
                            const std::string& path);

// Key-value text report, one block per year, 6 significant digits,
// "na" for unavailable values. Identical inputs produce identical bytes.
void write_report(const std::vector<YearReport>& reports, std::ostream& out);
std::string format_report(const std::vector<YearReport>& reports);

}  // namespace prodist

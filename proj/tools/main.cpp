#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prodist/errors.hpp"
#include "prodist/pipeline.hpp"
#include "prodist/superstat.hpp"
#include "prodist/tail_fit.hpp"

namespace {

using namespace prodist;

CutPolicy parse_cut(const std::string& spec) {
  CutPolicy policy;
  if (spec == "none") {
    policy.mode = CutMode::none;
    return policy;
  }
  if (spec.rfind("top", 0) == 0) {
    policy.mode = CutMode::top_k;
    policy.k = static_cast<std::size_t>(std::stoul(spec.substr(3)));
    if (policy.k < 1) throw CLI::ValidationError("--cut", "top_k needs k >= 1");
    return policy;
  }
  if (spec.rfind("threshold=", 0) == 0) {
    policy.mode = CutMode::threshold;
    policy.c_max = std::stod(spec.substr(10));
    if (!(policy.c_max > 0.0)) {
      throw CLI::ValidationError("--cut", "threshold needs c_max > 0");
    }
    return policy;
  }
  throw CLI::ValidationError(
      "--cut", "expected top<k>, threshold=<v> or none, got '" + spec + "'");
}

Level parse_level(const std::string& s) {
  if (s == "worker") return Level::worker;
  if (s == "firm") return Level::firm;
  if (s == "sector") return Level::sector;
  throw CLI::ValidationError("--level",
                             "expected worker, firm or sector, got '" + s + "'");
}

std::vector<ProductivityRecord> load_records(const std::string& path,
                                             std::optional<int> year) {
  IngestResult in = ingest_csv(path);
  for (const auto& issue : in.issues) {
    std::cerr << path << ": " << issue.message << " (row skipped)\n";
  }
  if (!year) return std::move(in.records);
  std::vector<ProductivityRecord> filtered;
  for (auto& r : in.records) {
    if (r.year == *year) filtered.push_back(std::move(r));
  }
  return filtered;
}

int cmd_fit(const std::string& csv, std::optional<int> year,
            const std::string& level_name, const std::string& cut_spec) {
  const Level level = parse_level(level_name);
  const CutPolicy cut = parse_cut(cut_spec);
  const auto records = load_records(csv, year);
  const CutResult cr = apply_cuts(records, cut);
  if (cr.removed_all) {
    std::cerr << "error: the cut removed every record\n";
    return 1;
  }

  FitResult fit;
  double hill = std::numeric_limits<double>::quiet_NaN();
  if (level == Level::worker) {
    const auto sample = aggregate_worker_weighted(cr.records);
    fit = fit_gb2_mle_weighted(sample);
    double total = 0.0;
    for (const auto& e : sample) total += e.weight;
    const double k = std::floor(std::sqrt(total));
    if (k >= 1.0 && total >= k + 1.0) hill = hill_estimator_weighted(sample, k);
  } else {
    const auto sample = aggregate(cr.records, level);
    fit = fit_gb2_mle(sample);
    const std::size_t k = static_cast<std::size_t>(
        std::floor(std::sqrt(static_cast<double>(sample.size()))));
    if (k >= 1 && k + 1 <= sample.size()) hill = hill_estimator(sample, k);
  }

  std::printf("level %s\n", level_name.c_str());
  std::printf("n %zu\n", fit.n_used);
  std::printf("mu %.6g\n", fit.params.mu);
  std::printf("nu %.6g\n", fit.params.nu);
  std::printf("q %.6g\n", fit.params.q);
  std::printf("c1 %.6g\n", fit.params.c1);
  std::printf("se_mu %.6g\n", fit.se_mu);
  std::printf("log_likelihood %.6g\n", fit.log_likelihood);
  std::printf("converged %s\n", fit.converged ? "yes" : "no");
  if (std::isfinite(hill)) {
    std::printf("hill_mu %.6g\n", hill);
  } else {
    std::printf("hill_mu na\n");
  }
  return 0;
}

int cmd_analyze(const std::string& csv, const std::string& out_path,
                const std::string& cut_spec) {
  const CutPolicy cut = parse_cut(cut_spec);
  const auto records = load_records(csv, std::nullopt);
  const auto reports = analyze_panel(records, cut);
  if (out_path.empty()) {
    write_report(reports, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw io_error("analyze: cannot write " + out_path);
    write_report(reports, out);
  }
  return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_path) {
  const auto records = synth_generate(cfg);
  write_csv(records, out_path);
  std::cerr << "wrote " << records.size() << " records to " << out_path
            << "\n";
  return 0;
}

int cmd_plotdata(const std::string& csv, const std::string& level_name,
                 int year, const std::string& out_path) {
  const Level level = parse_level(level_name);
  const auto records = load_records(csv, year);
  if (records.empty()) {
    std::cerr << "error: no records for year " << year << "\n";
    return 1;
  }
  if (level == Level::worker) {
    emit_plotdata_weighted(aggregate_worker_weighted(records), out_path);
  } else {
    emit_plotdata(aggregate(records, level), out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Heavy-tailed productivity analysis: GB2/Pareto fitting at worker, "
      "firm and sector levels, statistical-equilibrium demand inversion, "
      "and Pareto-index transfer laws"};
  app.require_subcommand(1);

  // fit
  std::string fit_csv, fit_level = "firm", fit_cut = "top10";
  int fit_year = 0;
  bool fit_has_year = false;
  auto* fit = app.add_subcommand("fit", "Fit a GB2 tail at one level");
  fit->add_option("csv", fit_csv, "panel CSV file")->required();
  auto* fy = fit->add_option("--year", fit_year, "restrict to one year");
  fit->add_option("--level", fit_level, "worker|firm|sector (default firm)");
  fit->add_option("--cut", fit_cut, "top<k>|threshold=<v>|none (default top10)");

  // analyze
  std::string an_csv, an_out, an_cut = "top10";
  auto* analyze =
      app.add_subcommand("analyze", "Per-year three-level report with delta");
  analyze->add_option("csv", an_csv, "panel CSV file")->required();
  analyze->add_option("--out", an_out, "report path (default stdout)");
  analyze->add_option("--cut", an_cut,
                      "top<k>|threshold=<v>|none (default top10)");

  // synth
  SynthConfig cfg;
  double synth_mu = 2.0, synth_nu = 1.0, synth_q = 1.0, synth_c1 = 50.0;
  std::string synth_out = "panel.csv";
  auto* synth =
      app.add_subcommand("synth", "Generate a Boltzmann-allocation panel");
  synth->add_option("--firms", cfg.firms, "number of firms (default 1000)");
  synth->add_option("--workers", cfg.workers,
                    "number of workers (default 100000)");
  synth->add_option("--mu", synth_mu, "firm tail index (default 2)");
  synth->add_option("--nu", synth_nu, "firm lower exponent (default 1)");
  synth->add_option("--q", synth_q, "firm crossover sharpness (default 1)");
  synth->add_option("--c1", synth_c1, "firm scale (default 50)");
  synth->add_option("--delta", cfg.delta,
                    "demand fluctuation exponent (default 0.5)");
  synth->add_option("--periods", cfg.periods, "periods pooled (default 100)");
  synth->add_option("--seed", cfg.seed, "random seed (default 1)");
  synth->add_option("--out", synth_out, "output CSV (default panel.csv)");

  // plotdata
  std::string pd_csv, pd_level, pd_out;
  int pd_year = 0;
  auto* plotdata =
      app.add_subcommand("plotdata", "Rank-size data for log-log cdf plots");
  plotdata->add_option("csv", pd_csv, "panel CSV file")->required();
  plotdata->add_option("--level", pd_level, "worker|firm|sector")->required();
  plotdata->add_option("--year", pd_year, "year to plot")->required();
  plotdata->add_option("--out", pd_out, "output file")->required();

  // predict
  double pr_mu_f = 0.0, pr_delta = 0.0;
  auto* predict =
      app.add_subcommand("predict", "Aggregated index from mu_f and delta");
  predict->add_option("--mu-f", pr_mu_f, "base tail index")->required();
  predict->add_option("--delta", pr_delta, "demand exponent")->required();

  // infer-delta
  double inf_mu_f = 0.0, inf_mu_w = 0.0;
  auto* infer = app.add_subcommand(
      "infer-delta", "Demand exponent from a measured index pair");
  infer->add_option("--mu-f", inf_mu_f, "base tail index")->required();
  infer->add_option("--mu-w", inf_mu_w, "aggregated tail index")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      fit_has_year = fy->count() > 0;
      return cmd_fit(fit_csv,
                     fit_has_year ? std::optional<int>(fit_year) : std::nullopt,
                     fit_level, fit_cut);
    }
    if (*analyze) {
      return cmd_analyze(an_csv, an_out, an_cut);
    }
    if (*synth) {
      cfg.firm_params = Gb2Params(synth_mu, synth_nu, synth_q, synth_c1);
      return cmd_synth(cfg, synth_out);
    }
    if (*plotdata) {
      return cmd_plotdata(pd_csv, pd_level, pd_year, pd_out);
    }
    if (*predict) {
      const double mu_w = predict_mu_w(pr_mu_f, pr_delta);
      std::printf("mu_w %.6g\n", mu_w);
      std::printf("gamma %.6g\n", gamma_from_delta(pr_delta, pr_mu_f));
      return 0;
    }
    if (*infer) {
      const DeltaInference r = infer_delta(inf_mu_f, inf_mu_w);
      std::printf("delta %.6g\n", r.delta);
      std::printf("consistent %s\n", r.theory_consistent ? "yes" : "no");
      if (!r.theory_consistent) {
        std::cerr << "warning: mu_w <= mu_f violates the transfer relation "
                     "(inferred delta >= 1)\n";
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

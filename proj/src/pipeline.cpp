#include "prodist/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "prodist/equilibrium.hpp"
#include "prodist/errors.hpp"
#include "prodist/rng.hpp"
#include "prodist/superstat.hpp"

namespace prodist {

namespace {

constexpr const char* kCsvHeader = "firm_id,year,sector_id,sales_yen,employees";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r = std::from_chars(b, e, out, std::chars_format::general);
  return r.ec == std::errc{} && r.ptr == e;
}

template <typename Int>
bool parse_int(const std::string& s, Int& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc{} && r.ptr == e;
}

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_g6(double v) {
  if (!std::isfinite(v)) return "na";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string zero_pad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(s.begin(), width - s.size(), '0');
  return s;
}

std::size_t digits_of(std::size_t v) {
  std::size_t d = 1;
  while (v >= 10) {
    v /= 10;
    ++d;
  }
  return d;
}

}  // namespace

IngestResult ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("ingest_csv: cannot open " + path);
  }
  IngestResult res;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    throw schema_error("ingest_csv: " + path + " is empty (no header)");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw schema_error("ingest_csv: " + path + " header must be exactly '" +
                       kCsvHeader + "', got '" + line + "'");
  }

  auto reject = [&](const std::string& why) {
    res.issues.push_back({line_no, "line " + std::to_string(line_no) + ": " + why});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 5) {
      reject("expected 5 fields, got " + std::to_string(f.size()));
      continue;
    }
    ProductivityRecord rec;
    rec.firm_id = f[0];
    rec.sector_id = f[2];
    if (rec.firm_id.empty()) {
      reject("empty firm_id");
      continue;
    }
    if (rec.sector_id.empty()) {
      reject("empty sector_id");
      continue;
    }
    if (!parse_int(f[1], rec.year)) {
      reject("malformed year '" + f[1] + "'");
      continue;
    }
    if (!parse_double(f[3], rec.sales_yen) || !std::isfinite(rec.sales_yen)) {
      reject("malformed sales_yen '" + f[3] + "'");
      continue;
    }
    if (!parse_int(f[4], rec.employees)) {
      reject("malformed employees '" + f[4] + "'");
      continue;
    }
    if (rec.employees == 0) {
      reject("employees is zero: c = sales/employees would divide by zero");
      continue;
    }
    if (rec.employees < 0) {
      reject("negative employees " + std::to_string(rec.employees));
      continue;
    }
    if (!(rec.sales_yen > 0.0)) {
      reject("non-positive sales_yen " + fmt_g17(rec.sales_yen));
      continue;
    }
    rec.c = rec.sales_yen / static_cast<double>(rec.employees);
    res.records.push_back(std::move(rec));
  }
  return res;
}

void write_csv(const std::vector<ProductivityRecord>& records,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw io_error("write_csv: cannot write " + path);
  }
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.firm_id << ',' << r.year << ',' << r.sector_id << ','
        << fmt_g17(r.sales_yen) << ',' << r.employees << '\n';
  }
  if (!out) {
    throw io_error("write_csv: write failed for " + path);
  }
}

std::vector<double> aggregate(const std::vector<ProductivityRecord>& records,
                              Level level) {
  if (records.empty()) {
    throw insufficient_data_error("aggregate: empty record set");
  }
  std::vector<double> out;
  switch (level) {
    case Level::firm: {
      // one c per firm; if a firm shows up in several records (pooled
      // periods), the smallest c is taken so the result is order-free
      std::unordered_map<std::string, double> per_firm;
      for (const auto& r : records) {
        auto [it, inserted] = per_firm.emplace(r.firm_id, r.c);
        if (!inserted && r.c < it->second) it->second = r.c;
      }
      out.reserve(per_firm.size());
      for (const auto& [id, c] : per_firm) out.push_back(c);
      break;
    }
    case Level::worker: {
      std::size_t total = 0;
      for (const auto& r : records) total += static_cast<std::size_t>(r.employees);
      out.reserve(total);
      for (const auto& r : records) {
        out.insert(out.end(), static_cast<std::size_t>(r.employees), r.c);
      }
      break;
    }
    case Level::sector: {
      // the sector is treated as one production unit: c_S = sum Y / sum L
      std::map<std::string, std::pair<std::vector<double>, long long>> acc;
      for (const auto& r : records) {
        auto& [sales, employees] = acc[r.sector_id];
        sales.push_back(r.sales_yen);
        employees += r.employees;
      }
      out.reserve(acc.size());
      for (auto& [id, se] : acc) {
        std::sort(se.first.begin(), se.first.end());
        const double total_sales =
            std::accumulate(se.first.begin(), se.first.end(), 0.0);
        out.push_back(total_sales / static_cast<double>(se.second));
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WeightedSample> aggregate_worker_weighted(
    const std::vector<ProductivityRecord>& records) {
  if (records.empty()) {
    throw insufficient_data_error("aggregate_worker_weighted: empty record set");
  }
  // one entry per firm: its productivity level with the firm's total
  // employee count as the replication weight
  std::unordered_map<std::string, std::pair<double, double>> acc;
  for (const auto& r : records) {
    auto [it, inserted] =
        acc.emplace(r.firm_id,
                    std::make_pair(r.c, static_cast<double>(r.employees)));
    if (!inserted) {
      it->second.first = std::min(it->second.first, r.c);
      it->second.second += static_cast<double>(r.employees);
    }
  }
  std::vector<WeightedSample> out;
  out.reserve(acc.size());
  for (const auto& [id, vw] : acc) out.push_back({vw.first, vw.second});
  std::sort(out.begin(), out.end(), [](const WeightedSample& a,
                                       const WeightedSample& b) {
    return a.value < b.value || (a.value == b.value && a.weight < b.weight);
  });
  return out;
}

namespace {

LevelEstimate estimate_level(const std::vector<double>& sample) {
  LevelEstimate est;
  est.n = sample.size();
  try {
    const FitResult fit = fit_gb2_mle(sample);
    est.mu = fit.params.mu;
    est.se_mu = fit.se_mu;
    est.converged = fit.converged;
  } catch (const insufficient_data_error&) {
    // too small a sample at this level: reported as non-converged
  }
  const std::size_t k =
      static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(est.n))));
  if (k >= 1 && k + 1 <= est.n) {
    try {
      est.hill_mu = hill_estimator(sample, k);
      est.hill_available = true;
    } catch (const degenerate_tail_error&) {
    }
  }
  return est;
}

LevelEstimate estimate_level_weighted(const std::vector<WeightedSample>& sample) {
  LevelEstimate est;
  double total = 0.0;
  for (const auto& e : sample) total += e.weight;
  est.n = static_cast<std::size_t>(std::llround(total));
  try {
    const FitResult fit = fit_gb2_mle_weighted(sample);
    est.mu = fit.params.mu;
    est.se_mu = fit.se_mu;
    est.converged = fit.converged;
  } catch (const insufficient_data_error&) {
  }
  const double k = std::floor(std::sqrt(total));
  if (k >= 1.0 && total >= k + 1.0) {
    try {
      est.hill_mu = hill_estimator_weighted(sample, k);
      est.hill_available = true;
    } catch (const degenerate_tail_error&) {
    }
  }
  return est;
}

}  // namespace

YearReport analyze_year(const std::vector<ProductivityRecord>& records,
                        const CutPolicy& cut) {
  const CutResult cr = apply_cuts(records, cut);

  YearReport rep;
  rep.cut = cut;
  std::size_t n_firms = 0;
  {
    std::unordered_map<std::string, bool> seen;
    for (const auto& r : cr.records) seen.emplace(r.firm_id, true);
    n_firms = seen.size();
  }
  if (n_firms < 50) {
    std::ostringstream msg;
    msg << "analyze_year: needs at least 50 firms after cuts, got " << n_firms;
    throw insufficient_data_error(msg.str());
  }
  rep.n_firms = n_firms;
  rep.year = std::numeric_limits<int>::max();
  std::size_t n_workers = 0;
  for (const auto& r : cr.records) {
    rep.year = std::min(rep.year, r.year);
    n_workers += static_cast<std::size_t>(r.employees);
  }
  rep.n_workers = n_workers;

  const std::vector<double> firm_sample = aggregate(cr.records, Level::firm);
  const std::vector<WeightedSample> worker_sample =
      aggregate_worker_weighted(cr.records);
  const std::vector<double> sector_sample = aggregate(cr.records, Level::sector);
  rep.n_sectors = sector_sample.size();

  rep.firm = estimate_level(firm_sample);
  rep.worker = estimate_level_weighted(worker_sample);
  rep.sector = estimate_level(sector_sample);

  if (rep.firm.converged && rep.worker.converged && rep.firm.mu > 1.0) {
    const DeltaInference inf = infer_delta(rep.firm.mu, rep.worker.mu);
    rep.delta = inf.delta;
    rep.delta_available = true;
    rep.delta_consistent = inf.theory_consistent;
  } else {
    rep.delta = std::numeric_limits<double>::quiet_NaN();
  }

  rep.ordering_law2 = rep.worker.converged && rep.firm.converged &&
                      rep.sector.converged && rep.worker.mu > rep.firm.mu &&
                      rep.firm.mu > rep.sector.mu;
  return rep;
}

std::vector<YearReport> analyze_panel(
    const std::vector<ProductivityRecord>& records, const CutPolicy& cut) {
  std::map<int, std::vector<ProductivityRecord>> by_year;
  for (const auto& r : records) by_year[r.year].push_back(r);
  std::vector<YearReport> out;
  out.reserve(by_year.size());
  for (const auto& [year, group] : by_year) {
    out.push_back(analyze_year(group, cut));
  }
  return out;
}

namespace {

// Walker alias table: O(1) categorical draws, exact probabilities.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    prob_.resize(n);
    alias_.resize(n);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
    }
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) {
      prob_[i] = 1.0;
      alias_[i] = i;
    }
    for (std::size_t i : small) {
      prob_[i] = 1.0;
      alias_[i] = i;
    }
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform01() * static_cast<double>(prob_.size());
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= prob_.size()) i = prob_.size() - 1;
    const double frac = u - static_cast<double>(i);
    return frac < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace

namespace {

struct SynthPlan {
  std::vector<double> levels;
  double c_mean = 0.0;
  std::vector<double> demands;
};

SynthPlan make_synth_plan(const SynthConfig& cfg) {
  if (cfg.firms < 50) {
    throw std::invalid_argument("synth_generate: need at least 50 firms");
  }
  if (cfg.workers < cfg.firms) {
    throw std::invalid_argument("synth_generate: need workers >= firms");
  }
  if (cfg.periods < 1 || cfg.sectors < 1) {
    throw std::invalid_argument(
        "synth_generate: need at least one period and one sector");
  }
  if (!(cfg.delta < 1.0)) {
    throw normalizability_error(
        "synth_generate: delta must be < 1 for a normalizable demand law");
  }
  SynthPlan plan;
  plan.levels = gb2_sample(cfg.firm_params, Rng::derive(cfg.seed, 0), cfg.firms);
  const FirmDistribution emp = FirmDistribution::make_empirical(plan.levels);
  plan.c_mean = mean_demand(emp, 0.0);
  plan.demands = sample_demand({cfg.delta, plan.c_mean, 0.0},
                               Rng::derive(cfg.seed, 1), cfg.periods);
  return plan;
}

}  // namespace

std::vector<double> synth_demand_sequence(const SynthConfig& cfg) {
  return make_synth_plan(cfg).demands;
}

std::vector<ProductivityRecord> synth_generate(const SynthConfig& cfg) {
  SynthPlan plan = make_synth_plan(cfg);
  const std::size_t K = cfg.firms;
  const std::vector<double>& levels = plan.levels;

  // identifiers and c-quantile sector blocks
  const std::size_t id_width = std::max<std::size_t>(5, digits_of(K));
  const std::size_t sec_width = std::max<std::size_t>(2, digits_of(cfg.sectors));
  std::vector<std::string> firm_ids(K), sector_ids(K);
  {
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return levels[a] < levels[b] || (levels[a] == levels[b] && a < b);
    });
    for (std::size_t rank = 0; rank < K; ++rank) {
      const std::size_t firm = order[rank];
      const std::size_t block = rank * cfg.sectors / K;
      sector_ids[firm] = "S" + zero_pad(block + 1, sec_width);
    }
    for (std::size_t k = 0; k < K; ++k) {
      firm_ids[k] = "F" + zero_pad(k + 1, id_width);
    }
  }

  const FirmDistribution emp = FirmDistribution::make_empirical(levels);
  const double c_min = emp.levels.front();
  const std::size_t argmin = static_cast<std::size_t>(
      std::min_element(levels.begin(), levels.end()) - levels.begin());

  const std::vector<double>& demands = plan.demands;
  Rng alloc_rng(Rng::derive(cfg.seed, 2));

  std::vector<ProductivityRecord> out;
  out.reserve(K * std::min<std::size_t>(cfg.periods, 4));
  std::vector<long> counts(K);
  std::vector<double> boltzmann(K);

  for (std::size_t t = 0; t < cfg.periods; ++t) {
    std::fill(counts.begin(), counts.end(), 0L);
    const double d = demands[t];
    if (d <= c_min * 1.0001) {
      // beta -> infinity limit: every worker at the least productive firm
      counts[argmin] = static_cast<long>(cfg.workers);
    } else {
      const double beta = invert_demand(emp, d);
      for (std::size_t k = 0; k < K; ++k) {
        boltzmann[k] = std::exp(-beta * (levels[k] - c_min));
      }
      const AliasTable table(boltzmann);
      for (std::size_t i = 0; i < cfg.workers; ++i) {
        ++counts[table.draw(alloc_rng)];
      }
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (counts[k] == 0) continue;
      ProductivityRecord rec;
      rec.firm_id = firm_ids[k];
      rec.year = cfg.year;
      rec.sector_id = sector_ids[k];
      rec.employees = counts[k];
      rec.sales_yen = levels[k] * static_cast<double>(counts[k]);
      rec.c = rec.sales_yen / static_cast<double>(rec.employees);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

namespace {

void write_plot_lines(
    std::vector<std::pair<double, double>> value_weight,  // by value desc
    const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw io_error("emit_plotdata: cannot write " + path);
  }
  double total = 0.0;
  for (const auto& [v, w] : value_weight) total += w;
  out << "# c  P_greater (rank/n over the descending sample)\n";
  double cum = 0.0;
  for (std::size_t i = 0; i < value_weight.size(); ++i) {
    cum += value_weight[i].second;
    // ties collapse to one line carrying the largest rank
    if (i + 1 < value_weight.size() &&
        value_weight[i + 1].first == value_weight[i].first) {
      continue;
    }
    out << fmt_g12(value_weight[i].first) << ' ' << fmt_g12(cum / total)
        << '\n';
  }
  if (!out) {
    throw io_error("emit_plotdata: write failed for " + path);
  }
}

}  // namespace

void emit_plotdata(const std::vector<double>& sample, const std::string& path) {
  if (sample.empty()) {
    throw std::invalid_argument("emit_plotdata: empty sample");
  }
  std::vector<std::pair<double, double>> vw;
  vw.reserve(sample.size());
  for (double v : sample) vw.emplace_back(v, 1.0);
  std::sort(vw.begin(), vw.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  write_plot_lines(std::move(vw), path);
}

void emit_plotdata_weighted(const std::vector<WeightedSample>& sample,
                            const std::string& path) {
  if (sample.empty()) {
    throw std::invalid_argument("emit_plotdata: empty sample");
  }
  std::vector<std::pair<double, double>> vw;
  vw.reserve(sample.size());
  for (const auto& e : sample) vw.emplace_back(e.value, e.weight);
  std::sort(vw.begin(), vw.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  write_plot_lines(std::move(vw), path);
}

namespace {

const char* yes_no(bool b) { return b ? "yes" : "no"; }

void format_level(std::ostringstream& os, const char* prefix,
                  const LevelEstimate& est) {
  os << prefix << "_mu " << fmt_g6(est.mu) << '\n';
  os << prefix << "_se " << fmt_g6(est.se_mu) << '\n';
  os << prefix << "_hill "
     << (est.hill_available ? fmt_g6(est.hill_mu) : "na") << '\n';
  os << prefix << "_converged " << yes_no(est.converged) << '\n';
  os << prefix << "_n " << est.n << '\n';
}

}  // namespace

std::string format_report(const std::vector<YearReport>& reports) {
  std::ostringstream os;
  os << "# productivity tail report\n";
  os << "# per-year key-value blocks; 6 significant digits; na = "
        "unavailable\n";
  for (const auto& rep : reports) {
    os << '\n';
    os << "year " << rep.year << '\n';
    os << "n_firms " << rep.n_firms << '\n';
    os << "n_workers " << rep.n_workers << '\n';
    os << "n_sectors " << rep.n_sectors << '\n';
    switch (rep.cut.mode) {
      case CutMode::none:
        os << "cut none\n";
        break;
      case CutMode::top_k:
        os << "cut top_k " << rep.cut.k << '\n';
        break;
      case CutMode::threshold:
        os << "cut threshold " << fmt_g6(rep.cut.c_max) << '\n';
        break;
    }
    format_level(os, "worker", rep.worker);
    format_level(os, "firm", rep.firm);
    format_level(os, "sector", rep.sector);
    os << "delta " << (rep.delta_available ? fmt_g6(rep.delta) : "na") << '\n';
    os << "delta_consistent "
       << (rep.delta_available ? yes_no(rep.delta_consistent) : "na") << '\n';
    os << "ordering_law2 " << yes_no(rep.ordering_law2) << '\n';
  }
  return os.str();
}

void write_report(const std::vector<YearReport>& reports, std::ostream& out) {
  out << format_report(reports);
}

}  // namespace prodist

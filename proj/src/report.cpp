#include "sfnoise/report.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace sfnoise {

namespace {

std::size_t env_cap(const std::string& env) { return make_env(env).step_cap(); }

void append_stats(std::string& out, const SummaryStats& s) {
  fmt::format_to(std::back_inserter(out), "{},{},{},{},{}", format_number(s.mean),
                 format_number(s.q25), format_number(s.q50), format_number(s.q75),
                 format_number(s.sem));
}

}  // namespace

std::string format_number(std::optional<double> value) {
  if (!value) return "NA";
  return fmt::format("{:.6g}", *value);
}

TableSpec table_spec(std::string_view key) {
  if (key == "t1") {
    return {TableId::kT1, "t1", std::string(kChainName), TableMetric::kCumulativeReward,
            "Cumulative reward, noisy 1D chain"};
  }
  if (key == "t2") {
    return {TableId::kT2, "t2", std::string(kChainName), TableMetric::kFinalLength,
            "Final moving-averaged episode length, noisy 1D chain"};
  }
  if (key == "t3") {
    return {TableId::kT3, "t3", std::string(kGridName), TableMetric::kCumulativeReward,
            "Cumulative reward, noisy 2D grid"};
  }
  if (key == "t4") {
    return {TableId::kT4, "t4", std::string(kGridName), TableMetric::kFinalLength,
            "Final moving-averaged episode length, noisy 2D grid"};
  }
  throw std::invalid_argument(fmt::format("unknown table '{}' (expected t1, t2, t3 or t4)", key));
}

std::string paper_cell_name(std::string_view env, const RosterEntry& entry, double sigma) {
  ExperimentConfig cfg;
  cfg.env_name = std::string(env);
  cfg.agent = entry.agent;
  cfg.lambda = entry.lambda;
  cfg.sigma = sigma;
  return cfg.cell_name();
}

std::vector<double> per_trial_metric(std::span<const TrialResult> trials, TableMetric metric) {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const TrialResult& t : trials) {
    out.push_back(metric == TableMetric::kCumulativeReward ? cumulative_reward(t)
                                                           : final_window_length(t));
  }
  return out;
}

bool Dataset::has(const std::string& cell) const {
  if (cache_.contains(cell)) return true;
  std::error_code ec;
  return std::filesystem::is_regular_file(dir_ / (cell + ".csv"), ec);
}

const std::vector<TrialResult>& Dataset::get(const std::string& cell) {
  auto it = cache_.find(cell);
  if (it == cache_.end()) it = cache_.emplace(cell, read_cell_csv(dir_ / (cell + ".csv"))).first;
  return it->second;
}

TableResult build_table(const TableSpec& spec, Dataset& data) {
  TableResult table{spec, {}, {}};
  for (double sigma : paper_sigmas()) {
    for (const RosterEntry& entry : paper_roster()) {
      const std::string cell = paper_cell_name(spec.env, entry, sigma);
      if (!data.has(cell)) {
        table.missing.push_back(cell);
        continue;
      }
      const std::vector<double> values = per_trial_metric(data.get(cell), spec.metric);
      table.rows.push_back({roster_label(entry.agent, entry.lambda), sigma, cell, summarize(values)});
    }
  }
  return table;
}

std::string table_csv(const TableResult& table) {
  std::string out = "agent,sigma,mean,sem,q25,q50,q75,mean_over_sem\n";
  for (const TableRow& row : table.rows) {
    const SummaryStats& s = row.stats;
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{}\n", row.label, row.sigma,
                   format_number(s.mean), format_number(s.sem), format_number(s.q25),
                   format_number(s.q50), format_number(s.q75), format_number(s.mean_over_sem));
  }
  return out;
}

std::string table_text(const TableResult& table) {
  std::string out = fmt::format("{} ({})\n", table.spec.title, table.spec.key);
  fmt::format_to(std::back_inserter(out), "{:<8} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
                 "agent", "sigma", "mean", "sem", "q25", "q50", "q75", "mean/sem");
  for (const TableRow& row : table.rows) {
    const SummaryStats& s = row.stats;
    fmt::format_to(std::back_inserter(out), "{:<8} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
                   row.label, row.sigma, format_number(s.mean), format_number(s.sem),
                   format_number(s.q25), format_number(s.q50), format_number(s.q75),
                   format_number(s.mean_over_sem));
  }
  return out;
}

std::string plot_csv(const TableResult& table, Dataset& data) {
  std::string out = "cell,episode,mean,sem\n";
  for (const TableRow& row : table.rows) {
    std::vector<std::vector<double>> series;
    for (const TrialResult& t : data.get(row.cell)) {
      series.push_back(table.spec.metric == TableMetric::kCumulativeReward
                           ? cumulative_reward_series(t)
                           : moving_average(lengths_as_real(t)));
    }
    const std::vector<CurvePoint> curve = mean_curve(series);
    for (std::size_t e = 0; e < curve.size(); ++e) {
      fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", row.cell, e,
                     format_number(curve[e].mean), format_number(curve[e].sem));
    }
  }
  return out;
}

std::string histogram_csv(const TableResult& table, Dataset& data) {
  const std::size_t cap = env_cap(table.spec.env);
  const std::pair<const char*, BucketSpec> modes[] = {{"full", unit_buckets(cap)},
                                                      {"extremes", extremes_buckets(cap)}};
  std::string out = "cell,mode,bucket,mean,q25,q50,q75\n";
  for (const TableRow& row : table.rows) {
    const std::vector<TrialResult>& trials = data.get(row.cell);
    for (const auto& [mode, buckets] : modes) {
      const auto counts = length_histogram(trials, buckets);
      for (std::size_t b = 0; b < buckets.size(); ++b) {
        std::vector<double> column;
        for (const auto& trial_counts : counts) column.push_back(static_cast<double>(trial_counts[b]));
        const SummaryStats s = summarize(column);
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{}\n", row.cell, mode,
                       buckets[b].label, format_number(s.mean), format_number(s.q25),
                       format_number(s.q50), format_number(s.q75));
      }
    }
  }
  return out;
}

std::string thresholds_csv(const TableResult& table, Dataset& data) {
  std::string out = "cell,theta,crossed,mean,q25,q50,q75,sem\n";
  for (const TableRow& row : table.rows) {
    const std::vector<TrialResult>& trials = data.get(row.cell);
    for (std::size_t theta : kThresholds) {
      std::vector<double> firsts;
      for (const TrialResult& t : trials) {
        if (auto r = first_threshold_crossing(t, theta); r.first_episode) {
          firsts.push_back(static_cast<double>(*r.first_episode));
        }
      }
      fmt::format_to(std::back_inserter(out), "{},{},{},", row.cell, theta, firsts.size());
      if (firsts.empty()) {
        out += "NA,NA,NA,NA,NA";
      } else {
        append_stats(out, summarize(firsts));
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace sfnoise

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfnoise/config.hpp"
#include "sfnoise/metrics.hpp"

namespace sfnoise {

enum class TableId { kT1, kT2, kT3, kT4 };
enum class TableMetric { kCumulativeReward, kFinalLength };

struct TableSpec {
  TableId id;
  std::string key;  // "t1" ... "t4"
  std::string env;
  TableMetric metric;
  std::string title;
};

/// Accepts "t1" .. "t4". Throws std::invalid_argument otherwise.
TableSpec table_spec(std::string_view key);

/// Cell name of a roster entry at sigma in env.
std::string paper_cell_name(std::string_view env, const RosterEntry& entry, double sigma);

/// Per-trial statistic of a cell: cumulative reward or final moving-averaged
/// length, one value per trial.
std::vector<double> per_trial_metric(std::span<const TrialResult> trials, TableMetric metric);

/// Raw trials of every cell CSV found in a directory, keyed by cell name.
/// Cells are loaded lazily and cached.
class Dataset {
 public:
  explicit Dataset(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  bool has(const std::string& cell) const;
  /// Throws std::runtime_error if the cell file is absent or malformed.
  const std::vector<TrialResult>& get(const std::string& cell);

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::vector<TrialResult>> cache_;
};

struct TableRow {
  std::string label;
  double sigma;
  std::string cell;
  SummaryStats stats;
};

struct TableResult {
  TableSpec spec;
  std::vector<TableRow> rows;
  std::vector<std::string> missing;  // cell names without a CSV
};

/// Rows in sigma-major, roster-minor order (8 agents x 3 sigmas).
TableResult build_table(const TableSpec& spec, Dataset& data);

/// Columns agent,sigma,mean,sem,q25,q50,q75,mean_over_sem; numbers with 6
/// significant digits, "NA" where undefined.
std::string table_csv(const TableResult& table);
std::string table_text(const TableResult& table);

/// Long-format learning curves: cell,episode,mean,sem across trials of the
/// running cumulative reward (reward tables) or the moving-averaged episode
/// length (length tables).
std::string plot_csv(const TableResult& table, Dataset& data);

/// Box-plot data of per-trial episode counts per length bucket, in both the
/// full (unit bucket) and extremes (<22, 22-99, >99) modes:
/// cell,mode,bucket,mean,q25,q50,q75.
std::string histogram_csv(const TableResult& table, Dataset& data);

inline constexpr std::size_t kThresholds[] = {20, 40, 60};

/// First episode reaching each threshold:
/// cell,theta,crossed,mean,q25,q50,q75,sem over the trials that crossed.
std::string thresholds_csv(const TableResult& table, Dataset& data);

/// "{:.6g}", or "NA".
std::string format_number(std::optional<double> value);

}  // namespace sfnoise

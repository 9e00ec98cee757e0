#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfnoise/harness.hpp"

namespace sfnoise {

/// Descriptive statistics over one sample of trial-level values.
struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  /// Sample standard deviation (n - 1 divisor) over sqrt(n); empty for n < 2.
  std::optional<double> sem;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  /// mean / sem, empty when sem is undefined or zero.
  std::optional<double> mean_over_sem;
};

/// Quartiles use linear interpolation between closest ranks: the value at
/// fractional position p * (n - 1) of the sorted sample.
/// Throws std::invalid_argument on an empty sample.
SummaryStats summarize(std::span<const double> values);

/// Quantile at p in [0, 1] with the same interpolation rule as summarize().
double quantile(std::span<const double> values, double p);

double cumulative_reward(const TrialResult& trial);

/// Trailing mean over the last `window` entries, using a partial window at
/// the start, so the output has the input's length.
std::vector<double> moving_average(std::span<const double> series, std::size_t window = 20);

/// Last value of the 20-episode moving average of episode lengths.
double final_window_length(const TrialResult& trial, std::size_t window = 20);

/// Mean of raw episode lengths over the whole trial.
double mean_episode_length(const TrialResult& trial);

/// Closed interval of episode lengths counted together.
struct LengthBucket {
  std::size_t lo;
  std::size_t hi;
  std::string label;
};

using BucketSpec = std::vector<LengthBucket>;

/// One bucket per length 1..step_cap.
BucketSpec unit_buckets(std::size_t step_cap);

/// Short episodes (< short_below) individually, a single middle bucket, and
/// long episodes (> long_above) individually. With (22, 99) and cap 100 this
/// is lengths 1..21, "22-99" and 100.
BucketSpec extremes_buckets(std::size_t step_cap, std::size_t short_below = 22,
                            std::size_t long_above = 99);

/// Per-trial episode counts per bucket. Throws std::invalid_argument if an
/// episode length falls in no bucket or in more than one.
std::vector<std::vector<std::size_t>> length_histogram(std::span<const TrialResult> trials,
                                                       const BucketSpec& buckets);

struct ThresholdReport {
  std::size_t theta = 0;
  /// 0-based index of the first episode with length <= theta.
  std::optional<std::size_t> first_episode;
};

ThresholdReport first_threshold_crossing(const TrialResult& trial, std::size_t theta);

/// Per-episode mean and SEM across trials of a per-trial series.
struct CurvePoint {
  double mean;
  double sem;
};

std::vector<CurvePoint> mean_curve(std::span<const std::vector<double>> per_trial_series);

/// Running sum of episode rewards.
std::vector<double> cumulative_reward_series(const TrialResult& trial);

std::vector<double> lengths_as_real(const TrialResult& trial);

}  // namespace sfnoise

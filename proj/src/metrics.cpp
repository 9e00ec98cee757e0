#include "sfnoise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace sfnoise {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, p);
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryStats s;
  s.n = sorted.size();
  // Summing in sorted order makes the result independent of input order.
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.sem = sd / std::sqrt(static_cast<double>(s.n));
    if (*s.sem > 0.0) s.mean_over_sem = s.mean / *s.sem;
  }
  s.q25 = sorted_quantile(sorted, 0.25);
  s.q50 = sorted_quantile(sorted, 0.50);
  s.q75 = sorted_quantile(sorted, 0.75);
  return s;
}

double cumulative_reward(const TrialResult& trial) {
  return std::accumulate(trial.episode_rewards.begin(), trial.episode_rewards.end(), 0.0);
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving_average window must be >= 1");
  if (series.empty()) throw std::invalid_argument("moving_average of empty series");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i - first + 1);
  }
  return out;
}

std::vector<double> lengths_as_real(const TrialResult& trial) {
  return {trial.episode_lengths.begin(), trial.episode_lengths.end()};
}

double final_window_length(const TrialResult& trial, std::size_t window) {
  const std::vector<double> lengths = lengths_as_real(trial);
  if (lengths.empty()) throw std::invalid_argument("trial has no episodes");
  const std::size_t first = lengths.size() > window ? lengths.size() - window : 0;
  return moving_average(std::span(lengths).subspan(first), window).back();
}

double mean_episode_length(const TrialResult& trial) {
  if (trial.episode_lengths.empty()) throw std::invalid_argument("trial has no episodes");
  double sum = 0.0;
  for (std::size_t l : trial.episode_lengths) sum += static_cast<double>(l);
  return sum / static_cast<double>(trial.episode_lengths.size());
}

BucketSpec unit_buckets(std::size_t step_cap) {
  BucketSpec spec;
  spec.reserve(step_cap);
  for (std::size_t l = 1; l <= step_cap; ++l) spec.push_back({l, l, std::to_string(l)});
  return spec;
}

BucketSpec extremes_buckets(std::size_t step_cap, std::size_t short_below, std::size_t long_above) {
  BucketSpec spec;
  for (std::size_t l = 1; l < short_below && l <= step_cap; ++l) {
    spec.push_back({l, l, std::to_string(l)});
  }
  if (short_below <= long_above) {
    spec.push_back({short_below, long_above, fmt::format("{}-{}", short_below, long_above)});
  }
  for (std::size_t l = long_above + 1; l <= step_cap; ++l) spec.push_back({l, l, std::to_string(l)});
  return spec;
}

std::vector<std::vector<std::size_t>> length_histogram(std::span<const TrialResult> trials,
                                                       const BucketSpec& buckets) {
  std::vector<std::vector<std::size_t>> counts;
  counts.reserve(trials.size());
  for (const TrialResult& trial : trials) {
    std::vector<std::size_t> row(buckets.size(), 0);
    for (std::size_t len : trial.episode_lengths) {
      std::size_t hits = 0;
      for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (len >= buckets[b].lo && len <= buckets[b].hi) {
          ++row[b];
          ++hits;
        }
      }
      if (hits != 1) {
        throw std::invalid_argument(
            fmt::format("episode length {} falls in {} buckets; buckets must partition", len, hits));
      }
    }
    counts.push_back(std::move(row));
  }
  return counts;
}

ThresholdReport first_threshold_crossing(const TrialResult& trial, std::size_t theta) {
  ThresholdReport report{theta, std::nullopt};
  const auto& lengths = trial.episode_lengths;
  const auto it = std::find_if(lengths.begin(), lengths.end(), [&](std::size_t l) { return l <= theta; });
  if (it != lengths.end()) report.first_episode = static_cast<std::size_t>(it - lengths.begin());
  return report;
}

std::vector<CurvePoint> mean_curve(std::span<const std::vector<double>> per_trial_series) {
  if (per_trial_series.empty()) return {};
  const std::size_t len = per_trial_series.front().size();
  const auto n = static_cast<double>(per_trial_series.size());
  std::vector<CurvePoint> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& s : per_trial_series) sum += s.at(i);
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& s : per_trial_series) ss += (s[i] - mean) * (s[i] - mean);
    const double sem = per_trial_series.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    out[i] = {mean, sem};
  }
  return out;
}

std::vector<double> cumulative_reward_series(const TrialResult& trial) {
  std::vector<double> out(trial.episode_rewards.size());
  std::partial_sum(trial.episode_rewards.begin(), trial.episode_rewards.end(), out.begin());
  return out;
}

}  // namespace sfnoise

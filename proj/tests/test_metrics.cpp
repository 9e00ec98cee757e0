#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "sfnoise/metrics.hpp"

using namespace sfnoise;

namespace {

TrialResult trial_of(std::vector<std::size_t> lengths, std::size_t cap) {
  TrialResult t;
  t.episode_lengths = std::move(lengths);
  for (std::size_t l : t.episode_lengths) t.episode_rewards.push_back(l < cap ? 1.0 : 0.0);
  return t;
}

}  // namespace

TEST(Summarize, HandExample) {
  const std::vector<double> v{1, 2, 3};
  const SummaryStats s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  ASSERT_TRUE(s.sem);
  EXPECT_NEAR(*s.sem, 0.5774, 1e-4);
  EXPECT_DOUBLE_EQ(s.q50, 2.0);
  EXPECT_DOUBLE_EQ(s.q25, 1.5);
  EXPECT_DOUBLE_EQ(s.q75, 2.5);
  EXPECT_NEAR(*s.mean_over_sem, 2.0 / 0.57735026919, 1e-9);
}

TEST(Summarize, QuartilesInterpolateLinearly) {
  const std::vector<double> v{4, 1, 3, 2};
  const SummaryStats s = summarize(v);
  EXPECT_DOUBLE_EQ(s.q25, 1.75);
  EXPECT_DOUBLE_EQ(s.q50, 2.5);
  EXPECT_DOUBLE_EQ(s.q75, 3.25);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
}

TEST(Summarize, DegenerateSamples) {
  const std::vector<double> c{5, 5, 5, 5};
  const SummaryStats s = summarize(c);
  EXPECT_EQ(*s.sem, 0.0);
  EXPECT_FALSE(s.mean_over_sem);
  const std::vector<double> one{7};
  const SummaryStats t = summarize(one);
  EXPECT_FALSE(t.sem);
  EXPECT_EQ(t.q25, 7.0);
  EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST(Summarize, OrderInvariantAndScaleFree) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<double> v(101);
  for (double& x : v) x = u(gen);
  const SummaryStats base = summarize(v);
  std::vector<double> shuffled = v;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const SummaryStats s = summarize(shuffled);
  EXPECT_EQ(s.mean, base.mean);
  EXPECT_EQ(*s.sem, *base.sem);
  EXPECT_EQ(s.q25, base.q25);
  EXPECT_EQ(s.q75, base.q75);
  EXPECT_LE(base.q25, base.q50);
  EXPECT_LE(base.q50, base.q75);

  std::vector<double> scaled = v;
  for (double& x : scaled) x *= 3.0;
  const SummaryStats k = summarize(scaled);
  EXPECT_NEAR(k.mean, 3.0 * base.mean, 1e-9);
  EXPECT_NEAR(*k.sem, 3.0 * *base.sem, 1e-9);
  EXPECT_NEAR(*k.mean_over_sem, *base.mean_over_sem, 1e-9);
}

TEST(CumulativeReward, Sums) {
  TrialResult t;
  t.episode_rewards = {1, 0, 1};
  t.episode_lengths = {3, 100, 4};
  EXPECT_EQ(cumulative_reward(t), 2.0);
  EXPECT_EQ(cumulative_reward_series(t), (std::vector<double>{1, 1, 2}));
  TrialResult all;
  all.episode_rewards.assign(3000, 1.0);
  EXPECT_EQ(cumulative_reward(all), 3000.0);
}

TEST(MovingAverage, PartialWindowAtStart) {
  EXPECT_EQ(moving_average(std::vector<double>{0, 20}), (std::vector<double>{0, 10}));
  const std::vector<double> ramp{1, 2, 3, 4, 5};
  EXPECT_EQ(moving_average(ramp, 2), (std::vector<double>{1, 1.5, 2.5, 3.5, 4.5}));
  const std::vector<double> c(50, 7.0);
  EXPECT_EQ(moving_average(c), c);
  EXPECT_THROW(moving_average(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(moving_average(ramp, 0), std::invalid_argument);
}

TEST(MovingAverage, BoundedByExtremes) {
  std::mt19937 gen(2);
  std::uniform_int_distribution<int> d(1, 100);
  std::vector<double> v(500);
  for (double& x : v) x = d(gen);
  const auto ma = moving_average(v);
  ASSERT_EQ(ma.size(), v.size());
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  for (double x : ma) {
    EXPECT_GE(x, *lo);
    EXPECT_LE(x, *hi);
  }
}

TEST(FinalWindow, Examples) {
  std::vector<std::size_t> lengths(100, 100);
  lengths.insert(lengths.end(), 20, 19);
  EXPECT_DOUBLE_EQ(final_window_length(trial_of(lengths, 100)), 19.0);
  EXPECT_DOUBLE_EQ(final_window_length(trial_of(std::vector<std::size_t>(3000, 100), 100)), 100.0);
  EXPECT_DOUBLE_EQ(final_window_length(trial_of({10, 30}, 100)), 20.0);
  EXPECT_DOUBLE_EQ(mean_episode_length(trial_of({10, 30, 50}, 100)), 30.0);
}

TEST(Histogram, UnitBucketsCountEveryEpisode) {
  const std::vector<TrialResult> trials{trial_of(std::vector<std::size_t>(3000, 19), 100)};
  const auto counts = length_histogram(trials, unit_buckets(100));
  ASSERT_EQ(counts[0].size(), 100u);
  EXPECT_EQ(counts[0][18], 3000u);
}

TEST(Histogram, ExtremesMode) {
  const BucketSpec spec = extremes_buckets(100);
  ASSERT_EQ(spec.size(), 23u);
  EXPECT_EQ(spec[21].label, "22-99");
  EXPECT_EQ(spec.back().label, "100");
  const std::vector<TrialResult> trials{trial_of({1, 21, 22, 50, 99, 100, 100}, 100)};
  const auto counts = length_histogram(trials, spec);
  EXPECT_EQ(counts[0][0], 1u);
  EXPECT_EQ(counts[0][20], 1u);
  EXPECT_EQ(counts[0][21], 3u);
  EXPECT_EQ(counts[0][22], 2u);
}

TEST(Histogram, PartitionSumsToEpisodes) {
  std::mt19937 gen(3);
  std::uniform_int_distribution<std::size_t> d(1, 200);
  std::vector<TrialResult> trials;
  for (int t = 0; t < 5; ++t) {
    std::vector<std::size_t> l(300);
    for (auto& x : l) x = d(gen);
    trials.push_back(trial_of(l, 200));
  }
  for (const BucketSpec& spec : {unit_buckets(200), extremes_buckets(200)}) {
    for (const auto& row : length_histogram(trials, spec)) {
      std::size_t sum = 0;
      for (auto c : row) sum += c;
      EXPECT_EQ(sum, 300u);
    }
  }
}

TEST(Histogram, RejectsNonPartition) {
  const std::vector<TrialResult> trials{trial_of({5, 150}, 200)};
  EXPECT_THROW(length_histogram(trials, unit_buckets(100)), std::invalid_argument);
  BucketSpec overlap{{1, 10, "a"}, {5, 200, "b"}};
  EXPECT_THROW(length_histogram(trials, overlap), std::invalid_argument);
}

TEST(Threshold, FirstCrossing) {
  EXPECT_EQ(first_threshold_crossing(trial_of({50, 19, 19}, 100), 20).first_episode, 1u);
  EXPECT_FALSE(first_threshold_crossing(trial_of(std::vector<std::size_t>(10, 100), 100), 60).first_episode);
}

TEST(Threshold, MonotoneInTheta) {
  std::mt19937 gen(4);
  std::uniform_int_distribution<std::size_t> d(15, 100);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::size_t> l(200);
    for (auto& x : l) x = d(gen);
    const TrialResult t = trial_of(l, 100);
    const auto a = first_threshold_crossing(t, 20).first_episode;
    const auto b = first_threshold_crossing(t, 40).first_episode;
    const auto c = first_threshold_crossing(t, 60).first_episode;
    if (a && b) EXPECT_GE(*a, *b);
    if (b && c) EXPECT_GE(*b, *c);
    if (a) {
      EXPECT_LE(t.episode_lengths[*a], 20u);
      for (std::size_t i = 0; i < *a; ++i) EXPECT_GT(t.episode_lengths[i], 20u);
    }
  }
}

TEST(MeanCurve, MeanAndSem) {
  const std::vector<std::vector<double>> series{{1, 2}, {3, 2}, {5, 2}};
  const auto curve = mean_curve(series);
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_DOUBLE_EQ(curve[0].mean, 3.0);
  EXPECT_NEAR(curve[0].sem, 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(curve[1].sem, 0.0);
}

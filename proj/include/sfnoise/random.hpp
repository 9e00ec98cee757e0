#pragma once

#include <cstdint>
#include <random>

namespace sfnoise {

/// Seeded pseudo-random stream owned by a single trial.
///
/// Every stochastic decision in a trial (observation noise, exploration)
/// draws from one stream, so a seed fully determines the trial.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform real in [0, 1).
  double uniform() { return unit_(engine_); }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sfnoise

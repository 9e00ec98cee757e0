#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfnoise/agents.hpp"
#include "sfnoise/envs.hpp"

namespace sfnoise {

/// One cell of an experiment grid: an (env, agent, lambda, sigma) combination
/// run for `trials` independent seeds of `episodes` episodes each.
struct ExperimentConfig {
  std::string env_name;
  AgentKind agent = AgentKind::kQ;
  double lambda = 0.0;
  double sigma = 0.0;
  std::size_t episodes = 3000;
  std::size_t trials = 100;
  std::uint64_t base_seed = 0;
  std::optional<std::size_t> step_cap;

  /// Throws std::invalid_argument on an unknown env, empty run, negative
  /// sigma or out-of-range lambda.
  void validate() const;

  std::uint64_t trial_seed(std::size_t trial_index) const { return base_seed + trial_index; }
  AgentConfig agent_config() const;

  /// "{env}_{agent}_{lambda}_{sigma}", e.g. "chain1d_q_lambda_0.8_0.25".
  std::string cell_name() const;
  std::string file_name() const { return cell_name() + ".csv"; }
};

struct EpisodeRecord {
  std::size_t steps = 0;
  double reward = 0.0;
  bool reached_goal = false;
};

struct TrialResult {
  std::vector<double> episode_rewards;
  std::vector<std::size_t> episode_lengths;
  std::uint64_t seed = 0;

  bool operator==(const TrialResult&) const = default;
};

/// Runs one episode from the start state until the goal or the step cap.
///
/// Random draws per step: the observation of the state just entered
/// (num_states normals), then the policy draw(s) for the next action. The
/// observation used as o_{t+1} in an update is the one acted on next.
EpisodeRecord run_episode(const GridEnv& env, Agent& agent, const PolicySchedule& schedule,
                          NoiseModel noise, RandomStream& rng,
                          std::optional<std::size_t> step_cap = std::nullopt);

struct TrialRun {
  TrialResult result;
  Agent agent;
  PolicySchedule schedule;
};

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

/// Same as run_trial, also returning the trained agent and final schedule.
TrialRun run_trial_detailed(const ExperimentConfig& cfg, std::size_t trial_index);

struct CellResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  double seconds = 0.0;  // summed trial compute time
  bool resumed = false;  // loaded from an existing CSV instead of recomputed
};

struct SweepOptions {
  std::size_t parallelism = 1;
  /// When set, each finished cell is written to `out_dir / cell.file_name()`
  /// and cells whose file already holds a complete result are reused.
  std::optional<std::filesystem::path> out_dir;
  /// Invoked once per cell, serialized, as cells complete.
  std::function<void(const CellResult&)> on_cell_done;
};

/// Runs every trial of every config. Results are returned in config order
/// and do not depend on `parallelism` or scheduling.
std::vector<CellResult> run_sweep(std::span<const ExperimentConfig> configs,
                                  const SweepOptions& options = {});

/// Raw per-trial series as CSV: header `trial,episode,steps,reward`, one row
/// per episode, trials then episodes in ascending (0-based) order.
std::string format_cell_csv(std::span<const TrialResult> trials);
void write_cell_csv(const std::filesystem::path& path, std::span<const TrialResult> trials);

/// Parses a cell CSV. Throws std::runtime_error on I/O failure or malformed
/// content. Seeds are not stored in the file and are left at zero.
std::vector<TrialResult> read_cell_csv(const std::filesystem::path& path);
std::vector<TrialResult> parse_cell_csv(std::string_view text);

/// Learns successor features under a fixed deterministic policy on noiseless
/// one-hot features, bootstrapping with the policy's own next action.
///
/// Returns a num_states x num_states matrix whose row s is psi(phi(s), policy[s]).
Matrix evaluate_sf_fixed_policy(const GridEnv& env, std::span<const ActionIndex> policy,
                                std::size_t episodes, const AgentConfig& cfg = {});

}  // namespace sfnoise

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfnoise/harness.hpp"

namespace sfnoise {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed sweep description: the raw key/value snapshot and the cells it
/// expands to.
struct SweepConfig {
  std::map<std::string, std::string> entries;
  std::vector<ExperimentConfig> cells;
};

/// Parses the flat config format:
///
///   # comment
///   env = chain1d, grid2d
///   agent = q, sf, q_lambda, pf
///   lambda = 0.7, 0.8, 0.9
///   sigma = 0.05, 0.25
///   episodes = 3000
///   trials = 100
///   base_seed = 0
///   step_cap = 100
///
/// env, agent and sigma are required. env, agent, lambda and sigma accept
/// comma-separated lists and expand to their cartesian product; agents
/// without a trace (q, sf) ignore the lambda list and run once with
/// lambda = 0. Throws ConfigError on unknown or repeated keys, bad numbers
/// and invalid names.
SweepConfig parse_sweep_config(std::string_view text);

/// Reads and parses a config file; ConfigError "config not found" if absent.
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// The full paper grid: both environments, Q, SF, Q(lambda) and PF at
/// lambda 0.7/0.8/0.9, at sigma 0.05/0.25/0.5 (48 cells).
SweepConfig paper_preset(std::uint64_t base_seed = 0);

/// One table row identity: an agent and its lambda.
struct RosterEntry {
  AgentKind agent;
  double lambda;
};

/// Agents in the order the result tables list them.
const std::vector<RosterEntry>& paper_roster();
const std::vector<double>& paper_sigmas();

/// Display label such as "Q", "SF", "Q(0.8)", "PF(0.7)".
std::string roster_label(AgentKind agent, double lambda);

}  // namespace sfnoise

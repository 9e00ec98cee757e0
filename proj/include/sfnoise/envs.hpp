#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sfnoise/random.hpp"
#include "sfnoise/types.hpp"

namespace sfnoise {

struct StepResult {
  StateIndex next_state;
  double reward;
  bool done;

  bool operator==(const StepResult&) const = default;
};

/// Deterministic gridworld MDP over a fixed set of indexed states.
///
/// Transitions are stored as a dense (state, action) -> next-state table.
/// Blocked states are part of the observation space but can never be
/// occupied. Construction validates start/goal placement, closure of the
/// navigable set under every action, and reachability of the goal.
class GridEnv {
 public:
  GridEnv(std::string name, std::size_t num_states, std::size_t num_actions,
          std::vector<StateIndex> transitions, std::vector<bool> blocked,
          StateIndex start_state, StateIndex goal_state, std::size_t step_cap,
          double goal_reward = 1.0, double step_reward = 0.0);

  const std::string& name() const { return name_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  StateIndex start_state() const { return start_state_; }
  StateIndex goal_state() const { return goal_state_; }
  std::size_t step_cap() const { return step_cap_; }
  double goal_reward() const { return goal_reward_; }
  double step_reward() const { return step_reward_; }

  bool is_blocked(StateIndex s) const { return blocked_.at(s); }
  bool is_navigable(StateIndex s) const { return s < num_states_ && !blocked_[s]; }
  std::size_t num_navigable() const;
  std::vector<StateIndex> navigable_states() const;

  /// Throws std::out_of_range if `state` is blocked or out of range, or if
  /// `action` is not a valid action index.
  StepResult step(StateIndex state, ActionIndex action) const;

  /// Deterministic neighbour, without reward or termination.
  StateIndex successor(StateIndex state, ActionIndex action) const;

  /// Breadth-first shortest path length (in moves) between two navigable
  /// states, or -1 if unreachable.
  long shortest_path(StateIndex from, StateIndex to) const;

 private:
  std::string name_;
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<StateIndex> transitions_;
  std::vector<bool> blocked_;
  StateIndex start_state_;
  StateIndex goal_state_;
  std::size_t step_cap_;
  double goal_reward_;
  double step_reward_;
};

// Action 0 is the greedy choice under all-equal values (lowest-index ties).
namespace chain_actions {
inline constexpr ActionIndex kRight = 0;
inline constexpr ActionIndex kLeft = 1;
}  // namespace chain_actions

namespace grid_actions {
inline constexpr ActionIndex kUp = 0;
inline constexpr ActionIndex kDown = 1;
inline constexpr ActionIndex kLeft = 2;
inline constexpr ActionIndex kRight = 3;
}  // namespace grid_actions

/// 1D chain of `num_states` cells; start at the left end, goal at the right.
/// Moving past either end leaves the state unchanged.
GridEnv make_chain(std::size_t num_states, std::size_t step_cap);

/// 20-state chain, step cap 100.
GridEnv build_chain();

/// 7x7 lattice (row-major) with a blocked border leaving a 5x5 interior.
/// Start is the interior bottom-right cell (40), goal the interior top-left (8).
GridEnv build_grid();

/// Looks up an environment by its config name ("chain1d" or "grid2d").
/// Throws std::invalid_argument for unknown names.
GridEnv make_env(std::string_view name);

inline constexpr std::string_view kChainName = "chain1d";
inline constexpr std::string_view kGridName = "grid2d";

/// One-hot feature vector phi(s).
Vector one_hot(std::size_t num_states, StateIndex s);

struct NoiseModel {
  double sigma = 0.0;
};

struct Observation {
  Vector values;
  StateIndex true_state;
};

/// o = phi(s) + eps, eps ~ N(0, sigma^2 I).
///
/// Always consumes exactly num_states normal draws from `rng`, in index
/// order, regardless of sigma.
Observation observe(const GridEnv& env, StateIndex state, NoiseModel noise, RandomStream& rng);

/// In-place variant of observe() used on the hot path; same draw contract.
void observe_into(const GridEnv& env, StateIndex state, NoiseModel noise, RandomStream& rng,
                  Vector& out);

}  // namespace sfnoise

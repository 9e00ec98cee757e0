#include "sfnoise/envs.hpp"

#include <deque>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace sfnoise {

GridEnv::GridEnv(std::string name, std::size_t num_states, std::size_t num_actions,
                 std::vector<StateIndex> transitions, std::vector<bool> blocked,
                 StateIndex start_state, StateIndex goal_state, std::size_t step_cap,
                 double goal_reward, double step_reward)
    : name_(std::move(name)),
      num_states_(num_states),
      num_actions_(num_actions),
      transitions_(std::move(transitions)),
      blocked_(std::move(blocked)),
      start_state_(start_state),
      goal_state_(goal_state),
      step_cap_(step_cap),
      goal_reward_(goal_reward),
      step_reward_(step_reward) {
  if (num_states_ == 0 || num_actions_ == 0 || step_cap_ == 0) {
    throw std::invalid_argument("GridEnv: sizes and step cap must be positive");
  }
  if (transitions_.size() != num_states_ * num_actions_) {
    throw std::invalid_argument("GridEnv: transition table has wrong size");
  }
  if (blocked_.size() != num_states_) {
    throw std::invalid_argument("GridEnv: blocked mask has wrong size");
  }
  if (!is_navigable(start_state_) || !is_navigable(goal_state_)) {
    throw std::invalid_argument("GridEnv: start and goal must be navigable");
  }
  if (start_state_ == goal_state_) {
    throw std::invalid_argument("GridEnv: start and goal must differ");
  }
  for (StateIndex s = 0; s < num_states_; ++s) {
    if (blocked_[s]) continue;
    for (ActionIndex a = 0; a < num_actions_; ++a) {
      if (!is_navigable(transitions_[s * num_actions_ + a])) {
        throw std::invalid_argument(
            fmt::format("GridEnv: action {} from state {} leaves the navigable set", a, s));
      }
    }
  }
  if (shortest_path(start_state_, goal_state_) < 0) {
    throw std::invalid_argument("GridEnv: goal is unreachable from start");
  }
}

std::size_t GridEnv::num_navigable() const {
  std::size_t n = 0;
  for (bool b : blocked_) n += b ? 0 : 1;
  return n;
}

std::vector<StateIndex> GridEnv::navigable_states() const {
  std::vector<StateIndex> out;
  for (StateIndex s = 0; s < num_states_; ++s) {
    if (!blocked_[s]) out.push_back(s);
  }
  return out;
}

StateIndex GridEnv::successor(StateIndex state, ActionIndex action) const {
  if (!is_navigable(state)) {
    throw std::out_of_range(fmt::format("step from non-navigable state {}", state));
  }
  if (action >= num_actions_) {
    throw std::out_of_range(fmt::format("invalid action {}", action));
  }
  return transitions_[state * num_actions_ + action];
}

StepResult GridEnv::step(StateIndex state, ActionIndex action) const {
  const StateIndex next = successor(state, action);
  const bool done = next == goal_state_;
  return {next, done ? goal_reward_ : step_reward_, done};
}

long GridEnv::shortest_path(StateIndex from, StateIndex to) const {
  if (!is_navigable(from) || !is_navigable(to)) return -1;
  std::vector<long> dist(num_states_, -1);
  std::deque<StateIndex> frontier{from};
  dist[from] = 0;
  while (!frontier.empty()) {
    const StateIndex s = frontier.front();
    frontier.pop_front();
    if (s == to) return dist[s];
    for (ActionIndex a = 0; a < num_actions_; ++a) {
      const StateIndex n = transitions_[s * num_actions_ + a];
      if (dist[n] < 0) {
        dist[n] = dist[s] + 1;
        frontier.push_back(n);
      }
    }
  }
  return -1;
}

GridEnv make_chain(std::size_t num_states, std::size_t step_cap) {
  if (num_states < 2) throw std::invalid_argument("chain needs at least two states");
  std::vector<StateIndex> transitions(num_states * 2);
  for (StateIndex s = 0; s < num_states; ++s) {
    transitions[s * 2 + chain_actions::kLeft] = s == 0 ? s : s - 1;
    transitions[s * 2 + chain_actions::kRight] = s + 1 == num_states ? s : s + 1;
  }
  return GridEnv(std::string(kChainName), num_states, 2, std::move(transitions),
                 std::vector<bool>(num_states, false), 0, num_states - 1, step_cap);
}

GridEnv build_chain() { return make_chain(20, 100); }

GridEnv build_grid() {
  constexpr std::size_t kSide = 7;
  constexpr std::size_t kStates = kSide * kSide;
  std::vector<bool> blocked(kStates, false);
  for (std::size_t r = 0; r < kSide; ++r) {
    for (std::size_t c = 0; c < kSide; ++c) {
      blocked[r * kSide + c] = r == 0 || c == 0 || r + 1 == kSide || c + 1 == kSide;
    }
  }
  std::vector<StateIndex> transitions(kStates * 4);
  for (std::size_t r = 0; r < kSide; ++r) {
    for (std::size_t c = 0; c < kSide; ++c) {
      const StateIndex s = r * kSide + c;
      auto target = [&](long dr, long dc) -> StateIndex {
        const long nr = static_cast<long>(r) + dr;
        const long nc = static_cast<long>(c) + dc;
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(kSide) || nc >= static_cast<long>(kSide)) {
          return s;
        }
        const StateIndex n = static_cast<StateIndex>(nr) * kSide + static_cast<StateIndex>(nc);
        return blocked[n] ? s : n;
      };
      transitions[s * 4 + grid_actions::kUp] = target(-1, 0);
      transitions[s * 4 + grid_actions::kDown] = target(1, 0);
      transitions[s * 4 + grid_actions::kLeft] = target(0, -1);
      transitions[s * 4 + grid_actions::kRight] = target(0, 1);
    }
  }
  return GridEnv(std::string(kGridName), kStates, 4, std::move(transitions), std::move(blocked),
                 5 * kSide + 5, 1 * kSide + 1, 200);
}

GridEnv make_env(std::string_view name) {
  if (name == kChainName) return build_chain();
  if (name == kGridName) return build_grid();
  throw std::invalid_argument(fmt::format("unknown environment '{}'", name));
}

Vector one_hot(std::size_t num_states, StateIndex s) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(num_states));
  v[static_cast<Eigen::Index>(s)] = 1.0;
  return v;
}

void observe_into(const GridEnv& env, StateIndex state, NoiseModel noise, RandomStream& rng,
                  Vector& out) {
  const auto n = static_cast<Eigen::Index>(env.num_states());
  out.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double base = static_cast<StateIndex>(i) == state ? 1.0 : 0.0;
    out[i] = base + noise.sigma * rng.normal();
  }
}

Observation observe(const GridEnv& env, StateIndex state, NoiseModel noise, RandomStream& rng) {
  Observation o{Vector(), state};
  observe_into(env, state, noise, rng, o.values);
  return o;
}

}  // namespace sfnoise

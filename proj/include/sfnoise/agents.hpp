#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "sfnoise/random.hpp"
#include "sfnoise/types.hpp"

namespace sfnoise {

enum class AgentKind { kQ, kQLambda, kSF, kPF };

std::string_view agent_name(AgentKind kind);
/// Accepts "q", "q_lambda", "sf", "pf". Throws std::invalid_argument otherwise.
AgentKind parse_agent(std::string_view name);
/// Q(lambda) and PF carry an eligibility trace; Q and SF do not.
bool uses_trace(AgentKind kind);

struct AgentConfig {
  double gamma = 0.95;
  double alpha = 0.1;    // action-value learning rate
  double alpha_w = 0.1;  // successor-feature matrix learning rate
  double alpha_r = 0.1;  // reward-vector learning rate
  double lambda = 0.0;

  /// Throws std::invalid_argument unless 0 <= gamma < 1, all rates > 0 and
  /// 0 <= lambda <= 1.
  void validate() const;
};

/// Epsilon-greedy exploration schedule, decayed once per episode.
struct PolicySchedule {
  double epsilon = 1.0;
  double decay_factor = 0.99;
  double floor = 0.01;
};

/// epsilon' = max(decay_factor * epsilon, floor).
PolicySchedule decay_epsilon(PolicySchedule schedule);

/// Linear action values q(o, a) = w.row(a) . o.
struct QWeights {
  QWeights(std::size_t num_states, std::size_t num_actions)
      : w(Matrix::Zero(static_cast<Eigen::Index>(num_actions),
                       static_cast<Eigen::Index>(num_states))) {}

  Matrix w;  // num_actions x num_states
};

/// Action-conditioned successor features psi(o, a) = w_sf[a] * o and a
/// reward vector w_r, giving q(o, a) = psi(o, a) . w_r.
struct SFWeights {
  SFWeights(std::size_t num_states, std::size_t num_actions);

  std::vector<Matrix> w_sf;  // num_actions matrices of num_states x num_states
  Vector w_r;
};

/// Per-action accumulating trace used by Q(lambda).
struct ActionTrace {
  ActionTrace(std::size_t num_states, std::size_t num_actions)
      : e(Matrix::Zero(static_cast<Eigen::Index>(num_actions),
                       static_cast<Eigen::Index>(num_states))) {}
  void reset() { e.setZero(); }

  Matrix e;
};

/// State-feature trace used by PF: e_t = gamma * lambda * e_{t-1} + o_t.
struct StateTrace {
  explicit StateTrace(std::size_t num_states)
      : e(Vector::Zero(static_cast<Eigen::Index>(num_states))) {}
  void reset() { e.setZero(); }

  Vector e;
};

/// One observed transition, as seen by the agent (noisy observations only).
struct Transition {
  const Vector& obs;
  ActionIndex action;
  double reward;
  const Vector& next_obs;
  bool done;
};

Vector action_values(const QWeights& weights, const Vector& obs);
Vector action_values(const SFWeights& weights, const Vector& obs);
Vector successor_features(const SFWeights& weights, const Vector& obs, ActionIndex action);

/// argmax with ties broken towards the lowest index.
ActionIndex greedy_action(const Vector& values);

/// Draws u ~ U[0,1); explores uniformly (one extra draw) when u < epsilon,
/// otherwise acts greedily.
ActionIndex epsilon_greedy(const Vector& values, double epsilon, RandomStream& rng);

void q_update(QWeights& weights, const Transition& t, const AgentConfig& cfg);

/// Naive accumulating-trace Q(lambda): no trace cut after exploratory actions.
void q_lambda_update(QWeights& weights, ActionTrace& trace, const Transition& t,
                     const AgentConfig& cfg);

/// `next_action` selects psi(o_next, .) for the bootstrap; ignored when done.
void sf_update(SFWeights& weights, const Transition& t, ActionIndex next_action,
               const AgentConfig& cfg);

void pf_update(SFWeights& weights, StateTrace& trace, const Transition& t,
               ActionIndex next_action, const AgentConfig& cfg);

/// A learner of one of the four kinds, bundling its weights and trace.
class Agent {
 public:
  Agent(AgentKind kind, std::size_t num_states, std::size_t num_actions, AgentConfig cfg);

  AgentKind kind() const { return kind_; }
  const AgentConfig& config() const { return cfg_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  Vector action_values(const Vector& obs) const;
  ActionIndex select_action(const Vector& obs, const PolicySchedule& schedule,
                            RandomStream& rng) const;

  /// Clears eligibility traces; called at the start of every episode.
  void begin_episode();

  /// Applies the kind's learning rule. SF and PF bootstrap from the greedy
  /// action at the next observation.
  void update(const Transition& t);

  /// update(t) followed by action_values(t.next_obs), bitwise identical to
  /// the two calls but cheaper for SF and PF. Returns an empty vector when
  /// t.done.
  Vector update_and_values(const Transition& t);

  /// Null unless the agent is of the matching family.
  const QWeights* q_weights() const;
  const SFWeights* sf_weights() const;
  const ActionTrace* action_trace() const;
  const StateTrace* state_trace() const;

  /// True if every learnable parameter is finite.
  bool all_finite() const;

 private:
  struct QState {
    QWeights weights;
  };
  struct QLambdaState {
    QWeights weights;
    ActionTrace trace;
  };
  struct SFState {
    SFWeights weights;
    std::vector<Vector> psi_next;
  };
  struct PFState {
    SFWeights weights;
    StateTrace trace;
    std::vector<Vector> psi_next;
  };

  void check_dims(const Vector& obs) const;

  AgentKind kind_;
  std::size_t num_states_;
  std::size_t num_actions_;
  AgentConfig cfg_;
  std::variant<QState, QLambdaState, SFState, PFState> state_;
};

}  // namespace sfnoise

#include "sfnoise/agents.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace sfnoise {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double max_action_value(const QWeights& weights, const Vector& obs) {
  return (weights.w * obs).maxCoeff();
}

double q_td_error(const QWeights& weights, const Transition& t, const AgentConfig& cfg) {
  const double bootstrap = t.done ? 0.0 : cfg.gamma * max_action_value(weights, t.next_obs);
  return t.reward + bootstrap - weights.w.row(idx(t.action)).dot(t.obs);
}

// Shared body of the SF and PF rules. `credit` is o_t for SF and the
// eligibility trace for PF; `psi_cur` is W_sf[a_t] * o_t and `psi_boot` the
// bootstrapped successor features of o_{t+1}.
void sf_td_step(SFWeights& weights, const Vector& credit, const Transition& t,
                const Vector& psi_cur, const Vector& psi_boot, const AgentConfig& cfg) {
  Vector delta_sf = t.obs - psi_cur;
  delta_sf.noalias() += cfg.gamma * psi_boot;
  const double delta_r = t.reward - t.next_obs.dot(weights.w_r);
  weights.w_sf[t.action].noalias() += (cfg.alpha_w * delta_sf) * credit.transpose();
  weights.w_r.noalias() += (cfg.alpha_r * delta_r) * t.next_obs;
}

// A terminal successor is occupied once and never left: its features are
// the terminal observation itself rather than a bootstrapped estimate.
void sf_td_step(SFWeights& weights, const Vector& credit, const Transition& t,
                ActionIndex next_action, const AgentConfig& cfg) {
  const Vector psi_cur = weights.w_sf[t.action] * t.obs;
  if (t.done) {
    sf_td_step(weights, credit, t, psi_cur, t.next_obs, cfg);
  } else {
    const Vector psi_boot = weights.w_sf[next_action] * t.next_obs;
    sf_td_step(weights, credit, t, psi_cur, psi_boot, cfg);
  }
}

// update() followed by action_values(o_{t+1}), computing each W_sf[b] * o_{t+1}
// once: all of them serve the greedy bootstrap, and only the updated action's
// product changes before the values are read again.
Vector sf_update_and_values(SFWeights& weights, StateTrace* trace, const Transition& t,
                            std::vector<Vector>& psi_next, const AgentConfig& cfg) {
  const std::size_t num_actions = weights.w_sf.size();
  psi_next.resize(num_actions);
  Vector q(idx(num_actions));
  for (std::size_t b = 0; b < num_actions; ++b) {
    psi_next[b] = weights.w_sf[b] * t.next_obs;
    q[idx(b)] = psi_next[b].dot(weights.w_r);
  }
  const Vector psi_cur = weights.w_sf[t.action] * t.obs;
  if (trace != nullptr) trace->e += t.obs;
  const Vector& credit = trace != nullptr ? trace->e : t.obs;
  sf_td_step(weights, credit, t, psi_cur, psi_next[greedy_action(q)], cfg);
  if (trace != nullptr) trace->e *= cfg.gamma * cfg.lambda;
  psi_next[t.action] = weights.w_sf[t.action] * t.next_obs;
  for (std::size_t b = 0; b < num_actions; ++b) q[idx(b)] = psi_next[b].dot(weights.w_r);
  return q;
}

}  // namespace

std::string_view agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::kQ:
      return "q";
    case AgentKind::kQLambda:
      return "q_lambda";
    case AgentKind::kSF:
      return "sf";
    case AgentKind::kPF:
      return "pf";
  }
  return "?";
}

AgentKind parse_agent(std::string_view name) {
  if (name == "q") return AgentKind::kQ;
  if (name == "q_lambda") return AgentKind::kQLambda;
  if (name == "sf") return AgentKind::kSF;
  if (name == "pf") return AgentKind::kPF;
  throw std::invalid_argument(fmt::format("unknown agent '{}'", name));
}

bool uses_trace(AgentKind kind) { return kind == AgentKind::kQLambda || kind == AgentKind::kPF; }

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha_w > 0.0 && alpha_r > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

PolicySchedule decay_epsilon(PolicySchedule schedule) {
  schedule.epsilon = std::max(schedule.decay_factor * schedule.epsilon, schedule.floor);
  return schedule;
}

SFWeights::SFWeights(std::size_t num_states, std::size_t num_actions)
    : w_sf(num_actions, Matrix::Zero(idx(num_states), idx(num_states))),
      w_r(Vector::Zero(idx(num_states))) {}

Vector action_values(const QWeights& weights, const Vector& obs) { return weights.w * obs; }

Vector successor_features(const SFWeights& weights, const Vector& obs, ActionIndex action) {
  return weights.w_sf.at(action) * obs;
}

Vector action_values(const SFWeights& weights, const Vector& obs) {
  Vector q(idx(weights.w_sf.size()));
  for (std::size_t a = 0; a < weights.w_sf.size(); ++a) {
    q[idx(a)] = (weights.w_sf[a] * obs).dot(weights.w_r);
  }
  return q;
}

ActionIndex greedy_action(const Vector& values) {
  ActionIndex best = 0;
  for (Eigen::Index a = 1; a < values.size(); ++a) {
    if (values[a] > values[idx(best)]) best = static_cast<ActionIndex>(a);
  }
  return best;
}

ActionIndex epsilon_greedy(const Vector& values, double epsilon, RandomStream& rng) {
  if (rng.uniform() < epsilon) return rng.uniform_index(static_cast<std::size_t>(values.size()));
  return greedy_action(values);
}

void q_update(QWeights& weights, const Transition& t, const AgentConfig& cfg) {
  const double delta = q_td_error(weights, t, cfg);
  weights.w.row(idx(t.action)) += (cfg.alpha * delta) * t.obs.transpose();
}

void q_lambda_update(QWeights& weights, ActionTrace& trace, const Transition& t,
                     const AgentConfig& cfg) {
  trace.e.row(idx(t.action)) += t.obs.transpose();
  const double delta = q_td_error(weights, t, cfg);
  weights.w += (cfg.alpha * delta) * trace.e;
  trace.e *= cfg.gamma * cfg.lambda;
}

void sf_update(SFWeights& weights, const Transition& t, ActionIndex next_action,
               const AgentConfig& cfg) {
  sf_td_step(weights, t.obs, t, next_action, cfg);
}

void pf_update(SFWeights& weights, StateTrace& trace, const Transition& t,
               ActionIndex next_action, const AgentConfig& cfg) {
  trace.e += t.obs;
  sf_td_step(weights, trace.e, t, next_action, cfg);
  trace.e *= cfg.gamma * cfg.lambda;
}

Agent::Agent(AgentKind kind, std::size_t num_states, std::size_t num_actions, AgentConfig cfg)
    : kind_(kind),
      num_states_(num_states),
      num_actions_(num_actions),
      cfg_(cfg),
      state_(QState{QWeights(num_states, num_actions)}) {
  cfg_.validate();
  if (num_states == 0 || num_actions == 0) throw std::invalid_argument("agent sizes must be positive");
  switch (kind) {
    case AgentKind::kQ:
      break;
    case AgentKind::kQLambda:
      state_ = QLambdaState{QWeights(num_states, num_actions), ActionTrace(num_states, num_actions)};
      break;
    case AgentKind::kSF:
      state_ = SFState{SFWeights(num_states, num_actions), {}};
      break;
    case AgentKind::kPF:
      state_ = PFState{SFWeights(num_states, num_actions), StateTrace(num_states), {}};
      break;
  }
}

void Agent::check_dims(const Vector& obs) const {
  if (static_cast<std::size_t>(obs.size()) != num_states_) {
    throw std::invalid_argument(
        fmt::format("observation has length {}, agent expects {}", obs.size(), num_states_));
  }
}

Vector Agent::action_values(const Vector& obs) const {
  check_dims(obs);
  return std::visit(
      Overloaded{[&](const QState& s) { return sfnoise::action_values(s.weights, obs); },
                 [&](const QLambdaState& s) { return sfnoise::action_values(s.weights, obs); },
                 [&](const SFState& s) { return sfnoise::action_values(s.weights, obs); },
                 [&](const PFState& s) { return sfnoise::action_values(s.weights, obs); }},
      state_);
}

ActionIndex Agent::select_action(const Vector& obs, const PolicySchedule& schedule,
                                 RandomStream& rng) const {
  return epsilon_greedy(action_values(obs), schedule.epsilon, rng);
}

void Agent::begin_episode() {
  std::visit(Overloaded{[](QState&) {}, [](QLambdaState& s) { s.trace.reset(); },
                        [](SFState&) {}, [](PFState& s) { s.trace.reset(); }},
             state_);
}

void Agent::update(const Transition& t) {
  check_dims(t.obs);
  check_dims(t.next_obs);
  if (t.action >= num_actions_) throw std::out_of_range("action out of range");
  auto next_greedy = [&](const SFWeights& w) -> ActionIndex {
    return t.done ? 0 : greedy_action(sfnoise::action_values(w, t.next_obs));
  };
  std::visit(Overloaded{[&](QState& s) { q_update(s.weights, t, cfg_); },
                        [&](QLambdaState& s) { q_lambda_update(s.weights, s.trace, t, cfg_); },
                        [&](SFState& s) { sf_update(s.weights, t, next_greedy(s.weights), cfg_); },
                        [&](PFState& s) {
                          pf_update(s.weights, s.trace, t, next_greedy(s.weights), cfg_);
                        }},
             state_);
}

Vector Agent::update_and_values(const Transition& t) {
  if (t.done) {
    update(t);
    return {};
  }
  check_dims(t.obs);
  check_dims(t.next_obs);
  if (t.action >= num_actions_) throw std::out_of_range("action out of range");
  return std::visit(
      Overloaded{[&](QState& s) {
                   q_update(s.weights, t, cfg_);
                   return sfnoise::action_values(s.weights, t.next_obs);
                 },
                 [&](QLambdaState& s) {
                   q_lambda_update(s.weights, s.trace, t, cfg_);
                   return sfnoise::action_values(s.weights, t.next_obs);
                 },
                 [&](SFState& s) {
                   return sf_update_and_values(s.weights, nullptr, t, s.psi_next, cfg_);
                 },
                 [&](PFState& s) {
                   return sf_update_and_values(s.weights, &s.trace, t, s.psi_next, cfg_);
                 }},
      state_);
}

const QWeights* Agent::q_weights() const {
  if (auto* s = std::get_if<QState>(&state_)) return &s->weights;
  if (auto* s = std::get_if<QLambdaState>(&state_)) return &s->weights;
  return nullptr;
}

const SFWeights* Agent::sf_weights() const {
  if (auto* s = std::get_if<SFState>(&state_)) return &s->weights;
  if (auto* s = std::get_if<PFState>(&state_)) return &s->weights;
  return nullptr;
}

const ActionTrace* Agent::action_trace() const {
  if (auto* s = std::get_if<QLambdaState>(&state_)) return &s->trace;
  return nullptr;
}

const StateTrace* Agent::state_trace() const {
  if (auto* s = std::get_if<PFState>(&state_)) return &s->trace;
  return nullptr;
}

bool Agent::all_finite() const {
  if (const QWeights* q = q_weights()) return q->w.allFinite();
  const SFWeights* sf = sf_weights();
  return sf->w_r.allFinite() &&
         std::all_of(sf->w_sf.begin(), sf->w_sf.end(), [](const Matrix& m) { return m.allFinite(); });
}

}  // namespace sfnoise

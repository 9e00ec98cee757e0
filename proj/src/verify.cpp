#include "sfnoise/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace sfnoise {

namespace {

const RosterEntry kQ{AgentKind::kQ, 0.0};
const RosterEntry kSF{AgentKind::kSF, 0.0};
RosterEntry q_lambda(double l) { return {AgentKind::kQLambda, l}; }
RosterEntry pf(double l) { return {AgentKind::kPF, l}; }

// Mean of a per-trial metric for one paper cell, or a note on why it is
// unavailable.
struct CellMean {
  std::optional<double> value;
  std::string label;
};

CellMean cell_mean(Dataset& data, std::string_view env, const RosterEntry& entry, double sigma,
                   TableMetric metric) {
  const std::string cell = paper_cell_name(env, entry, sigma);
  CellMean out{std::nullopt, roster_label(entry.agent, entry.lambda)};
  if (!data.has(cell)) {
    out.label += " (missing " + cell + ")";
    return out;
  }
  try {
    out.value = summarize(per_trial_metric(data.get(cell), metric)).mean;
  } catch (const std::exception& e) {
    out.label += fmt::format(" (unreadable: {})", e.what());
  }
  return out;
}

std::string show(const CellMean& m) {
  return m.value ? fmt::format("{}={:.6g}", m.label, *m.value) : m.label;
}

bool within(const CellMean& m, double lo, double hi) {
  return m.value && *m.value >= lo && *m.value <= hi;
}

bool within_rel(const CellMean& m, double target, double rel) {
  return within(m, target * (1.0 - rel), target * (1.0 + rel));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep = "; ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

constexpr auto kChain = kChainName;
constexpr auto kGrid = kGridName;
constexpr auto kReward = TableMetric::kCumulativeReward;
constexpr auto kLength = TableMetric::kFinalLength;

template <class T>
bool same_bits(const T& a, const T& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

}  // namespace

std::string format_criterion(const CriterionResult& r) {
  return fmt::format("{}  {:>2}  {}: {}", r.passed ? "PASS" : "FAIL", r.id, r.title, r.detail);
}

CriterionResult check_chain_low_noise(Dataset& data) {
  const CellMean ql = cell_mean(data, kChain, q_lambda(0.8), 0.05, kReward);
  const CellMean sf = cell_mean(data, kChain, kSF, 0.05, kReward);
  return {1, "chain sigma 0.05 cumulative reward",
          within_rel(ql, 2980.05, 0.05) && within_rel(sf, 2928.07, 0.05),
          fmt::format("{} (need 2980.05 +-5%), {} (need 2928.07 +-5%)", show(ql), show(sf))};
}

CriterionResult check_chain_medium_order(Dataset& data) {
  const CellMean sf = cell_mean(data, kChain, kSF, 0.25, kReward);
  const CellMean pf7 = cell_mean(data, kChain, pf(0.7), 0.25, kReward);
  const CellMean q = cell_mean(data, kChain, kQ, 0.25, kReward);
  bool ok = sf.value && pf7.value && q.value;
  if (ok) {
    ok = *sf.value > *pf7.value && *pf7.value > *q.value && *pf7.value >= 10.0 * *q.value &&
         *sf.value >= 2000.0 && *q.value <= 200.0;
  }
  return {2, "chain sigma 0.25 ordering SF > PF(0.7) >> Q", ok,
          fmt::format("{}, {}, {} (need SF >= 2000, Q <= 200, PF(0.7) >= 10 Q)", show(sf), show(pf7),
                      show(q))};
}

CriterionResult check_chain_high_noise(Dataset& data) {
  const CellMean reward = cell_mean(data, kChain, kSF, 0.5, kReward);
  const CellMean length = cell_mean(data, kChain, kSF, 0.5, kLength);
  return {3, "chain sigma 0.5 SF reward and final length",
          within(reward, 1700.0, 2700.0) && within(length, 40.0, 70.0),
          fmt::format("reward {} (need [1700, 2700]), final length {} (need [40, 70])", show(reward),
                      show(length))};
}

CriterionResult check_chain_q_failure(Dataset& data) {
  bool ok = true;
  std::vector<std::string> parts;
  for (const RosterEntry& e : {kQ, q_lambda(0.7), q_lambda(0.8), q_lambda(0.9)}) {
    const CellMean m = cell_mean(data, kChain, e, 0.25, kLength);
    ok = ok && m.value && *m.value >= 95.0;
    parts.push_back(show(m));
  }
  return {4, "chain sigma 0.25 Q-family final length >= 95", ok, join(parts, ", ")};
}

CriterionResult check_grid_low_noise(Dataset& data) {
  bool ok = true;
  std::vector<std::string> parts;
  for (const RosterEntry& e : {kQ, kSF, q_lambda(0.7), pf(0.7)}) {
    const CellMean reward = cell_mean(data, kGrid, e, 0.05, kReward);
    const CellMean length = cell_mean(data, kGrid, e, 0.05, kLength);
    ok = ok && within(reward, 2950.0, 3000.0) && within_rel(length, 8.3, 0.15);
    parts.push_back(fmt::format("{} / length {:.6g}", show(reward), length.value.value_or(NAN)));
  }
  return {5, "grid sigma 0.05 reward >= 2950 and final length 8.3 +-15%", ok, join(parts, ", ")};
}

CriterionResult check_grid_lambda_effect(Dataset& data) {
  const CellMean low = cell_mean(data, kGrid, q_lambda(0.8), 0.05, kLength);
  const CellMean mid = cell_mean(data, kGrid, q_lambda(0.8), 0.25, kLength);
  const bool ok = low.value && mid.value && *mid.value > 0.0 && *low.value / *mid.value >= 2.0;
  return {6, "grid Q(0.8) final length improves >= 2x from sigma 0.05 to 0.25", ok,
          fmt::format("sigma 0.05 {}, sigma 0.25 {}", show(low), show(mid))};
}

CriterionResult check_grid_high_noise(Dataset& data) {
  bool ok = true;
  std::vector<std::string> parts;
  for (const RosterEntry& e : paper_roster()) {
    const CellMean m = cell_mean(data, kGrid, e, 0.5, kLength);
    ok = ok && within(m, 50.0, 130.0);
    parts.push_back(show(m));
  }
  return {7, "grid sigma 0.5 final lengths in [50, 130]", ok, join(parts, ", ")};
}

CriterionResult check_sr_oracle() {
  const GridEnv env = build_chain();
  const std::vector<ActionIndex> policy(env.num_states(), chain_actions::kRight);
  const AgentConfig cfg;
  const Matrix psi = evaluate_sf_fixed_policy(env, policy, 2000, cfg);

  const auto n = static_cast<Eigen::Index>(env.num_states());
  Matrix transition = Matrix::Zero(n, n);
  for (StateIndex s = 0; s < env.num_states(); ++s) {
    if (s == env.goal_state()) continue;
    transition(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(env.successor(s, policy[s]))) = 1.0;
  }
  const Matrix oracle = (Matrix::Identity(n, n) - cfg.gamma * transition).inverse();
  double err = 0.0;
  for (StateIndex s = 0; s < env.num_states(); ++s) {
    if (s == env.goal_state()) continue;
    const auto r = static_cast<Eigen::Index>(s);
    err = std::max(err, (psi.row(r) - oracle.row(r)).cwiseAbs().maxCoeff());
  }
  return {8, "SR oracle on the noiseless chain", err <= 1e-2,
          fmt::format("max-abs error {:.3g} (need <= 0.01)", err)};
}

CriterionResult check_reductions(std::size_t episodes) {
  std::vector<std::string> failures;
  for (std::string_view env_name : {kChain, kGrid}) {
    const GridEnv env = make_env(env_name);
    const std::pair<AgentKind, AgentKind> pairs[] = {{AgentKind::kSF, AgentKind::kPF},
                                                     {AgentKind::kQ, AgentKind::kQLambda}};
    for (const auto& [base_kind, trace_kind] : pairs) {
      Agent base(base_kind, env.num_states(), env.num_actions(), AgentConfig{});
      Agent traced(trace_kind, env.num_states(), env.num_actions(), AgentConfig{});
      RandomStream rng_base(7);
      RandomStream rng_traced(7);
      PolicySchedule schedule;
      bool lengths_match = true;
      for (std::size_t e = 0; e < episodes; ++e) {
        const EpisodeRecord a = run_episode(env, base, schedule, {0.25}, rng_base);
        const EpisodeRecord b = run_episode(env, traced, schedule, {0.25}, rng_traced);
        lengths_match = lengths_match && a.steps == b.steps && a.reward == b.reward;
        schedule = decay_epsilon(schedule);
      }
      bool weights_match = false;
      if (base.q_weights() != nullptr) {
        weights_match = same_bits(base.q_weights()->w, traced.q_weights()->w);
      } else {
        const SFWeights& x = *base.sf_weights();
        const SFWeights& y = *traced.sf_weights();
        weights_match = same_bits(x.w_r, y.w_r);
        for (std::size_t a = 0; a < x.w_sf.size(); ++a) {
          weights_match = weights_match && same_bits(x.w_sf[a], y.w_sf[a]);
        }
      }
      if (!lengths_match || !weights_match) {
        failures.push_back(fmt::format("{}: {}(0) differs from {}", env_name, agent_name(trace_kind),
                                       agent_name(base_kind)));
      }
    }
  }
  return {9, "PF(0) == SF and Q(0) == Q bitwise", failures.empty(),
          failures.empty() ? fmt::format("{} episodes on both environments", episodes) : join(failures)};
}

CriterionResult check_replay(const RunManifest& manifest, Dataset& data) {
  std::vector<std::string> failures;
  for (const ManifestCell& cell : manifest.cells) {
    const std::string name = cell.config.cell_name();
    if (!data.has(name)) {
      failures.push_back(name + " missing");
      continue;
    }
    try {
      const std::vector<TrialResult>& stored = data.get(name);
      TrialResult fresh = run_trial(cell.config, 0);
      if (stored.empty() || format_cell_csv(std::span(&stored.front(), 1)) !=
                                format_cell_csv(std::span(&fresh, 1))) {
        failures.push_back(name);
      }
    } catch (const std::exception& e) {
      failures.push_back(e.what());
    }
  }
  return {10, "replayed trial 0 matches stored rows", failures.empty(),
          failures.empty() ? fmt::format("{} cells", manifest.cells.size())
                           : "mismatch: " + join(failures, ", ")};
}

CriterionResult check_invariants(const RunManifest& manifest, Dataset& data) {
  std::vector<std::string> failures;

  std::size_t max_episodes = 3000;
  for (const ManifestCell& cell : manifest.cells) max_episodes = std::max(max_episodes, cell.config.episodes);
  PolicySchedule schedule;
  for (std::size_t k = 0; k <= max_episodes; ++k) {
    const double closed = std::max(std::pow(0.99, static_cast<double>(k)), 0.01);
    if (std::abs(schedule.epsilon - closed) > 1e-12 * closed) {
      failures.push_back(fmt::format("epsilon after {} episodes is {} not {}", k, schedule.epsilon, closed));
      break;
    }
    schedule = decay_epsilon(schedule);
  }

  for (const ManifestCell& cell : manifest.cells) {
    const std::string name = cell.config.cell_name();
    if (!data.has(name)) {
      failures.push_back(name + " missing");
      continue;
    }
    const std::vector<TrialResult>* loaded = nullptr;
    try {
      loaded = &data.get(name);
    } catch (const std::exception& e) {
      failures.push_back(e.what());
      continue;
    }
    const std::vector<TrialResult>& trials = *loaded;
    const std::size_t cap = cell.config.step_cap.value_or(make_env(cell.config.env_name).step_cap());
    std::vector<std::string> cell_failures;
    for (std::size_t t = 0; t < trials.size(); ++t) {
      const TrialResult& trial = trials[t];
      for (std::size_t e = 0; e < trial.episode_lengths.size(); ++e) {
        const std::size_t steps = trial.episode_lengths[e];
        const double reward = trial.episode_rewards[e];
        const bool ok = steps >= 1 && steps <= cap && (reward == 1.0 || (reward == 0.0 && steps == cap));
        if (!ok) {
          cell_failures.push_back(
              fmt::format("cap/reward: trial {} episode {} steps {} reward {}", t, e, steps, reward));
          break;
        }
      }
      const std::vector<double> lengths = lengths_as_real(trial);
      if (!lengths.empty()) {
        const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
        for (double v : moving_average(lengths)) {
          if (v < *lo || v > *hi) {
            cell_failures.push_back(fmt::format("moving average out of bounds in trial {}", t));
            break;
          }
        }
      }
    }
    for (const BucketSpec& buckets : {unit_buckets(cap), extremes_buckets(cap)}) {
      try {
        const auto counts = length_histogram(trials, buckets);
        for (std::size_t t = 0; t < counts.size(); ++t) {
          std::size_t sum = 0;
          for (std::size_t c : counts[t]) sum += c;
          if (sum != trials[t].episode_lengths.size()) {
            cell_failures.push_back(fmt::format("histogram sum {} in trial {}", sum, t));
            break;
          }
        }
      } catch (const std::invalid_argument& e) {
        cell_failures.push_back(fmt::format("histogram: {}", e.what()));
      }
    }
    if (!trials.empty()) {
      for (TableMetric metric : {kReward, kLength}) {
        const SummaryStats s = summarize(per_trial_metric(trials, metric));
        if (!(s.q25 <= s.q50 && s.q50 <= s.q75) || (s.sem && *s.sem < 0.0)) {
          cell_failures.push_back("quartile ordering");
        }
      }
    }
    for (const std::string& f : cell_failures) failures.push_back(name + ": " + f);
  }
  return {11, "epsilon schedule, cap, histograms, quartiles, moving average", failures.empty(),
          failures.empty() ? fmt::format("{} cells", manifest.cells.size()) : join(failures)};
}

CriterionResult check_manifest_result(const RunManifest& manifest, const std::filesystem::path& dir) {
  const std::vector<std::string> problems = check_manifest(manifest, dir);
  return {0, "manifest matches output files", problems.empty(),
          problems.empty() ? fmt::format("{} cells", manifest.cells.size()) : join(problems)};
}

std::vector<CriterionResult> verify_output(const std::filesystem::path& dir) {
  RunManifest manifest;
  try {
    manifest = read_manifest(dir / kManifestFile);
  } catch (const std::exception& e) {
    return {{0, "manifest matches output files", false, e.what()}};
  }
  Dataset data(dir);
  std::vector<CriterionResult> out;
  out.push_back(check_manifest_result(manifest, dir));
  out.push_back(check_chain_low_noise(data));
  out.push_back(check_chain_medium_order(data));
  out.push_back(check_chain_high_noise(data));
  out.push_back(check_chain_q_failure(data));
  out.push_back(check_grid_low_noise(data));
  out.push_back(check_grid_lambda_effect(data));
  out.push_back(check_grid_high_noise(data));
  out.push_back(check_sr_oracle());
  out.push_back(check_reductions());
  out.push_back(check_replay(manifest, data));
  out.push_back(check_invariants(manifest, data));
  return out;
}

}  // namespace sfnoise

#include "sfnoise/harness.hpp"

#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

namespace sfnoise {

void ExperimentConfig::validate() const {
  (void)make_env(env_name);
  if (episodes == 0) throw std::invalid_argument("episodes must be at least 1");
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be >= 0");
  if (step_cap && *step_cap == 0) throw std::invalid_argument("step_cap must be positive");
  agent_config().validate();
}

AgentConfig ExperimentConfig::agent_config() const {
  AgentConfig cfg;
  cfg.lambda = lambda;
  return cfg;
}

std::string ExperimentConfig::cell_name() const {
  return fmt::format("{}_{}_{}_{}", env_name, agent_name(agent), lambda, sigma);
}

EpisodeRecord run_episode(const GridEnv& env, Agent& agent, const PolicySchedule& schedule,
                          NoiseModel noise, RandomStream& rng,
                          std::optional<std::size_t> step_cap) {
  const std::size_t cap = step_cap.value_or(env.step_cap());
  agent.begin_episode();
  StateIndex state = env.start_state();
  Vector obs;
  Vector next_obs;
  observe_into(env, state, noise, rng, obs);
  Vector values = agent.action_values(obs);
  for (std::size_t steps = 1; steps <= cap; ++steps) {
    const ActionIndex action = epsilon_greedy(values, schedule.epsilon, rng);
    const StepResult next = env.step(state, action);
    observe_into(env, next.next_state, noise, rng, next_obs);
    if (next.done) {
      agent.update({obs, action, next.reward, next_obs, true});
      return {steps, next.reward, true};
    }
    values = agent.update_and_values({obs, action, next.reward, next_obs, false});
    state = next.next_state;
    obs.swap(next_obs);
  }
  return {cap, 0.0, false};
}

TrialRun run_trial_detailed(const ExperimentConfig& cfg, std::size_t trial_index) {
  cfg.validate();
  const GridEnv env = make_env(cfg.env_name);
  TrialRun run{TrialResult{}, Agent(cfg.agent, env.num_states(), env.num_actions(), cfg.agent_config()),
               PolicySchedule{}};
  run.result.seed = cfg.trial_seed(trial_index);
  run.result.episode_rewards.reserve(cfg.episodes);
  run.result.episode_lengths.reserve(cfg.episodes);
  RandomStream rng(run.result.seed);
  const NoiseModel noise{cfg.sigma};
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    const EpisodeRecord rec = run_episode(env, run.agent, run.schedule, noise, rng, cfg.step_cap);
    run.result.episode_rewards.push_back(rec.reward);
    run.result.episode_lengths.push_back(rec.steps);
    run.schedule = decay_epsilon(run.schedule);
  }
  return run;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  return run_trial_detailed(cfg, trial_index).result;
}

std::string format_cell_csv(std::span<const TrialResult> trials) {
  std::string out = "trial,episode,steps,reward\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const TrialResult& trial = trials[t];
    for (std::size_t e = 0; e < trial.episode_lengths.size(); ++e) {
      fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", t, e, trial.episode_lengths[e],
                     trial.episode_rewards[e]);
    }
  }
  return out;
}

void write_cell_csv(const std::filesystem::path& path, std::span<const TrialResult> trials) {
  const std::string text = format_cell_csv(trials);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error(fmt::format("cannot open '{}' for writing", tmp.string()));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

namespace {

template <class T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error(fmt::format("line {}: bad field '{}'", line, field));
  }
  return value;
}

}  // namespace

std::vector<TrialResult> parse_cell_csv(std::string_view text) {
  constexpr std::string_view kHeader = "trial,episode,steps,reward";
  std::vector<TrialResult> trials;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kHeader) throw std::runtime_error("missing or wrong CSV header");
      continue;
    }
    if (line.empty()) continue;
    std::string_view fields[4];
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = f < 3 ? line.find(',', start) : line.size();
      if (comma == std::string_view::npos) {
        throw std::runtime_error(fmt::format("line {}: expected 4 fields", line_no));
      }
      fields[f] = line.substr(start, comma - start);
      start = comma + 1;
    }
    const auto trial = parse_field<std::size_t>(fields[0], line_no);
    const auto episode = parse_field<std::size_t>(fields[1], line_no);
    const auto steps = parse_field<std::size_t>(fields[2], line_no);
    const auto reward = parse_field<double>(fields[3], line_no);
    if (trial == trials.size()) trials.emplace_back();
    if (trial + 1 != trials.size()) {
      throw std::runtime_error(fmt::format("line {}: trials out of order", line_no));
    }
    TrialResult& tr = trials.back();
    if (episode != tr.episode_lengths.size()) {
      throw std::runtime_error(fmt::format("line {}: episodes out of order", line_no));
    }
    tr.episode_lengths.push_back(steps);
    tr.episode_rewards.push_back(reward);
  }
  if (line_no == 0) throw std::runtime_error("empty CSV");
  return trials;
}

std::vector<TrialResult> read_cell_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return parse_cell_csv(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

// Reuses an existing cell file only if it holds exactly the requested shape.
std::optional<std::vector<TrialResult>> try_resume(const std::filesystem::path& path,
                                                   const ExperimentConfig& cfg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  std::vector<TrialResult> trials;
  try {
    trials = read_cell_csv(path);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
  if (trials.size() != cfg.trials) return std::nullopt;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (trials[t].episode_lengths.size() != cfg.episodes) return std::nullopt;
    trials[t].seed = cfg.trial_seed(t);
  }
  return trials;
}

}  // namespace

std::vector<CellResult> run_sweep(std::span<const ExperimentConfig> configs,
                                  const SweepOptions& options) {
  std::unordered_set<std::string> names;
  for (const ExperimentConfig& cfg : configs) {
    cfg.validate();
    if (!names.insert(cfg.cell_name()).second) {
      throw std::invalid_argument(fmt::format("duplicate cell '{}'", cfg.cell_name()));
    }
  }
  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  std::vector<CellResult> cells(configs.size());
  std::vector<std::vector<double>> trial_seconds(configs.size());
  std::vector<std::atomic<std::size_t>> remaining(configs.size());
  struct Task {
    std::size_t cell;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  std::mutex done_mutex;

  auto finish_cell = [&](std::size_t c) {
    std::lock_guard lock(done_mutex);
    if (options.on_cell_done) options.on_cell_done(cells[c]);
  };

  for (std::size_t c = 0; c < configs.size(); ++c) {
    cells[c].config = configs[c];
    if (options.out_dir) {
      if (auto resumed = try_resume(*options.out_dir / configs[c].file_name(), configs[c])) {
        cells[c].trials = std::move(*resumed);
        cells[c].resumed = true;
        finish_cell(c);
        continue;
      }
    }
    cells[c].trials.resize(configs[c].trials);
    trial_seconds[c].assign(configs[c].trials, 0.0);
    remaining[c].store(configs[c].trials);
    for (std::size_t t = 0; t < configs[c].trials; ++t) tasks.push_back({c, t});
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task task = tasks[i];
      try {
        const auto t0 = std::chrono::steady_clock::now();
        cells[task.cell].trials[task.trial] = run_trial(configs[task.cell], task.trial);
        trial_seconds[task.cell][task.trial] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (remaining[task.cell].fetch_sub(1) == 1) {
          CellResult& cell = cells[task.cell];
          for (double s : trial_seconds[task.cell]) cell.seconds += s;
          if (options.out_dir) {
            write_cell_csv(*options.out_dir / cell.config.file_name(), cell.trials);
          }
          finish_cell(task.cell);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.parallelism, tasks.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return cells;
}

Matrix evaluate_sf_fixed_policy(const GridEnv& env, std::span<const ActionIndex> policy,
                                std::size_t episodes, const AgentConfig& cfg) {
  cfg.validate();
  if (policy.size() != env.num_states()) {
    throw std::invalid_argument("policy must assign an action to every state index");
  }
  const std::size_t n = env.num_states();
  SFWeights weights(n, env.num_actions());
  for (std::size_t e = 0; e < episodes; ++e) {
    StateIndex state = env.start_state();
    Vector obs = one_hot(n, state);
    for (std::size_t step = 0; step < env.step_cap(); ++step) {
      const ActionIndex action = policy[state];
      const StepResult next = env.step(state, action);
      const Vector next_obs = one_hot(n, next.next_state);
      sf_update(weights, {obs, action, next.reward, next_obs, next.done}, policy[next.next_state],
                cfg);
      if (next.done) break;
      state = next.next_state;
      obs = next_obs;
    }
  }
  Matrix psi = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (StateIndex s : env.navigable_states()) {
    if (s == env.goal_state()) continue;
    psi.row(static_cast<Eigen::Index>(s)) = successor_features(weights, one_hot(n, s), policy[s]);
  }
  return psi;
}

}  // namespace sfnoise

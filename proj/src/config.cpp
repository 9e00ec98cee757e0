#include "sfnoise/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace sfnoise {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view key, std::string_view value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    const std::string_view item = trim(value.substr(start, comma - start));
    if (item.empty()) throw ConfigError(fmt::format("empty item in '{}'", key));
    items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("bad value '{}' for '{}'", text, key));
  }
  return value;
}

const std::set<std::string, std::less<>> kKnownKeys = {
    "env", "agent", "lambda", "sigma", "episodes", "trials", "base_seed", "step_cap"};

}  // namespace

SweepConfig parse_sweep_config(std::string_view text) {
  SweepConfig out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!kKnownKeys.contains(key)) throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    if (value.empty()) throw ConfigError(fmt::format("line {}: empty value for '{}'", line_no, key));
    if (!out.entries.emplace(key, std::string(value)).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
  }

  for (const char* required : {"env", "agent", "sigma"}) {
    if (!out.entries.contains(required)) throw ConfigError(fmt::format("missing key '{}'", required));
  }
  auto entry = [&](const char* key, const char* fallback) -> std::string {
    auto it = out.entries.find(key);
    return it == out.entries.end() ? fallback : it->second;
  };

  std::vector<std::string> envs = split_list("env", entry("env", ""));
  for (const std::string& env : envs) {
    if (env != kChainName && env != kGridName) throw ConfigError(fmt::format("unknown env '{}'", env));
  }
  std::vector<AgentKind> agents;
  for (const std::string& name : split_list("agent", entry("agent", ""))) {
    try {
      agents.push_back(parse_agent(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  std::vector<double> lambdas;
  for (const std::string& v : split_list("lambda", entry("lambda", "0"))) {
    lambdas.push_back(parse_number<double>("lambda", v));
  }
  std::vector<double> sigmas;
  for (const std::string& v : split_list("sigma", entry("sigma", ""))) {
    sigmas.push_back(parse_number<double>("sigma", v));
  }

  ExperimentConfig base;
  base.episodes = parse_number<std::size_t>("episodes", entry("episodes", "3000"));
  base.trials = parse_number<std::size_t>("trials", entry("trials", "100"));
  base.base_seed = parse_number<std::uint64_t>("base_seed", entry("base_seed", "0"));
  if (out.entries.contains("step_cap")) {
    base.step_cap = parse_number<std::size_t>("step_cap", entry("step_cap", ""));
  }

  std::set<std::string> seen;
  for (const std::string& env : envs) {
    for (AgentKind agent : agents) {
      const std::vector<double> agent_lambdas = uses_trace(agent) ? lambdas : std::vector<double>{0.0};
      for (double lambda : agent_lambdas) {
        for (double sigma : sigmas) {
          ExperimentConfig cfg = base;
          cfg.env_name = env;
          cfg.agent = agent;
          cfg.lambda = lambda;
          cfg.sigma = sigma;
          try {
            cfg.validate();
          } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: {}", cfg.cell_name(), e.what()));
          }
          if (seen.insert(cfg.cell_name()).second) out.cells.push_back(std::move(cfg));
        }
      }
    }
  }
  return out;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError(fmt::format("config not found: {}", path.string()));
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(fmt::format("cannot read config: {}", path.string()));
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_sweep_config(ss.str());
}

const std::vector<RosterEntry>& paper_roster() {
  static const std::vector<RosterEntry> roster = {
      {AgentKind::kQ, 0.0},       {AgentKind::kSF, 0.0},      {AgentKind::kQLambda, 0.7},
      {AgentKind::kQLambda, 0.8}, {AgentKind::kQLambda, 0.9}, {AgentKind::kPF, 0.7},
      {AgentKind::kPF, 0.8},      {AgentKind::kPF, 0.9},
  };
  return roster;
}

const std::vector<double>& paper_sigmas() {
  static const std::vector<double> sigmas = {0.05, 0.25, 0.5};
  return sigmas;
}

std::string roster_label(AgentKind agent, double lambda) {
  switch (agent) {
    case AgentKind::kQ:
      return "Q";
    case AgentKind::kSF:
      return "SF";
    case AgentKind::kQLambda:
      return fmt::format("Q({})", lambda);
    case AgentKind::kPF:
      return fmt::format("PF({})", lambda);
  }
  return "?";
}

SweepConfig paper_preset(std::uint64_t base_seed) {
  return parse_sweep_config(fmt::format(
      "env = chain1d, grid2d\n"
      "agent = q, sf, q_lambda, pf\n"
      "lambda = 0.7, 0.8, 0.9\n"
      "sigma = 0.05, 0.25, 0.5\n"
      "episodes = 3000\n"
      "trials = 100\n"
      "base_seed = {}\n",
      base_seed));
}

}  // namespace sfnoise

#include "sfnoise/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#ifndef SFNOISE_VERSION
#define SFNOISE_VERSION "0.0.0"
#endif

namespace sfnoise {

using nlohmann::json;

namespace {

std::size_t count_rows(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::size_t lines = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) ++lines;
  }
  return lines == 0 ? 0 : lines - 1;
}

json cell_to_json(const ManifestCell& cell) {
  const ExperimentConfig& c = cell.config;
  json j = {{"env", c.env_name},
            {"agent", std::string(agent_name(c.agent))},
            {"lambda", c.lambda},
            {"sigma", c.sigma},
            {"episodes", c.episodes},
            {"trials", c.trials},
            {"base_seed", c.base_seed},
            {"file", cell.file},
            {"rows", cell.rows},
            {"bytes", cell.bytes},
            {"seconds", cell.seconds}};
  j["step_cap"] = c.step_cap ? json(*c.step_cap) : json(nullptr);
  return j;
}

ManifestCell cell_from_json(const json& j) {
  ManifestCell cell;
  ExperimentConfig& c = cell.config;
  c.env_name = j.at("env").get<std::string>();
  c.agent = parse_agent(j.at("agent").get<std::string>());
  c.lambda = j.at("lambda").get<double>();
  c.sigma = j.at("sigma").get<double>();
  c.episodes = j.at("episodes").get<std::size_t>();
  c.trials = j.at("trials").get<std::size_t>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (!j.at("step_cap").is_null()) c.step_cap = j.at("step_cap").get<std::size_t>();
  cell.file = j.at("file").get<std::string>();
  cell.rows = j.at("rows").get<std::size_t>();
  cell.bytes = j.at("bytes").get<std::uintmax_t>();
  cell.seconds = j.at("seconds").get<double>();
  return cell;
}

}  // namespace

std::string_view tool_version() { return SFNOISE_VERSION; }

RunManifest make_manifest(const SweepConfig& sweep, std::string source,
                          const std::vector<CellResult>& results,
                          const std::filesystem::path& out_dir) {
  RunManifest m;
  m.tool_version = std::string(tool_version());
  m.base_seed = sweep.cells.empty() ? 0 : sweep.cells.front().base_seed;
  m.source = std::move(source);
  m.config = sweep.entries;
  for (const CellResult& r : results) {
    ManifestCell cell;
    cell.config = r.config;
    cell.file = r.config.file_name();
    const std::filesystem::path path = out_dir / cell.file;
    cell.rows = count_rows(path);
    cell.bytes = std::filesystem::file_size(path);
    cell.seconds = r.seconds;
    m.cells.push_back(std::move(cell));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json j;
  j["tool_version"] = manifest.tool_version;
  j["base_seed"] = manifest.base_seed;
  j["source"] = manifest.source;
  j["config"] = manifest.config;
  j["cells"] = json::array();
  for (const ManifestCell& cell : manifest.cells) j["cells"].push_back(cell_to_json(cell));
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(fmt::format("manifest not found: {}", path.string()));
  try {
    const json j = json::parse(is);
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.source = j.at("source").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const json& cell : j.at("cells")) m.cells.push_back(cell_from_json(cell));
    return m;
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("malformed manifest '{}': {}", path.string(), e.what()));
  }
}

std::vector<std::string> check_manifest(const RunManifest& manifest,
                                        const std::filesystem::path& out_dir) {
  std::vector<std::string> problems;
  std::set<std::string> listed;
  for (const ManifestCell& cell : manifest.cells) {
    listed.insert(cell.file);
    if (cell.file != cell.config.file_name()) {
      problems.push_back(
          fmt::format("{}: file name does not match cell {}", cell.file, cell.config.cell_name()));
    }
    const std::filesystem::path path = out_dir / cell.file;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      problems.push_back(fmt::format("{}: missing", cell.file));
      continue;
    }
    const std::size_t expected = cell.config.trials * cell.config.episodes;
    const std::size_t rows = count_rows(path);
    if (rows != cell.rows || rows != expected) {
      problems.push_back(fmt::format("{}: {} rows, manifest records {} (expected {})", cell.file, rows,
                                     cell.rows, expected));
    }
    if (std::filesystem::file_size(path) != cell.bytes) {
      problems.push_back(fmt::format("{}: size differs from manifest", cell.file));
    }
  }
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    const bool is_cell = entry.path().extension() == ".csv" &&
                         (name.starts_with(kChainName) || name.starts_with(kGridName));
    if (is_cell && !listed.contains(name)) {
      problems.push_back(fmt::format("{}: not listed in manifest", name));
    }
  }
  return problems;
}

}  // namespace sfnoise

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sfnoise/config.hpp"
#include "sfnoise/manifest.hpp"
#include "sfnoise/report.hpp"
#include "sfnoise/verify.hpp"

namespace fs = std::filesystem;
using namespace sfnoise;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  os << text;
  if (!os) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

int cmd_run(const std::string& config_path, const std::string& preset, const fs::path& out,
            std::size_t parallelism, std::optional<std::uint64_t> seed) {
  SweepConfig sweep;
  std::string source;
  if (!preset.empty()) {
    if (preset != "paper") throw ConfigError(fmt::format("unknown preset '{}'", preset));
    sweep = paper_preset(seed.value_or(0));
    source = "preset:paper";
  } else {
    sweep = load_sweep_config(config_path);
    source = config_path;
    if (seed) {
      sweep.entries["base_seed"] = std::to_string(*seed);
      for (ExperimentConfig& cell : sweep.cells) cell.base_seed = *seed;
    }
  }
  fs::create_directories(out);
  SweepOptions options;
  options.parallelism = parallelism;
  options.out_dir = out;
  std::size_t done = 0;
  options.on_cell_done = [&](const CellResult& cell) {
    ++done;
    fmt::print(stderr, "[{}/{}] {}{}\n", done, sweep.cells.size(), cell.config.cell_name(),
               cell.resumed ? " (resumed)" : fmt::format(" {:.1f}s", cell.seconds));
  };
  const std::vector<CellResult> results = run_sweep(sweep.cells, options);
  write_manifest(out / kManifestFile, make_manifest(sweep, source, results, out));
  fmt::print("wrote {} cells and {} to {}\n", results.size(), kManifestFile, out.string());
  return 0;
}

int cmd_report(const fs::path& out, const std::string& table_key) {
  const TableSpec spec = table_spec(table_key);
  Dataset data(out);
  const TableResult table = build_table(spec, data);
  if (!table.missing.empty()) {
    fmt::print(stderr, "error: {} missing cells for {}:\n", table.missing.size(), spec.key);
    for (const std::string& cell : table.missing) fmt::print(stderr, "  {}\n", cell);
    return 1;
  }
  write_text(out / fmt::format("table_{}.csv", spec.key), table_csv(table));
  write_text(out / fmt::format("plot_{}.csv", spec.key), plot_csv(table, data));
  if (spec.metric == TableMetric::kFinalLength) {
    write_text(out / fmt::format("histogram_{}.csv", spec.key), histogram_csv(table, data));
    write_text(out / fmt::format("thresholds_{}.csv", spec.key), thresholds_csv(table, data));
  }
  fmt::print("{}", table_text(table));
  return 0;
}

int cmd_verify(const fs::path& out) {
  bool all = true;
  for (const CriterionResult& r : verify_output(out)) {
    fmt::print("{}\n", format_criterion(r));
    all = all && r.passed;
  }
  fmt::print("{}\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q, Q(lambda), SF and PF agents in noisy gridworlds"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out;
  std::size_t parallelism = 1;
  std::optional<std::uint64_t> seed;
  CLI::App* run = app.add_subcommand("run", "Run a sweep and write raw CSVs plus a manifest");
  auto* config_opt = run->add_option("--config", config_path, "Config file");
  auto* preset_opt = run->add_option("--preset", preset, "Built-in sweep (paper)");
  config_opt->excludes(preset_opt);
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed override");

  std::string table;
  CLI::App* report = app.add_subcommand("report", "Reproduce one results table from a sweep");
  report->add_option("--out", out, "Sweep output directory")->required();
  report->add_option("--table", table, "t1, t2, t3 or t4")->required();

  CLI::App* verify = app.add_subcommand("verify", "Check acceptance criteria against a sweep");
  verify->add_option("--out", out, "Sweep output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (config_path.empty() && preset.empty()) {
        fmt::print(stderr, "error: run needs --config or --preset\n");
        return 2;
      }
      return cmd_run(config_path, preset, out, parallelism, seed);
    }
    if (report->parsed()) return cmd_report(out, table);
    if (verify->parsed()) return cmd_verify(out);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sfnoise/config.hpp"
#include "sfnoise/manifest.hpp"
#include "sfnoise/verify.hpp"

using namespace sfnoise;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<CellResult> sweep_into(const SweepConfig& sweep, const fs::path& dir, std::size_t parallelism) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  SweepOptions options;
  options.parallelism = parallelism;
  options.out_dir = dir;
  std::size_t done = 0;
  options.on_cell_done = [&](const CellResult& cell) {
    fmt::print(stderr, "  [{}/{}] {} {:.1f}s\n", ++done, sweep.cells.size(), cell.config.cell_name(),
               cell.seconds);
  };
  const auto start = std::chrono::steady_clock::now();
  std::vector<CellResult> results = run_sweep(sweep.cells, options);
  write_manifest(dir / kManifestFile, make_manifest(sweep, "preset:paper", results, dir));
  fmt::print(stderr, "sweep at parallelism {} took {:.0f}s\n", parallelism,
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return results;
}

CriterionResult compare_sweeps(const SweepConfig& sweep, const fs::path& a, const fs::path& b) {
  std::vector<std::string> differing;
  for (const ExperimentConfig& cell : sweep.cells) {
    const std::string left = slurp(a / cell.file_name());
    if (left.empty() || left != slurp(b / cell.file_name())) differing.push_back(cell.cell_name());
  }
  std::string detail = fmt::format("{} cell CSVs compared", sweep.cells.size());
  if (!differing.empty()) {
    detail = fmt::format("{} differ, first {}", differing.size(), differing.front());
  }
  return {10, "parallelism 1 and 8 give byte-identical CSVs", differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sfnoise_acceptance";
  const SweepConfig sweep = paper_preset(0);
  const fs::path parallel_dir = root / "parallel8";
  const fs::path serial_dir = root / "parallel1";

  fmt::print(stderr, "paper preset: {} cells into {}\n", sweep.cells.size(), root.string());
  (void)sweep_into(sweep, parallel_dir, 8);
  (void)sweep_into(sweep, serial_dir, 1);

  const RunManifest manifest = read_manifest(parallel_dir / kManifestFile);
  Dataset data(parallel_dir);
  std::vector<CriterionResult> results;
  results.push_back(check_chain_low_noise(data));
  results.push_back(check_chain_medium_order(data));
  results.push_back(check_chain_high_noise(data));
  results.push_back(check_chain_q_failure(data));
  results.push_back(check_grid_low_noise(data));
  results.push_back(check_grid_lambda_effect(data));
  results.push_back(check_grid_high_noise(data));
  results.push_back(check_sr_oracle());
  results.push_back(check_reductions());
  results.push_back(compare_sweeps(sweep, parallel_dir, serial_dir));
  results.push_back(check_invariants(manifest, data));

  int failed = 0;
  for (const CriterionResult& r : results) {
    fmt::print("{}\n", format_criterion(r));
    failed += r.passed ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}

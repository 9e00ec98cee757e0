#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sfnoise/config.hpp"
#include "sfnoise/harness.hpp"

namespace sfnoise {

std::string_view tool_version();

struct ManifestCell {
  ExperimentConfig config;
  std::string file;  // relative to the output directory
  std::size_t rows = 0;
  std::uintmax_t bytes = 0;
  double seconds = 0.0;
};

/// Record of one `run`: what was asked for and what was written.
struct RunManifest {
  std::string tool_version;
  std::uint64_t base_seed = 0;
  std::string source;  // config path or "preset:paper"
  std::map<std::string, std::string> config;
  std::vector<ManifestCell> cells;
};

inline constexpr std::string_view kManifestFile = "manifest.json";

/// Builds the manifest after a sweep, reading sizes of the written files.
RunManifest make_manifest(const SweepConfig& sweep, std::string source,
                          const std::vector<CellResult>& results,
                          const std::filesystem::path& out_dir);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
/// Throws std::runtime_error if the file is missing or malformed.
RunManifest read_manifest(const std::filesystem::path& path);

/// Consistency problems between a manifest and the directory it describes:
/// missing files, row or size mismatches, file names that do not match the
/// recorded cell, and cell CSVs the manifest does not list. Empty when clean.
std::vector<std::string> check_manifest(const RunManifest& manifest,
                                        const std::filesystem::path& out_dir);

}  // namespace sfnoise

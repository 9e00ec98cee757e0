#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sfnoise/manifest.hpp"
#include "sfnoise/report.hpp"

namespace sfnoise {

struct CriterionResult {
  int id = 0;  // 0 is the manifest consistency check
  std::string title;
  bool passed = false;
  std::string detail;
};

/// "PASS  3  title: detail" / "FAIL ...".
std::string format_criterion(const CriterionResult& result);

// Quantitative checks on a paper-preset dataset.
CriterionResult check_chain_low_noise(Dataset& data);      // 1
CriterionResult check_chain_medium_order(Dataset& data);   // 2
CriterionResult check_chain_high_noise(Dataset& data);     // 3
CriterionResult check_chain_q_failure(Dataset& data);      // 4
CriterionResult check_grid_low_noise(Dataset& data);       // 5
CriterionResult check_grid_lambda_effect(Dataset& data);   // 6
CriterionResult check_grid_high_noise(Dataset& data);      // 7

/// Fixed-policy SF learning on the noiseless chain against (I - gamma T)^-1.
CriterionResult check_sr_oracle();                         // 8

/// PF(0) vs SF and Q(0) vs Q: bitwise equal weights after `episodes`
/// seeded episodes on both environments.
CriterionResult check_reductions(std::size_t episodes = 100);  // 9

/// Recomputes trial 0 of every listed cell and compares it with the stored
/// rows.
CriterionResult check_replay(const RunManifest& manifest, Dataset& data);  // 10

/// Epsilon closed form, step cap and reward range, histogram partitions,
/// quartile ordering and moving-average bounds over every listed cell.
CriterionResult check_invariants(const RunManifest& manifest, Dataset& data);  // 11

CriterionResult check_manifest_result(const RunManifest& manifest,
                                      const std::filesystem::path& dir);  // 0

/// Manifest check followed by criteria 1 to 11. A missing or unreadable
/// manifest yields a single failed result.
std::vector<CriterionResult> verify_output(const std::filesystem::path& dir);

}  // namespace sfnoise

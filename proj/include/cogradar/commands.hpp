#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cogradar/config.hpp"
#include "cogradar/metrics.hpp"

namespace cogradar {

enum class Subcommand { Simulate, CompareFilters, CompareModes, Pcrlb, Pica };

struct RunManifest {
  std::filesystem::path config_path;  // empty: all defaults
  Subcommand subcommand = Subcommand::Simulate;
  std::filesystem::path output_dir;
  int n_runs = 100;
  std::optional<std::uint64_t> seed;  // overrides scenario.seed
  int workers = 1;
};

Subcommand parse_subcommand(const std::string& name);

/// Loads the config, runs the subcommand, and writes its CSV files plus
/// `effective_config.cfg` into the output directory. Returns the paths
/// written, in order.
std::vector<std::filesystem::path> run_command(const RunManifest& manifest);

// Exposed for tests.
void write_rmse_csv(const std::filesystem::path& path, const RmseCurve& curve);
void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& table);

}  // namespace cogradar

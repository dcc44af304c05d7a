#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "uclt/cli/config.hpp"
#include "uclt/lab/model.hpp"

namespace uclt::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitCheckFailed = 2 };

struct RunRequest {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<std::filesystem::path> out;
  /// Worker cap; never changes any output byte.
  unsigned threads = 1;
};

/// Each command writes its report files and returns an ExitCode. Config problems throw
/// ConfigError; other failures throw uclt::Error.
int run_check_theorem(const RunRequest& request, std::ostream& log);
int run_inequalities(const RunRequest& request, std::ostream& log);
int run_covering(const RunRequest& request, std::ostream& log);
/// Consolidated plotting CSVs from the reports in `run_dir`, written to `out` (default
/// run_dir/export). Throws MissingRun when `run_dir` holds no report.
int run_export(const std::filesystem::path& run_dir, const std::optional<std::filesystem::path>& out,
               std::ostream& log);

/// Model block of a config; `seed` is the run seed.
lab::ModelSpec parse_model(const Section& section, std::uint64_t seed);
/// parse_model plus model validation, with failures reported at the section's line.
lab::MartingaleFieldModel build_model(const Section& section, std::uint64_t seed);
CoordinateMetric parse_metric(const Section& section);

/// Models used by `inequalities` when the config names none.
std::vector<lab::ModelSpec> shipped_model_suite(std::uint64_t seed);

}  // namespace uclt::cli

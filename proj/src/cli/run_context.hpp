#pragma once

// Shared plumbing of the commands: effective config, provenance and deterministic file output.

#include <filesystem>
#include <string>
#include <vector>

#include "uclt/cli/commands.hpp"
#include "uclt/lab/engine.hpp"
#include "uclt/serialization.hpp"

namespace uclt::cli {

struct RunContext {
  std::string command;
  ConfigDocument doc;
  Json effective;  ///< config after overrides, without "out"
  std::string hash;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  std::filesystem::path out;
  std::filesystem::path config_dir;
  lab::LabOptions lab;

  Section root() const { return Section(doc, ""); }
  Json provenance() const;
  /// "# config_hash=... seed=... replications=... command=..." followed by a newline.
  std::string csv_preamble() const;
  void write_json(const std::string& file, const Json& body) const;
  /// `header` is the column line; rows are joined with LF.
  void write_csv(const std::string& file, const std::string& header,
                 const std::vector<std::string>& rows) const;
  std::filesystem::path resolve(const std::string& relative) const;
};

/// Loads the config, applies overrides and fixes the output directory.
RunContext open_run(const std::string& command, const RunRequest& request,
                    std::size_t default_replications);

std::string csv_field(const std::string& s);
std::string csv_number(double x);

}  // namespace uclt::cli

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stairgen/bench.hpp"
#include "stairgen/report.hpp"

namespace stairgen {

// Environment variable naming the config file used when --config is absent.
inline constexpr const char* kConfigEnvVar = "STAIRGEN_CONFIG";

struct CliConfig {
  std::filesystem::path config_path;
  ExperimentPlan plan;
  std::filesystem::path out_dir = "reports";
  std::vector<ReportFormat> formats{ReportFormat::kCsv, ReportFormat::kJson, ReportFormat::kMarkdown};
};

// Command-line values that take precedence over the file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> out_dir;
  std::optional<std::string> formats;
};

// Parses an INI-style config (sections target, draft, plan, latency, output),
// resolves corpus paths relative to the file, loads corpora, builds both
// models once to validate them, and encodes the prompts. Throws ConfigError
// subclasses for anything invalid; unknown keys are rejected.
CliConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides = {});

// --config if given, else $STAIRGEN_CONFIG, else the in-repo default.
std::filesystem::path resolve_config_path(const std::optional<std::string>& flag);

std::vector<int> parse_batch_sizes(std::string_view text);

}  // namespace stairgen

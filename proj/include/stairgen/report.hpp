#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "stairgen/bench.hpp"

namespace stairgen {

enum class ReportFormat { kCsv, kJson, kMarkdown };

// Comma-separated list of csv|json|md. Throws InvalidConfig.
std::vector<ReportFormat> parse_formats(std::string_view list);

inline constexpr std::string_view kCsvHeader =
    "method,batch_size,prompt_id,rep,seconds,target_batch_calls,target_single_calls,"
    "target_rows_scored,draft_calls,tokens_generated,accepted_total";

std::string render_csv(const BenchReport& report);
nlohmann::ordered_json to_json(const BenchReport& report);
std::string render_json(const BenchReport& report);
std::string render_markdown(const BenchReport& report);

// Writes <out_dir>/<sweep|comparison>.<ext> for each format, creating
// out_dir if needed. Throws IoError naming the offending path.
std::vector<std::filesystem::path> write_report(const BenchReport& report,
                                                const std::vector<ReportFormat>& formats,
                                                const std::filesystem::path& out_dir);

}  // namespace stairgen

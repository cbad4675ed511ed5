#include "stairgen/report.hpp"

#include <fmt/format.h>

#include <fstream>
#include <system_error>

#include "stairgen/errors.hpp"

namespace stairgen {
namespace {

using ojson = nlohmann::ordered_json;

ojson stats_json(const TimingStats& s) {
  return ojson{{"n", s.n},       {"mean", s.mean}, {"median", s.median}, {"min", s.min},
               {"max", s.max},   {"std", s.std},   {"p5", s.p5},         {"p25", s.p25},
               {"p75", s.p75},   {"p95", s.p95}};
}

ojson totals_json(const TraceTotals& t) {
  return ojson{{"target_batch_calls", t.target_batch_calls},
               {"target_single_calls", t.target_single_calls},
               {"target_rows_scored", t.target_rows_scored},
               {"draft_calls", t.draft_calls},
               {"tokens_generated", t.tokens_generated},
               {"accepted_total", t.accepted_total}};
}

ojson model_json(const ModelSpec& m) {
  ojson j{{"kind", to_string(m.kind)}, {"seed", m.seed}};
  switch (m.kind) {
    case ModelKind::kHash:
      j["context_window"] = m.context_window;
      j["eos_bias"] = m.eos_bias;
      if (m.corpus_path.empty() && m.corpus_text.empty()) {
        j["vocab_size"] = m.vocab_size;
      } else {
        j["vocab_corpus"] = m.corpus_path;
        j["tokenizer"] = to_string(m.tokenizer);
      }
      break;
    case ModelKind::kNGram:
      j["corpus"] = m.corpus_path;
      j["tokenizer"] = to_string(m.tokenizer);
      j["order"] = m.order;
      j["smoothing"] = m.smoothing;
      break;
    case ModelKind::kAgreement:
      j["agreement"] = m.agreement;
      break;
  }
  return j;
}

ojson plan_json(const ExperimentPlan& p) {
  ojson methods = ojson::array();
  for (Method m : p.methods) methods.push_back(to_string(m));
  ojson j{{"mode", to_string(p.mode)},
          {"methods", methods},
          {"batch_sizes", p.batch_sizes},
          {"stairs_batch_size", p.stairs_batch_size ? ojson(*p.stairs_batch_size) : ojson("auto")},
          {"repetitions", p.repetitions},
          {"sweep_repetitions", p.sweep_repetitions},
          {"warmup_runs", p.warmup_runs},
          {"max_new_tokens", p.gen.max_new_tokens},
          {"stop_on_eos", p.gen.stop_on_eos},
          {"seed", p.seed},
          {"prompts", p.prompt_texts},
          {"target", model_json(p.target)},
          {"draft", model_json(p.draft)},
          {"latency",
           {{"target_base", p.latency.target_base},
            {"target_per_row", p.latency.target_per_row},
            {"draft_per_call", p.latency.draft_per_call}}}};
  return j;
}

std::string file_name(const BenchReport& r, std::string_view ext) {
  return fmt::format("{}.{}", to_string(r.kind), ext);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << content;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

std::vector<ReportFormat> parse_formats(std::string_view list) {
  std::vector<ReportFormat> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    std::string_view item = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "csv") {
      out.push_back(ReportFormat::kCsv);
    } else if (item == "json") {
      out.push_back(ReportFormat::kJson);
    } else if (item == "md" || item == "markdown") {
      out.push_back(ReportFormat::kMarkdown);
    } else if (!item.empty()) {
      throw InvalidConfig(fmt::format("unknown report format '{}' (expected csv|json|md)", item));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw InvalidConfig("no report formats given");
  return out;
}

std::string render_csv(const BenchReport& report) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& r : report.runs) {
    const auto& t = r.totals;
    out += fmt::format("{},{},{},{},{:.9f},{},{},{},{},{},{}\n", to_string(r.method), r.batch_size,
                       r.prompt_id, r.rep, r.seconds, t.target_batch_calls, t.target_single_calls,
                       t.target_rows_scored, t.draft_calls, t.tokens_generated, t.accepted_total);
  }
  return out;
}

nlohmann::ordered_json to_json(const BenchReport& report) {
  ojson j;
  j["kind"] = to_string(report.kind);
  j["metadata"] = {{"environment", report.meta.environment},
                   {"timestamp", report.meta.timestamp},
                   {"clock_resolution_seconds", report.meta.clock_resolution_seconds},
                   {"target_model", report.meta.target_name},
                   {"draft_model", report.meta.draft_name},
                   {"plan", plan_json(report.plan)}};

  if (report.stairs_batch_size) j["stairs_batch_size"] = *report.stairs_batch_size;
  if (report.sweep) {
    j["sweep"] = {{"argmin_batch_size", report.sweep->argmin_batch_size},
                  {"argmin_mean", report.sweep->argmin_mean},
                  {"interior", report.sweep->interior}};
  }

  ojson groups = ojson::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"method", to_string(g.method)}, {"batch_size", g.batch_size}, {"stats", stats_json(g.stats)}});
  }
  j["groups"] = std::move(groups);

  ojson speedups = ojson::array();
  for (const auto& s : report.speedups) {
    speedups.push_back({{"method", to_string(s.method)},
                        {"batch_size", s.batch_size},
                        {"baseline_mean", s.baseline_mean},
                        {"variant_mean", s.variant_mean},
                        {"speedup_percent", s.speedup_percent}});
  }
  j["speedups"] = std::move(speedups);

  ojson bleu_rows = ojson::array();
  for (const auto& b : report.bleu) {
    bleu_rows.push_back({{"method", to_string(b.method)},
                         {"batch_size", b.batch_size},
                         {"prompt_id", b.prompt_id},
                         {"bleu_vs_original", b.bleu}});
  }
  j["bleu"] = std::move(bleu_rows);

  ojson outputs = ojson::array();
  for (const auto& o : report.outputs) {
    outputs.push_back({{"method", to_string(o.method)},
                       {"batch_size", o.batch_size},
                       {"prompt_id", o.prompt_id},
                       {"text", o.text},
                       {"tokens", o.tokens}});
  }
  j["outputs"] = std::move(outputs);

  ojson runs = ojson::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"method", to_string(r.method)},
                    {"batch_size", r.batch_size},
                    {"prompt_id", r.prompt_id},
                    {"rep", r.rep},
                    {"seconds", r.seconds},
                    {"trace", totals_json(r.totals)}});
  }
  j["runs"] = std::move(runs);
  return j;
}

std::string render_json(const BenchReport& report) {
  return to_json(report).dump(2) + "\n";
}

std::string render_markdown(const BenchReport& report) {
  std::string out = fmt::format("# {} report\n\n", report.kind == ReportKind::kSweep ? "Batch-size sweep" : "Method comparison");
  out += fmt::format("- mode: {}\n- target: `{}`\n- draft: `{}`\n- repetitions: {} (warmup {})\n- timestamp: {}\n\n",
                     to_string(report.plan.mode), report.meta.target_name, report.meta.draft_name,
                     report.plan.repetitions, report.plan.warmup_runs, report.meta.timestamp);

  out += "## Timing\n\n| method | B | n | mean (s) | median (s) | std (s) | min (s) | p5 (s) | p95 (s) | max (s) |\n";
  out += "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& g : report.groups) {
    const auto& s = g.stats;
    out += fmt::format("| {} | {} | {} | {:.6f} | {:.6f} | {:.6f} | {:.6f} | {:.6f} | {:.6f} | {:.6f} |\n",
                       to_string(g.method), g.batch_size, s.n, s.mean, s.median, s.std, s.min, s.p5, s.p95, s.max);
  }

  if (report.sweep) {
    out += fmt::format("\nBest batch size: **{}** (mean {:.6f} s, {})\n", report.sweep->argmin_batch_size,
                       report.sweep->argmin_mean, report.sweep->interior ? "interior" : "at the edge of the scan");
  }
  if (report.stairs_batch_size) {
    out += fmt::format("\nStairs batch size used: {}\n", *report.stairs_batch_size);
  }

  if (report.kind == ReportKind::kComparison) {
    out += "\n## Speedup vs original\n\n";
    if (report.speedups.empty()) {
      out += "(no speedups: `original` missing or only one method)\n";
    } else {
      out += "| method | B | original mean (s) | method mean (s) | speedup (%) |\n|---|---:|---:|---:|---:|\n";
      for (const auto& s : report.speedups) {
        out += fmt::format("| {} | {} | {:.6f} | {:.6f} | {:.2f} |\n", to_string(s.method), s.batch_size,
                           s.baseline_mean, s.variant_mean, s.speedup_percent);
      }
    }
  }

  out += "\n## BLEU vs original output\n\n| method | B | prompt | BLEU |\n|---|---:|---:|---:|\n";
  for (const auto& b : report.bleu) {
    out += fmt::format("| {} | {} | {} | {:.2f} |\n", to_string(b.method), b.batch_size, b.prompt_id, b.bleu);
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const BenchReport& report,
                                                const std::vector<ReportFormat>& formats,
                                                const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", out_dir.string(),
                              ec ? ec.message() : "not a directory"));
  }
  std::vector<std::filesystem::path> written;
  for (ReportFormat f : formats) {
    std::filesystem::path path;
    switch (f) {
      case ReportFormat::kCsv:
        path = out_dir / file_name(report, "csv");
        write_file(path, render_csv(report));
        break;
      case ReportFormat::kJson:
        path = out_dir / file_name(report, "json");
        write_file(path, render_json(report));
        break;
      case ReportFormat::kMarkdown:
        path = out_dir / file_name(report, "md");
        write_file(path, render_markdown(report));
        break;
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace stairgen

#include "stairgen/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "stairgen/cli_config.hpp"
#include "stairgen/errors.hpp"
#include "stairgen/metrics.hpp"
#include "stairgen/report.hpp"

namespace stairgen {
namespace {

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> formats;
  std::optional<std::string> mode;
  bool verbose = false;
};

CliConfig load(const CommonFlags& f) {
  CliOverrides o;
  o.seed = f.seed;
  o.mode = f.mode;
  o.out_dir = f.out_dir;
  o.formats = f.formats;
  return load_config(resolve_config_path(f.config), o);
}

void print_paths(std::ostream& out, const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) fmt::print(out, "wrote {}\n", p.string());
}

void print_groups(std::ostream& out, const BenchReport& report) {
  fmt::print(out, "{:<20} {:>3} {:>6} {:>12} {:>12} {:>12}\n", "method", "B", "n", "mean_s", "median_s", "std_s");
  for (const auto& g : report.groups) {
    fmt::print(out, "{:<20} {:>3} {:>6} {:>12.6f} {:>12.6f} {:>12.6f}\n", to_string(g.method), g.batch_size,
               g.stats.n, g.stats.mean, g.stats.median, g.stats.std);
  }
}

int cmd_generate(const CommonFlags& flags, const std::string& method_name, std::optional<int> batch_size,
                 std::optional<std::string> prompt_text, std::optional<int> max_new_tokens, std::ostream& out) {
  CliConfig cfg = load(flags);
  const ExperimentPlan& plan = cfg.plan;
  const Method method = parse_method(method_name);

  GenConfig gen = plan.gen;
  if (max_new_tokens) gen.max_new_tokens = *max_new_tokens;
  gen.batch_size = method == Method::kOriginal ? 1 : batch_size.value_or(plan.stairs_batch_size.value_or(1));
  gen.validate();

  ModelPtr target = build_model(plan.target);
  ModelPtr draft = build_draft(plan.draft, target, run_seed(plan, 0));
  const auto& vocab = target->vocabulary();
  TokenSeq prompt = prompt_text ? vocab.encode(*prompt_text) : plan.prompts.front();

  GenerationResult res;
  switch (method) {
    case Method::kOriginal: res = greedy_generate(*target, prompt, gen); break;
    case Method::kSequentialAssisted: res = sequential_assisted_generate(*target, *draft, prompt, gen); break;
    case Method::kStairs: res = stairs_generate(*target, *draft, prompt, gen); break;
  }
  fmt::print(out, "{}\n", vocab.decode(res.generated(prompt.size())));

  if (flags.verbose) {
    fmt::print(out, "{:>5} {:>9} {:>9} {:>10}\n", "iter", "proposed", "accepted", "committed");
    for (std::size_t i = 0; i < res.trace.iterations.size(); ++i) {
      const auto& it = res.trace.iterations[i];
      fmt::print(out, "{:>5} {:>9} {:>9} {:>10}\n", i, it.draft_proposed, it.accepted, it.committed);
    }
    const auto& t = res.trace.totals;
    fmt::print(out,
               "totals: tokens_generated={} target_single_calls={} target_batch_calls={} target_rows_scored={} "
               "draft_calls={} accepted_total={}\n",
               t.tokens_generated, t.target_single_calls, t.target_batch_calls, t.target_rows_scored, t.draft_calls,
               t.accepted_total);
  }
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, std::optional<std::string> batch_sizes, std::ostream& out) {
  CliConfig cfg = load(flags);
  ExperimentPlan plan = cfg.plan;
  if (batch_sizes) plan.batch_sizes = parse_batch_sizes(*batch_sizes);
  plan.repetitions = plan.sweep_repetitions;
  BenchReport report = run_sweep(plan);
  print_groups(out, report);
  auto paths = write_report(report, cfg.formats, cfg.out_dir);
  print_paths(out, paths);
  fmt::print(out, "best batch size: {} (mean {:.6f} s, {})\n", report.sweep->argmin_batch_size,
             report.sweep->argmin_mean, report.sweep->interior ? "interior" : "edge");
  return kExitOk;
}

int cmd_compare(const CommonFlags& flags, std::optional<int> batch_size, std::ostream& out) {
  CliConfig cfg = load(flags);
  ExperimentPlan plan = cfg.plan;
  if (batch_size) plan.stairs_batch_size = *batch_size;
  if (plan.methods.size() < 2) {
    throw InvalidConfig(fmt::format("compare needs at least two methods, plan names {}", plan.methods.size()));
  }
  BenchReport report = run_comparison(plan);
  print_groups(out, report);
  if (report.sweep) {
    fmt::print(out, "sweep winner: {} (mean {:.6f} s)\n", report.sweep->argmin_batch_size, report.sweep->argmin_mean);
  }
  fmt::print(out, "{:<20} {:>3} {:>12}\n", "method", "B", "speedup_%");
  for (const auto& s : report.speedups) {
    fmt::print(out, "{:<20} {:>3} {:>12.2f}\n", to_string(s.method), s.batch_size, s.speedup_percent);
  }
  for (const auto& b : report.bleu) {
    fmt::print(out, "bleu {} B={} prompt={}: {:.2f}\n", to_string(b.method), b.batch_size, b.prompt_id, b.bleu);
  }
  auto paths = write_report(report, cfg.formats, cfg.out_dir);
  print_paths(out, paths);
  return kExitOk;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_bleu(const std::string& candidate_path, const std::string& reference_path, std::ostream& out) {
  auto candidate = tokenize(read_file(candidate_path), TokenizerMode::kWhitespace);
  auto reference = tokenize(read_file(reference_path), TokenizerMode::kWhitespace);
  fmt::print(out, "{:.2f}\n", bleu(candidate, reference).value);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Greedy decoding with stairs-assisted generation: generation, sweeps, comparisons, BLEU"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--config", flags.config, fmt::format("Config file (default: ${} or the shipped default)", kConfigEnvVar));
  app.add_option("--seed", flags.seed, "Override plan seed");
  app.add_option("--out", flags.out_dir, "Report output directory");
  app.add_option("--format", flags.formats, "Report formats, comma-separated: csv,json,md");
  app.add_option("--mode", flags.mode, "Timing mode: wallclock|simulated");
  app.add_flag("-v,--verbose", flags.verbose, "Print per-iteration traces");

  std::string method = "original";
  std::optional<int> batch_size;
  std::optional<std::string> prompt;
  std::optional<int> max_new_tokens;
  auto* generate = app.add_subcommand("generate", "Generate one continuation with a chosen method");
  generate->add_option("--method", method, "original|sequential_assisted|stairs");
  generate->add_option("--batch-size,-b", batch_size, "Stairs rows per target call (draft length + 1)");
  generate->add_option("--prompt", prompt, "Prompt text (default: first plan prompt)");
  generate->add_option("--max-new-tokens", max_new_tokens, "Generation cap");

  std::optional<std::string> sweep_sizes;
  auto* sweep = app.add_subcommand("sweep", "Stairs batch-size sweep");
  sweep->add_option("--batch-sizes", sweep_sizes, "List or range, e.g. 2..10 or 2,4,8");

  std::optional<int> compare_b;
  auto* compare = app.add_subcommand("compare", "Compare original, sequential assisted and stairs generation");
  compare->add_option("--batch-size,-b", compare_b, "Pin the stairs batch size instead of sweeping for it");

  std::string candidate_path;
  std::string reference_path;
  auto* bleu_cmd = app.add_subcommand("bleu", "BLEU-4 of a candidate file against a reference file");
  bleu_cmd->add_option("candidate", candidate_path, "Candidate text file")->required();
  bleu_cmd->add_option("reference", reference_path, "Reference text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(flags, method, batch_size, prompt, max_new_tokens, out);
    if (*sweep) return cmd_sweep(flags, sweep_sizes, out);
    if (*compare) return cmd_compare(flags, compare_b, out);
    if (*bleu_cmd) return cmd_bleu(candidate_path, reference_path, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace stairgen

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stairgen/decode.hpp"
#include "stairgen/metrics.hpp"
#include "stairgen/reference_models.hpp"

namespace stairgen {

// Forward-call cost model. A target call over r rows costs
// target_base + target_per_row * (r - 1); each draft call costs
// draft_per_call.
//
// Defaults put every extra stairs row (one draft call plus one marginal
// target row) at 0.78 of a plain target step. With a 0.98 agreement draft
// this places the best batch size inside 2..10 and gives a stairs speedup in
// the low teens. A 64-token greedy generation takes 0.48 s.
struct LatencyModel {
  double target_base = 0.0075;
  double target_per_row = 0.00075;
  double draft_per_call = 0.0051;

  // Throws InvalidConfig on negative costs or target_per_row > target_base.
  void validate() const;
};

double simulate_time(const TraceTotals& totals, const LatencyModel& lat);

enum class Method { kOriginal, kSequentialAssisted, kStairs };
std::string_view to_string(Method m);
Method parse_method(std::string_view name);  // throws InvalidConfig

enum class TimingMode { kWallclock, kSimulated };
std::string_view to_string(TimingMode m);
TimingMode parse_timing_mode(std::string_view name);

enum class ModelKind { kHash, kNGram, kAgreement };
std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view name);

// Everything needed to rebuild a reference model. corpus_text is loaded by
// the caller; corpus_path is kept for the report echo only.
struct ModelSpec {
  ModelKind kind = ModelKind::kHash;
  std::uint64_t seed = 0;
  // hash
  std::size_t context_window = 4;
  double eos_bias = 0.0;
  std::size_t vocab_size = 0;  // synthetic vocabulary when no corpus is given
  // hash (vocabulary source) and ngram
  std::string corpus_path;
  std::string corpus_text;
  TokenizerMode tokenizer = TokenizerMode::kWhitespace;
  // ngram
  std::size_t order = 3;
  double smoothing = NGramLM::kDefaultSmoothing;
  // agreement draft
  double agreement = 0.9;
};

// Builds a standalone model. Agreement drafts cannot be targets.
ModelPtr build_model(const ModelSpec& spec);
// Builds the draft for one run. Agreement drafts wrap `target` and are
// reseeded from run_seed; the other kinds ignore it.
ModelPtr build_draft(const ModelSpec& spec, const ModelPtr& target, std::uint64_t run_seed);

struct ExperimentPlan {
  TimingMode mode = TimingMode::kSimulated;
  std::vector<Method> methods{Method::kOriginal, Method::kSequentialAssisted, Method::kStairs};
  std::vector<int> batch_sizes{2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Stairs batch size for comparisons; unset means "use the sweep winner".
  std::optional<int> stairs_batch_size;
  int repetitions = 100;
  // Repetitions of the sweep a comparison runs to pick its batch size.
  int sweep_repetitions = 100;
  int warmup_runs = 1;
  std::vector<std::string> prompt_texts;
  std::vector<TokenSeq> prompts;
  ModelSpec target;
  ModelSpec draft;
  GenConfig gen;  // batch_size is overridden per cell
  LatencyModel latency;
  std::uint64_t seed = 0;

  void validate() const;
};

// Seed handed to build_draft for repetition `rep` (warmups use indices past
// the timed ones).
std::uint64_t run_seed(const ExperimentPlan& plan, std::uint64_t run_index);

struct RunRecord {
  Method method = Method::kOriginal;
  int batch_size = 1;
  int prompt_id = 0;
  int rep = 0;
  double seconds = 0.0;
  TraceTotals totals;
};

struct GroupStats {
  Method method = Method::kOriginal;
  int batch_size = 1;
  TimingStats stats;
};

struct SpeedupRow {
  Method method = Method::kStairs;
  int batch_size = 1;
  double baseline_mean = 0.0;
  double variant_mean = 0.0;
  double speedup_percent = 0.0;
};

struct BleuRow {
  Method method = Method::kOriginal;
  int batch_size = 1;
  int prompt_id = 0;
  double bleu = 0.0;  // lowest over all timed repetitions
};

struct OutputRecord {
  Method method = Method::kOriginal;
  int batch_size = 1;
  int prompt_id = 0;
  std::string text;
  TokenSeq tokens;  // generated part only
};

struct SweepSummary {
  int argmin_batch_size = 0;
  double argmin_mean = 0.0;
  bool interior = false;  // argmin is neither the first nor the last scanned B
};

enum class ReportKind { kSweep, kComparison };
std::string_view to_string(ReportKind k);

struct ReportMetadata {
  std::string environment;
  std::string timestamp;
  double clock_resolution_seconds = 0.0;
  std::string target_name;
  std::string draft_name;
};

struct BenchReport {
  ReportKind kind = ReportKind::kSweep;
  ExperimentPlan plan;
  ReportMetadata meta;
  std::vector<RunRecord> runs;
  std::vector<GroupStats> groups;
  std::vector<SpeedupRow> speedups;
  std::vector<BleuRow> bleu;
  std::vector<OutputRecord> outputs;
  std::optional<SweepSummary> sweep;
  // Batch size the comparison actually used for stairs.
  std::optional<int> stairs_batch_size;
};

// Stairs-only sweep over plan.batch_sizes (needs >= 2 entries).
BenchReport run_sweep(const ExperimentPlan& plan);

// Runs every method in plan.methods. Assisted methods use
// plan.stairs_batch_size, or the winner of an embedded sweep when unset.
BenchReport run_comparison(const ExperimentPlan& plan);

}  // namespace stairgen

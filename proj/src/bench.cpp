#include "stairgen/bench.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <functional>

#include "stairgen/errors.hpp"
#include "stairgen/hashing.hpp"

namespace stairgen {
namespace {

constexpr std::uint64_t kWarmupIndexBase = 1ULL << 40;

std::string environment_string() {
#if defined(__clang__)
  std::string compiler = fmt::format("clang {}.{}.{}", __clang_major__, __clang_minor__, __clang_patchlevel__);
#elif defined(__GNUC__)
  std::string compiler = fmt::format("gcc {}.{}.{}", __GNUC__, __GNUC_MINOR__, __GNUC_PATCHLEVEL__);
#else
  std::string compiler = "unknown-compiler";
#endif
#if defined(__linux__)
  const char* os = "linux";
#elif defined(__APPLE__)
  const char* os = "darwin";
#elif defined(_WIN32)
  const char* os = "windows";
#else
  const char* os = "unknown-os";
#endif
  return fmt::format("{}; {}; C++{}", compiler, os, __cplusplus);
}

std::string timestamp_for(const ExperimentPlan& plan) {
  std::time_t t = 0;
  if (plan.mode == TimingMode::kSimulated) {
    // Stable across runs so simulated reports are reproducible byte for byte.
    t = static_cast<std::time_t>(plan.seed % 4102444800ULL);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(t));
}

double clock_resolution() {
  using period = std::chrono::steady_clock::period;
  return static_cast<double>(period::num) / static_cast<double>(period::den);
}

struct Models {
  ModelPtr target;
  std::function<ModelPtr(std::uint64_t)> draft_for_run;
};

Models build_models(const ExperimentPlan& plan) {
  Models m;
  m.target = build_model(plan.target);
  if (plan.draft.kind == ModelKind::kAgreement) {
    m.draft_for_run = [&plan, target = m.target](std::uint64_t run_index) {
      return build_draft(plan.draft, target, run_seed(plan, run_index));
    };
  } else {
    ModelPtr fixed = build_draft(plan.draft, m.target, 0);
    m.draft_for_run = [fixed](std::uint64_t) { return fixed; };
  }
  return m;
}

GenerationResult generate(Method method, const LanguageModel& target, const LanguageModel& draft,
                          const TokenSeq& prompt, const GenConfig& cfg) {
  switch (method) {
    case Method::kOriginal:
      return greedy_generate(target, prompt, cfg);
    case Method::kSequentialAssisted:
      return sequential_assisted_generate(target, draft, prompt, cfg);
    case Method::kStairs:
      return stairs_generate(target, draft, prompt, cfg);
  }
  throw ContractViolation("unknown method");
}

class Runner {
 public:
  explicit Runner(const ExperimentPlan& plan) : plan_(plan), models_(build_models(plan)) {
    const auto& vocab = models_.target->vocabulary();
    GenConfig ref_cfg = plan_.gen;
    ref_cfg.batch_size = 1;
    for (const auto& prompt : plan_.prompts) {
      auto ref = greedy_generate(*models_.target, prompt, ref_cfg);
      references_.push_back(vocab.token_strings(ref.generated(prompt.size())));
    }
  }

  // Runs warmups and timed repetitions of one (method, B) cell over every
  // prompt, appending to `report`.
  void run_cell(Method method, int batch_size, int repetitions, BenchReport& report) {
    GenConfig cfg = plan_.gen;
    cfg.batch_size = method == Method::kOriginal ? 1 : batch_size;
    const auto& vocab = models_.target->vocabulary();
    std::vector<double> samples;

    for (std::size_t p = 0; p < plan_.prompts.size(); ++p) {
      const TokenSeq& prompt = plan_.prompts[p];
      const auto cell_name = [&] {
        return fmt::format("method={} batch_size={} prompt={}", to_string(method), cfg.batch_size, p);
      };
      try {
        for (int w = 0; w < plan_.warmup_runs; ++w) {
          auto draft = models_.draft_for_run(kWarmupIndexBase + static_cast<std::uint64_t>(w));
          (void)generate(method, *models_.target, *draft, prompt, cfg);
        }
        double worst_bleu = 100.0;
        for (int rep = 0; rep < repetitions; ++rep) {
          auto draft = models_.draft_for_run(static_cast<std::uint64_t>(rep));
          GenerationResult res;
          double seconds = 0.0;
          if (plan_.mode == TimingMode::kWallclock) {
            const auto start = std::chrono::steady_clock::now();
            res = generate(method, *models_.target, *draft, prompt, cfg);
            const auto stop = std::chrono::steady_clock::now();
            seconds = std::chrono::duration<double>(stop - start).count();
          } else {
            res = generate(method, *models_.target, *draft, prompt, cfg);
            seconds = simulate_time(res.trace.totals, plan_.latency);
          }
          if (auto problem = res.trace.check_consistency()) {
            throw ContractViolation(fmt::format("inconsistent trace: {}", *problem));
          }
          auto generated = res.generated(prompt.size());
          worst_bleu = std::min(worst_bleu, bleu(vocab.token_strings(generated), references_[p]).value);
          if (rep == 0) {
            report.outputs.push_back({method, cfg.batch_size, static_cast<int>(p),
                                      vocab.decode(generated), TokenSeq(generated.begin(), generated.end())});
          }
          report.runs.push_back({method, cfg.batch_size, static_cast<int>(p), rep, seconds, res.trace.totals});
          samples.push_back(seconds);
        }
        report.bleu.push_back({method, cfg.batch_size, static_cast<int>(p), worst_bleu});
      } catch (const ConfigError& e) {
        throw InvalidConfig(fmt::format("{}: {}", cell_name(), e.what()));
      } catch (const Error& e) {
        throw Error(fmt::format("{}: {}", cell_name(), e.what()));
      }
    }
    report.groups.push_back({method, cfg.batch_size, timing_stats(samples)});
  }

  ReportMetadata metadata(const LanguageModel& draft_sample) const {
    ReportMetadata meta;
    meta.environment = environment_string();
    meta.timestamp = timestamp_for(plan_);
    meta.clock_resolution_seconds = clock_resolution();
    meta.target_name = models_.target->name();
    meta.draft_name = draft_sample.name();
    return meta;
  }

  const Models& models() const { return models_; }

 private:
  const ExperimentPlan& plan_;
  Models models_;
  std::vector<std::vector<std::string>> references_;
};

SweepSummary summarize_sweep(const std::vector<GroupStats>& groups) {
  SweepSummary s;
  std::size_t best = 0;
  for (std::size_t i = 1; i < groups.size(); ++i) {
    if (groups[i].stats.mean < groups[best].stats.mean) best = i;
  }
  s.argmin_batch_size = groups[best].batch_size;
  s.argmin_mean = groups[best].stats.mean;
  s.interior = best != 0 && best + 1 != groups.size();
  return s;
}

}  // namespace

void LatencyModel::validate() const {
  if (target_base < 0.0 || target_per_row < 0.0 || draft_per_call < 0.0) {
    throw InvalidConfig(fmt::format("latency parameters must be non-negative (base={}, per_row={}, draft={})",
                                    target_base, target_per_row, draft_per_call));
  }
  if (target_per_row > target_base) {
    throw InvalidConfig(fmt::format("target_per_row ({}) must not exceed target_base ({})",
                                    target_per_row, target_base));
  }
}

double simulate_time(const TraceTotals& t, const LatencyModel& lat) {
  lat.validate();
  const std::int64_t batch_rows = t.target_rows_scored - t.target_single_calls;
  if (batch_rows < t.target_batch_calls || t.target_single_calls < 0 || t.draft_calls < 0) {
    throw ContractViolation("trace totals are inconsistent: batch calls without rows");
  }
  const double batch = static_cast<double>(t.target_batch_calls) * lat.target_base +
                       static_cast<double>(batch_rows - t.target_batch_calls) * lat.target_per_row;
  const double single = static_cast<double>(t.target_single_calls) * lat.target_base;
  const double draft = static_cast<double>(t.draft_calls) * lat.draft_per_call;
  return batch + single + draft;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kOriginal: return "original";
    case Method::kSequentialAssisted: return "sequential_assisted";
    case Method::kStairs: return "stairs";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "original") return Method::kOriginal;
  if (name == "sequential_assisted") return Method::kSequentialAssisted;
  if (name == "stairs") return Method::kStairs;
  throw InvalidConfig(fmt::format("unknown method '{}' (expected original|sequential_assisted|stairs)", name));
}

std::string_view to_string(TimingMode m) {
  return m == TimingMode::kWallclock ? "wallclock" : "simulated";
}

TimingMode parse_timing_mode(std::string_view name) {
  if (name == "wallclock") return TimingMode::kWallclock;
  if (name == "simulated") return TimingMode::kSimulated;
  throw InvalidConfig(fmt::format("unknown mode '{}' (expected wallclock|simulated)", name));
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kHash: return "hash";
    case ModelKind::kNGram: return "ngram";
    case ModelKind::kAgreement: return "agreement";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "hash") return ModelKind::kHash;
  if (name == "ngram") return ModelKind::kNGram;
  if (name == "agreement" || name == "agreement-draft") return ModelKind::kAgreement;
  throw InvalidConfig(fmt::format("unknown model kind '{}' (expected hash|ngram|agreement)", name));
}

std::string_view to_string(ReportKind k) {
  return k == ReportKind::kSweep ? "sweep" : "comparison";
}

ModelPtr build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::kHash: {
      Vocabulary vocab = spec.corpus_text.empty() ? Vocabulary::synthetic(spec.vocab_size)
                                                  : Vocabulary::from_corpus(spec.corpus_text, spec.tokenizer);
      return std::make_shared<HashLM>(std::move(vocab),
                                      HashLM::Params{spec.seed, spec.context_window, spec.eos_bias});
    }
    case ModelKind::kNGram:
      return std::make_shared<NGramLM>(train_ngram(spec.corpus_text, spec.order, spec.tokenizer, spec.smoothing));
    case ModelKind::kAgreement:
      throw InvalidConfig("an agreement draft needs a target model to wrap");
  }
  throw ContractViolation("unknown model kind");
}

ModelPtr build_draft(const ModelSpec& spec, const ModelPtr& target, std::uint64_t seed) {
  if (spec.kind == ModelKind::kAgreement) {
    return std::make_shared<AgreementDraft>(target, spec.agreement, seed);
  }
  return build_model(spec);
}

std::uint64_t run_seed(const ExperimentPlan& plan, std::uint64_t run_index) {
  return mix64(plan.draft.seed ^ mix64(plan.seed ^ mix64(run_index)));
}

void ExperimentPlan::validate() const {
  if (methods.empty()) throw InvalidConfig("plan must name at least one method");
  if (repetitions < 1) throw InvalidConfig(fmt::format("repetitions must be >= 1, got {}", repetitions));
  if (sweep_repetitions < 1) {
    throw InvalidConfig(fmt::format("sweep repetitions must be >= 1, got {}", sweep_repetitions));
  }
  if (warmup_runs < 0) throw InvalidConfig(fmt::format("warmup runs must be >= 0, got {}", warmup_runs));
  for (int b : batch_sizes) {
    if (b < 1) throw InvalidConfig(fmt::format("batch sizes must be >= 1, got {}", b));
  }
  if (stairs_batch_size && *stairs_batch_size < 1) {
    throw InvalidConfig(fmt::format("stairs batch size must be >= 1, got {}", *stairs_batch_size));
  }
  if (prompts.empty()) throw InvalidConfig("plan has no prompts");
  if (target.kind == ModelKind::kAgreement) throw InvalidConfig("the target model cannot be an agreement draft");
  GenConfig g = gen;
  g.batch_size = 1;
  g.validate();
  latency.validate();
}

BenchReport run_sweep(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.batch_sizes.size() < 2) {
    throw InvalidConfig(fmt::format("a sweep needs at least two batch sizes, got {}", plan.batch_sizes.size()));
  }
  Runner runner(plan);
  BenchReport report;
  report.kind = ReportKind::kSweep;
  report.plan = plan;
  report.plan.methods = {Method::kStairs};
  for (int b : plan.batch_sizes) runner.run_cell(Method::kStairs, b, plan.repetitions, report);
  report.sweep = summarize_sweep(report.groups);
  report.meta = runner.metadata(*runner.models().draft_for_run(0));
  return report;
}

BenchReport run_comparison(const ExperimentPlan& plan) {
  plan.validate();
  BenchReport report;
  report.kind = ReportKind::kComparison;
  report.plan = plan;

  int stairs_b = 0;
  if (plan.stairs_batch_size) {
    stairs_b = *plan.stairs_batch_size;
  } else {
    ExperimentPlan sweep_plan = plan;
    sweep_plan.repetitions = plan.sweep_repetitions;
    BenchReport sweep = run_sweep(sweep_plan);
    report.sweep = sweep.sweep;
    stairs_b = sweep.sweep->argmin_batch_size;
  }
  report.stairs_batch_size = stairs_b;

  Runner runner(plan);
  for (Method m : plan.methods) runner.run_cell(m, stairs_b, plan.repetitions, report);

  const auto original = std::find_if(report.groups.begin(), report.groups.end(),
                                     [](const GroupStats& g) { return g.method == Method::kOriginal; });
  if (original != report.groups.end()) {
    for (const auto& g : report.groups) {
      if (g.method == Method::kOriginal) continue;
      report.speedups.push_back({g.method, g.batch_size, original->stats.mean, g.stats.mean,
                                 speedup_percent(original->stats.mean, g.stats.mean)});
    }
  }
  report.meta = runner.metadata(*runner.models().draft_for_run(0));
  return report;
}

}  // namespace stairgen

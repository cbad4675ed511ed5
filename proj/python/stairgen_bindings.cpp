#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stairgen/bench.hpp"
#include "stairgen/cli_config.hpp"
#include "stairgen/decode.hpp"
#include "stairgen/errors.hpp"
#include "stairgen/metrics.hpp"
#include "stairgen/reference_models.hpp"
#include "stairgen/report.hpp"

namespace py = pybind11;
using namespace stairgen;

namespace {

py::tuple result_tuple(GenerationResult r) {
  return py::make_tuple(std::move(r.output), std::move(r.trace));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Greedy, sequential assisted and stairs assisted generation over reference models";

  auto base_error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base_error);
  py::register_exception<IoError>(m, "IoError", base_error);
  py::register_exception<ContractViolation>(m, "ContractViolation", base_error);

  py::enum_<TokenizerMode>(m, "TokenizerMode")
      .value("WHITESPACE", TokenizerMode::kWhitespace)
      .value("BYTE", TokenizerMode::kByte);

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_static("synthetic", &Vocabulary::synthetic, py::arg("size"))
      .def_static("from_corpus", &Vocabulary::from_corpus, py::arg("text"),
                  py::arg("mode") = TokenizerMode::kWhitespace)
      .def("__len__", &Vocabulary::size)
      .def_property_readonly("eos_id", &Vocabulary::eos_id)
      .def_property_readonly("pad_id", &Vocabulary::pad_id)
      .def("token", &Vocabulary::token)
      .def("id_of", &Vocabulary::id_of)
      .def("encode", &Vocabulary::encode)
      .def("decode", [](const Vocabulary& v, const TokenSeq& ids) { return v.decode(ids); })
      .def_property_readonly("tokens", &Vocabulary::tokens);

  py::class_<LanguageModel, std::shared_ptr<LanguageModel>>(m, "LanguageModel")
      .def_property_readonly("vocabulary", &LanguageModel::vocabulary, py::return_value_policy::reference_internal)
      .def_property_readonly("name", &LanguageModel::name)
      .def("score_next", [](const LanguageModel& lm, const TokenSeq& p) { return score_next(lm, p); })
      .def("score_batch", [](const LanguageModel& lm, const std::vector<TokenSeq>& rows) { return score_batch(lm, rows); });

  py::class_<HashLM, LanguageModel, std::shared_ptr<HashLM>>(m, "HashLM")
      .def(py::init([](Vocabulary vocab, std::uint64_t seed, std::size_t window, double eos_bias) {
             return std::make_shared<HashLM>(std::move(vocab), HashLM::Params{seed, window, eos_bias});
           }),
           py::arg("vocabulary"), py::arg("seed") = 0, py::arg("context_window") = 4, py::arg("eos_bias") = 0.0);

  py::class_<NGramLM, LanguageModel, std::shared_ptr<NGramLM>>(m, "NGramLM")
      .def_property_readonly("order", &NGramLM::order);

  m.def(
      "train_ngram",
      [](const std::string& corpus, std::size_t order, TokenizerMode mode, double smoothing) {
        return std::make_shared<NGramLM>(train_ngram(corpus, order, mode, smoothing));
      },
      py::arg("corpus"), py::arg("order"), py::arg("mode") = TokenizerMode::kWhitespace,
      py::arg("smoothing") = NGramLM::kDefaultSmoothing);

  py::class_<AgreementDraft, LanguageModel, std::shared_ptr<AgreementDraft>>(m, "AgreementDraft")
      .def(py::init([](std::shared_ptr<LanguageModel> target, double agreement, std::uint64_t seed) {
             return std::make_shared<AgreementDraft>(std::move(target), agreement, seed);
           }),
           py::arg("target"), py::arg("agreement"), py::arg("seed") = 0);

  m.def("argmax_token", [](const Logits& l) { return argmax_token(l); });

  py::class_<GenConfig>(m, "GenConfig")
      .def(py::init([](int max_new_tokens, int batch_size, bool stop_on_eos) {
             return GenConfig{max_new_tokens, batch_size, stop_on_eos};
           }),
           py::arg("max_new_tokens") = 32, py::arg("batch_size") = 1, py::arg("stop_on_eos") = true)
      .def_readwrite("max_new_tokens", &GenConfig::max_new_tokens)
      .def_readwrite("batch_size", &GenConfig::batch_size)
      .def_readwrite("stop_on_eos", &GenConfig::stop_on_eos);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("draft_proposed", &IterationRecord::draft_proposed)
      .def_readonly("accepted", &IterationRecord::accepted)
      .def_readonly("committed", &IterationRecord::committed);

  py::class_<TraceTotals>(m, "TraceTotals")
      .def(py::init<>())
      .def_readwrite("target_single_calls", &TraceTotals::target_single_calls)
      .def_readwrite("target_batch_calls", &TraceTotals::target_batch_calls)
      .def_readwrite("target_rows_scored", &TraceTotals::target_rows_scored)
      .def_readwrite("draft_calls", &TraceTotals::draft_calls)
      .def_readwrite("tokens_generated", &TraceTotals::tokens_generated)
      .def_readwrite("accepted_total", &TraceTotals::accepted_total);

  py::class_<GenerationTrace>(m, "GenerationTrace")
      .def_readonly("iterations", &GenerationTrace::iterations)
      .def_readonly("totals", &GenerationTrace::totals)
      .def("check_consistency", &GenerationTrace::check_consistency);

  py::class_<ValidationResult>(m, "ValidationResult")
      .def_readonly("accepted_draft_count", &ValidationResult::accepted_draft_count)
      .def_readonly("committed", &ValidationResult::committed)
      .def_readonly("hit_eos", &ValidationResult::hit_eos);

  m.def("greedy_generate",
        [](const LanguageModel& lm, const TokenSeq& prompt, const GenConfig& cfg) {
          return result_tuple(greedy_generate(lm, prompt, cfg));
        },
        py::arg("model"), py::arg("prompt"), py::arg("cfg"));
  m.def("stairs_generate",
        [](const LanguageModel& t, const LanguageModel& d, const TokenSeq& prompt, const GenConfig& cfg) {
          return result_tuple(stairs_generate(t, d, prompt, cfg));
        },
        py::arg("target"), py::arg("draft"), py::arg("prompt"), py::arg("cfg"));
  m.def("sequential_assisted_generate",
        [](const LanguageModel& t, const LanguageModel& d, const TokenSeq& prompt, const GenConfig& cfg) {
          return result_tuple(sequential_assisted_generate(t, d, prompt, cfg));
        },
        py::arg("target"), py::arg("draft"), py::arg("prompt"), py::arg("cfg"));
  m.def("draft_propose",
        [](const LanguageModel& d, const TokenSeq& prefix, int k, bool stop_at_eos) {
          return draft_propose(d, prefix, k, stop_at_eos);
        },
        py::arg("draft"), py::arg("prefix"), py::arg("k"), py::arg("stop_at_eos") = true);
  m.def("build_stairs_batch",
        [](const TokenSeq& prefix, const TokenSeq& draft) { return build_stairs_batch(prefix, draft).rows; },
        py::arg("prefix"), py::arg("draft"));
  m.def("stairs_validate",
        [](const TokenSeq& draft, const TokenSeq& argmaxes, std::optional<TokenId> eos) {
          return stairs_validate(draft, argmaxes, eos);
        },
        py::arg("draft"), py::arg("row_argmaxes"), py::arg("eos") = std::nullopt);

  py::class_<BleuScore>(m, "BleuScore")
      .def_readonly("value", &BleuScore::value)
      .def_readonly("precisions", &BleuScore::precisions)
      .def_readonly("brevity_penalty", &BleuScore::brevity_penalty)
      .def_readonly("effective_order", &BleuScore::effective_order);
  m.def("bleu",
        [](const std::vector<std::string>& c, const std::vector<std::string>& r, int max_n) {
          return bleu(c, r, max_n);
        },
        py::arg("candidate"), py::arg("reference"), py::arg("max_n") = 4);

  py::class_<TimingStats>(m, "TimingStats")
      .def_readonly("n", &TimingStats::n)
      .def_readonly("mean", &TimingStats::mean)
      .def_readonly("median", &TimingStats::median)
      .def_readonly("min", &TimingStats::min)
      .def_readonly("max", &TimingStats::max)
      .def_readonly("std", &TimingStats::std)
      .def_readonly("p5", &TimingStats::p5)
      .def_readonly("p25", &TimingStats::p25)
      .def_readonly("p75", &TimingStats::p75)
      .def_readonly("p95", &TimingStats::p95);
  m.def("timing_stats", [](const std::vector<double>& s) { return timing_stats(s); });
  m.def("speedup_percent", &speedup_percent, py::arg("baseline_mean"), py::arg("variant_mean"));

  py::class_<LatencyModel>(m, "LatencyModel")
      .def(py::init([](double base, double per_row, double draft) { return LatencyModel{base, per_row, draft}; }),
           py::arg("target_base") = LatencyModel{}.target_base,
           py::arg("target_per_row") = LatencyModel{}.target_per_row,
           py::arg("draft_per_call") = LatencyModel{}.draft_per_call)
      .def_readwrite("target_base", &LatencyModel::target_base)
      .def_readwrite("target_per_row", &LatencyModel::target_per_row)
      .def_readwrite("draft_per_call", &LatencyModel::draft_per_call);
  m.def("simulate_time", [](const GenerationTrace& t, const LatencyModel& lat) { return simulate_time(t.totals, lat); },
        py::arg("trace"), py::arg("latency"));

  // Config-driven benchmark entry points; return the JSON report as a string.
  m.def(
      "run_sweep_json",
      [](const std::string& config_path, std::optional<std::uint64_t> seed) {
        CliOverrides o;
        o.seed = seed;
        ExperimentPlan plan = load_config(config_path, o).plan;
        plan.repetitions = plan.sweep_repetitions;
        return render_json(run_sweep(plan));
      },
      py::arg("config_path"), py::arg("seed") = std::nullopt);
  m.def(
      "run_comparison_json",
      [](const std::string& config_path, std::optional<std::uint64_t> seed) {
        CliOverrides o;
        o.seed = seed;
        return render_json(run_comparison(load_config(config_path, o).plan));
      },
      py::arg("config_path"), py::arg("seed") = std::nullopt);
}

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stairgen/language_model.hpp"

namespace stairgen {

struct GenConfig {
  int max_new_tokens = 32;
  // Number of stairs rows per target call; the draft looks ahead B - 1 tokens.
  int batch_size = 1;
  bool stop_on_eos = true;

  int draft_length() const noexcept { return batch_size - 1; }
  // Throws InvalidConfig.
  void validate() const;
};

// Nested prefixes scored by the target in a single call:
// rows[0] = prefix, rows[i] = rows[i - 1] + draft[i - 1].
struct StairsBatch {
  std::vector<TokenSeq> rows;
  TokenSeq draft;

  std::size_t batch_size() const noexcept { return rows.size(); }
};

struct ValidationResult {
  // Draft tokens that survived the walk and were committed.
  int accepted_draft_count = 0;
  // Accepted draft tokens followed by the bonus token, cut after the first EOS.
  TokenSeq committed;
  bool hit_eos = false;
};

struct IterationRecord {
  int draft_proposed = 0;
  int accepted = 0;
  int committed = 0;
};

struct TraceTotals {
  std::int64_t target_single_calls = 0;
  std::int64_t target_batch_calls = 0;
  // Every row the target scored, whether in a single or a batch call.
  std::int64_t target_rows_scored = 0;
  std::int64_t draft_calls = 0;
  std::int64_t tokens_generated = 0;
  std::int64_t accepted_total = 0;

  friend bool operator==(const TraceTotals&, const TraceTotals&) = default;
};

struct GenerationTrace {
  std::vector<IterationRecord> iterations;
  TraceTotals totals;

  // Checks that iteration records add up to the totals; returns a
  // description of the first inconsistency, or nullopt.
  std::optional<std::string> check_consistency() const;
};

struct GenerationResult {
  TokenSeq output;  // prompt followed by the generated tokens
  GenerationTrace trace;

  std::span<const TokenId> generated(std::size_t prompt_size) const {
    return std::span<const TokenId>(output).subspan(prompt_size);
  }
};

GenerationResult greedy_generate(const LanguageModel& model, std::span<const TokenId> prompt,
                                 const GenConfig& cfg);

// Up to k greedy draft tokens. With stop_at_eos the proposal ends right after
// an EOS token. `calls` (optional) receives the number of draft model calls.
TokenSeq draft_propose(const LanguageModel& draft_model, std::span<const TokenId> prefix, int k,
                       bool stop_at_eos = true, std::int64_t* calls = nullptr);

StairsBatch build_stairs_batch(std::span<const TokenId> prefix, std::span<const TokenId> draft);

// Ground-truth walk over the stairs rows. row_argmaxes[i] is the target's
// argmax after rows[i]; it must have exactly draft.size() + 1 entries. When
// `eos` is set the committed block is cut after its first EOS.
ValidationResult stairs_validate(std::span<const TokenId> draft,
                                 std::span<const TokenId> row_argmaxes,
                                 std::optional<TokenId> eos = std::nullopt);

GenerationResult stairs_generate(const LanguageModel& target, const LanguageModel& draft_model,
                                 std::span<const TokenId> prompt, const GenConfig& cfg);

GenerationResult sequential_assisted_generate(const LanguageModel& target,
                                              const LanguageModel& draft_model,
                                              std::span<const TokenId> prompt,
                                              const GenConfig& cfg);

}  // namespace stairgen

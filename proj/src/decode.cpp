#include "stairgen/decode.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "stairgen/errors.hpp"

namespace stairgen {
namespace {

void check_shared_vocabulary(const LanguageModel& target, const LanguageModel& draft_model) {
  if (!(target.vocabulary() == draft_model.vocabulary())) {
    throw InvalidConfig(fmt::format("target '{}' and draft '{}' do not share a vocabulary",
                                    target.name(), draft_model.name()));
  }
}

void record(GenerationTrace& trace, int proposed, int accepted, int committed) {
  trace.iterations.push_back({proposed, accepted, committed});
  trace.totals.tokens_generated += committed;
  trace.totals.accepted_total += accepted;
}

}  // namespace

void GenConfig::validate() const {
  if (max_new_tokens < 1) {
    throw InvalidConfig(fmt::format("max_new_tokens must be >= 1, got {}", max_new_tokens));
  }
  if (batch_size < 1) throw InvalidConfig(fmt::format("batch size must be >= 1, got {}", batch_size));
}

std::optional<std::string> GenerationTrace::check_consistency() const {
  std::int64_t committed = 0;
  std::int64_t accepted = 0;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    const auto& it = iterations[i];
    if (it.committed < 1) return fmt::format("iteration {} committed no tokens", i);
    if (it.accepted < 0 || it.accepted > it.draft_proposed || it.accepted > it.committed) {
      return fmt::format("iteration {} accepted {} of {} proposed ({} committed)", i, it.accepted,
                         it.draft_proposed, it.committed);
    }
    committed += it.committed;
    accepted += it.accepted;
  }
  if (committed != totals.tokens_generated) {
    return fmt::format("iterations commit {} tokens but totals say {}", committed,
                       totals.tokens_generated);
  }
  if (accepted != totals.accepted_total) {
    return fmt::format("iterations accept {} tokens but totals say {}", accepted,
                       totals.accepted_total);
  }
  if (totals.target_batch_calls > totals.tokens_generated) {
    return "more target batch calls than generated tokens";
  }
  if (totals.target_rows_scored < totals.target_single_calls + totals.target_batch_calls) {
    return "fewer rows scored than target calls";
  }
  return std::nullopt;
}

GenerationResult greedy_generate(const LanguageModel& model, std::span<const TokenId> prompt,
                                 const GenConfig& cfg) {
  cfg.validate();
  validate_prefix(model.vocabulary(), prompt);
  const TokenId eos = model.vocabulary().eos_id();

  GenerationResult result;
  result.output.assign(prompt.begin(), prompt.end());
  auto& totals = result.trace.totals;
  for (int produced = 0; produced < cfg.max_new_tokens; ++produced) {
    const TokenId next = argmax_token(score_next(model, result.output));
    ++totals.target_single_calls;
    ++totals.target_rows_scored;
    result.output.push_back(next);
    record(result.trace, 0, 0, 1);
    if (cfg.stop_on_eos && next == eos) break;
  }
  return result;
}

TokenSeq draft_propose(const LanguageModel& draft_model, std::span<const TokenId> prefix, int k,
                       bool stop_at_eos, std::int64_t* calls) {
  if (k < 0) throw InvalidInput(fmt::format("draft length must be >= 0, got {}", k));
  const TokenId eos = draft_model.vocabulary().eos_id();
  TokenSeq work(prefix.begin(), prefix.end());
  TokenSeq proposal;
  proposal.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const TokenId next = argmax_token(score_next(draft_model, work));
    if (calls != nullptr) ++*calls;
    proposal.push_back(next);
    work.push_back(next);
    if (stop_at_eos && next == eos) break;
  }
  return proposal;
}

StairsBatch build_stairs_batch(std::span<const TokenId> prefix, std::span<const TokenId> draft) {
  StairsBatch batch;
  batch.draft.assign(draft.begin(), draft.end());
  batch.rows.reserve(draft.size() + 1);
  TokenSeq row(prefix.begin(), prefix.end());
  row.reserve(prefix.size() + draft.size());
  batch.rows.push_back(row);
  for (TokenId t : draft) {
    row.push_back(t);
    batch.rows.push_back(row);
  }
  return batch;
}

ValidationResult stairs_validate(std::span<const TokenId> draft,
                                 std::span<const TokenId> row_argmaxes,
                                 std::optional<TokenId> eos) {
  if (row_argmaxes.size() != draft.size() + 1) {
    throw ContractViolation(fmt::format("stairs validation needs {} row predictions for a draft of {}, got {}",
                                        draft.size() + 1, draft.size(), row_argmaxes.size()));
  }
  // rows[0]'s prediction is the first ground truth; each following draft
  // token extends it only while it equals the prediction made one row above.
  std::size_t walk = 0;
  while (walk < draft.size() && draft[walk] == row_argmaxes[walk]) ++walk;

  ValidationResult result;
  result.committed.assign(draft.begin(), draft.begin() + static_cast<std::ptrdiff_t>(walk));
  result.committed.push_back(row_argmaxes[walk]);
  if (eos) {
    auto it = std::find(result.committed.begin(), result.committed.end(), *eos);
    if (it != result.committed.end()) {
      result.committed.erase(it + 1, result.committed.end());
      result.hit_eos = true;
    }
  }
  result.accepted_draft_count = static_cast<int>(std::min(walk, result.committed.size()));
  return result;
}

GenerationResult stairs_generate(const LanguageModel& target, const LanguageModel& draft_model,
                                 std::span<const TokenId> prompt, const GenConfig& cfg) {
  cfg.validate();
  check_shared_vocabulary(target, draft_model);
  validate_prefix(target.vocabulary(), prompt);
  const TokenId eos = target.vocabulary().eos_id();
  const std::optional<TokenId> stop_token =
      cfg.stop_on_eos ? std::optional<TokenId>(eos) : std::nullopt;

  GenerationResult result;
  result.output.assign(prompt.begin(), prompt.end());
  auto& totals = result.trace.totals;
  std::vector<TokenId> argmaxes;
  while (totals.tokens_generated < cfg.max_new_tokens) {
    const auto remaining = static_cast<std::size_t>(cfg.max_new_tokens - totals.tokens_generated);

    TokenSeq draft = draft_propose(draft_model, result.output, cfg.draft_length(),
                                   cfg.stop_on_eos, &totals.draft_calls);
    StairsBatch batch = build_stairs_batch(result.output, draft);
    std::vector<Logits> logits = score_batch(target, batch.rows);
    ++totals.target_batch_calls;
    totals.target_rows_scored += static_cast<std::int64_t>(batch.rows.size());

    argmaxes.clear();
    for (const auto& row : logits) argmaxes.push_back(argmax_token(row));
    ValidationResult v = stairs_validate(draft, argmaxes, stop_token);

    if (v.committed.size() > remaining) v.committed.resize(remaining);
    const int accepted = std::min(v.accepted_draft_count, static_cast<int>(v.committed.size()));
    result.output.insert(result.output.end(), v.committed.begin(), v.committed.end());
    record(result.trace, static_cast<int>(draft.size()), accepted,
           static_cast<int>(v.committed.size()));
    if (cfg.stop_on_eos && v.committed.back() == eos) break;
  }
  return result;
}

GenerationResult sequential_assisted_generate(const LanguageModel& target,
                                              const LanguageModel& draft_model,
                                              std::span<const TokenId> prompt,
                                              const GenConfig& cfg) {
  cfg.validate();
  check_shared_vocabulary(target, draft_model);
  validate_prefix(target.vocabulary(), prompt);
  const TokenId eos = target.vocabulary().eos_id();

  GenerationResult result;
  result.output.assign(prompt.begin(), prompt.end());
  auto& totals = result.trace.totals;
  bool finished = false;
  while (!finished && totals.tokens_generated < cfg.max_new_tokens) {
    const auto remaining = static_cast<std::size_t>(cfg.max_new_tokens - totals.tokens_generated);
    TokenSeq draft = draft_propose(draft_model, result.output, cfg.draft_length(),
                                   cfg.stop_on_eos, &totals.draft_calls);

    // One target call per position, left to right, stopping at the first
    // mismatch; the target's own prediction there is the bonus token.
    int accepted = 0;
    std::size_t committed = 0;
    for (std::size_t i = 0;; ++i) {
      const TokenId truth = argmax_token(score_next(target, result.output));
      ++totals.target_single_calls;
      ++totals.target_rows_scored;
      result.output.push_back(truth);
      ++committed;
      const bool matched = i < draft.size() && draft[i] == truth;
      if (matched) ++accepted;
      if (cfg.stop_on_eos && truth == eos) {
        finished = true;
        break;
      }
      if (!matched || committed >= remaining) break;
    }
    record(result.trace, static_cast<int>(draft.size()), accepted, static_cast<int>(committed));
  }
  return result;
}

}  // namespace stairgen
